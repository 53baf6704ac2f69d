"""Exact tools for countable linear orders, transfinite rational sequences and trees."""

from .ordinal import Ordinal, parse as parse_ordinal
from .order import EnumeratedOrder, builtin
from .ratseq import RatSeq, canonical
from .tree import LeveledTree, Node

__all__ = ["Ordinal", "parse_ordinal", "EnumeratedOrder", "builtin", "RatSeq", "canonical",
           "LeveledTree", "Node"]
__version__ = "0.1.0"
