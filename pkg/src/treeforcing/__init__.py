"""Perfect-tree forcing machinery at desk scale: tree expressions, splitting
systems and their fusion, generic sequences of multisystems, real names and
direct forcing, and the stagewise construction of coordinate notions."""

from .errors import ForcingError
from .treealg import (
    FULL, Cone, Full, FusionLimit, Restrict, UnionFin, Verdict, cone, contains, level,
    levels_doc, parse_tree, restrict, stem, to_text, union,
)

__version__ = "0.1.0"
