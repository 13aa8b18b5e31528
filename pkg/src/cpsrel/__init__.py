"""Finite relations, groupoids and the CP* construction over them."""

from .groupoid import Groupoid, SubgroupoidRef
from .relcat import Carrier, Relation

__all__ = ["Carrier", "Groupoid", "Relation", "SubgroupoidRef"]
__version__ = "0.1.0"
