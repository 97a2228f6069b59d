"""Rigidity and persistence of directed formation graphs and meta-formations."""

from .graph import (
    Formation,
    MetaFormation,
    MetaClass,
    UndirectedView,
    parse_formation,
    parse_meta_formation,
    export_formation,
    export_meta_formation,
    export_dot,
)
from .errors import (
    MetaformError,
    InputError,
    ResourceLimitError,
    NotPersistentError,
    NotRigidError,
    InfeasibleMergeError,
)

__all__ = [
    "Formation",
    "MetaFormation",
    "MetaClass",
    "UndirectedView",
    "parse_formation",
    "parse_meta_formation",
    "export_formation",
    "export_meta_formation",
    "export_dot",
    "MetaformError",
    "InputError",
    "ResourceLimitError",
    "NotPersistentError",
    "NotRigidError",
    "InfeasibleMergeError",
]

__version__ = "0.1.0"
