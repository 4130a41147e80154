"""Weyl groups of finite type together with the embedded tables of elliptic
classes and the search used to check them."""

from .classes import ConjugacyClass, EnumerationBudget, enumerate_classes
from .element import WeylElement, format_factors
from .roots import RootSystem, UnsupportedType, build_weyl
from .search import SearchResult, cyclic_shift_minimize, descend, find_elliptic_rep
from .tables import EllipticRow, TableReport, load_rows, rows_for, verify_table

__all__ = [
    "RootSystem", "UnsupportedType", "build_weyl", "WeylElement", "format_factors",
    "ConjugacyClass", "EnumerationBudget", "enumerate_classes", "SearchResult",
    "cyclic_shift_minimize", "descend", "find_elliptic_rep", "EllipticRow", "TableReport",
    "load_rows", "rows_for", "verify_table",
]
