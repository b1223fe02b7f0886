"""Closed-form N^kLL expansions of Dyson-Schwinger Green functions via decorated chord diagrams."""

from .apoly import AMonomial, APolynomial, UnassignedSymbol
from .diagrams import ChordDiagram, DecoratedDiagram, DiagramType
from .expansions import HkClosedForm, green_series, hk_bruteforce, hk_closed_form, hk_series, p_series
from .symexpr import LogExpr
from .typegf import F_of_type, enumerate_types

__all__ = [
    "AMonomial",
    "APolynomial",
    "ChordDiagram",
    "DecoratedDiagram",
    "DiagramType",
    "F_of_type",
    "HkClosedForm",
    "LogExpr",
    "UnassignedSymbol",
    "enumerate_types",
    "green_series",
    "hk_bruteforce",
    "hk_closed_form",
    "hk_series",
    "p_series",
]
