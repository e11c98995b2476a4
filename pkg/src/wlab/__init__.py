"""Free boundary minimal surfaces from Weierstrass data.

Submodules: :mod:`jets` (truncated power series), :mod:`weierstrass`
(immersions from ``(g, f dw)``), :mod:`geometry`, :mod:`boundary`,
:mod:`series_verify`, :mod:`catalog` and :mod:`cli`.
"""
from .catalog import get_surface
from .series_verify import BoundaryJetData, derive_constraints
from .weierstrass import Chart, evaluate, from_gauss_map

__all__ = ["BoundaryJetData", "Chart", "derive_constraints", "evaluate", "from_gauss_map", "get_surface"]
