"""Littlewood-Paley tools and an estimate harness for transport by singular integrals on the torus."""
from .grid import Field, Grid, make_grid
from .czop import Multiplier, make_multiplier
from .coeff import CoefficientDecomposition, g_family, synthesize
from .solver import SolveResult, dyson_term, picard_iterates, reference_solve

__version__ = "0.1.0"

__all__ = [
    "Field", "Grid", "make_grid", "Multiplier", "make_multiplier", "CoefficientDecomposition",
    "g_family", "synthesize", "SolveResult", "dyson_term", "picard_iterates", "reference_solve",
]
