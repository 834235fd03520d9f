"""Hilbert-Kunz density and multiplicity of the quadrics x_0^2 + ... + x_{n+1}^2 in odd characteristic."""

from .density import density_eval, density_infty, density_n3
from .frobenius import decompose_line, graded_length, transition_matrix
from .multiplicity import ehk, ehk_closed, ehk_series, ehk_stationary
from .oracle import oracle_length
from .quadric import QuadricContext

__all__ = [
    "QuadricContext",
    "decompose_line",
    "density_eval",
    "density_infty",
    "density_n3",
    "ehk",
    "ehk_closed",
    "ehk_series",
    "ehk_stationary",
    "graded_length",
    "oracle_length",
    "transition_matrix",
]
