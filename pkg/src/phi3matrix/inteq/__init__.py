"""Discretised integral equations used as an independent oracle."""

from .grid import Grid, make_grid
from .kernels import BACKEND
from .solver import (
    Candidate,
    ResidualReport,
    closed_form_G11,
    closed_form_G111,
    closed_form_W,
    residual_report,
    solve_G11_inteq,
    solve_W_inteq,
)

__all__ = [
    "BACKEND",
    "Grid",
    "make_grid",
    "Candidate",
    "ResidualReport",
    "closed_form_W",
    "closed_form_G11",
    "closed_form_G111",
    "solve_W_inteq",
    "solve_G11_inteq",
    "residual_report",
]
