"""Composite Gauss-Legendre grids on [1, Xi] with geometric panels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError

__all__ = ["Grid", "make_grid"]


def _barycentric(x: np.ndarray) -> np.ndarray:
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def _diff_matrix(x: np.ndarray) -> np.ndarray:
    b = _barycentric(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (b[None, :] / b[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


@dataclass(frozen=True, eq=False)
class Grid:
    """Nodes T_1 < ... < T_n in [1, Xi] with quadrature weights.

    Each of the ``panels`` geometric panels carries ``q`` Gauss-Legendre
    nodes, so the rule is exact for polynomials of degree 2q-1 per panel.
    """

    nodes: np.ndarray
    weights: np.ndarray
    Xi: float
    q: int
    edges: np.ndarray
    _ref_diff: np.ndarray = field(repr=False)
    _left_weights: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def panels(self) -> int:
        return self.edges.size - 1

    def differentiate(self, values: np.ndarray) -> np.ndarray:
        """Panel-wise spectral derivative of sampled values."""
        v = np.asarray(values).reshape(self.panels, self.q)
        h = np.diff(self.edges)[:, None]
        return ((v @ self._ref_diff.T) * (2.0 / h)).reshape(-1)

    def value_at_one(self, values: np.ndarray):
        """Extrapolate sampled values to the left endpoint T = 1."""
        return np.dot(self._left_weights, np.asarray(values)[: self.q])


def make_grid(n: int = 2000, Xi: float = 1e8, q: int = 16) -> Grid:
    if Xi <= 1:
        raise InputError("the cutoff must exceed 1")
    if n < q or n % q:
        raise InputError(f"n = {n} must be a positive multiple of the panel size q = {q}")
    panels = n // q
    edges = Xi ** (np.arange(panels + 1) / panels)
    edges[0], edges[-1] = 1.0, Xi
    ref, refw = np.polynomial.legendre.leggauss(q)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (0.5 * (b - a) * ref[None, :] + 0.5 * (a + b)).reshape(-1)
    weights = (0.5 * (b - a) * refw[None, :]).reshape(-1)
    bw = _barycentric(ref)
    lw = bw / (-1.0 - ref)
    lw = lw / lw.sum()
    return Grid(nodes, weights, float(Xi), q, edges, _diff_matrix(ref), lw)
