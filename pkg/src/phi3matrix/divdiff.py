"""Divided differences with confluent and near-confluent nodes.

``f[z_1, ..., z_n] = sum_k f(z_k) / prod_{l != k} (z_k - z_l)`` is the
quantity behind every multi-argument correlator.  Nodes closer than a relative
threshold are grouped into clusters.  Inside a cluster the divided difference
comes from the Taylor expansion at the cluster centre,

    f[z_1..z_n] = sum_k a_k h_{k-n+1}(d_1, ..., d_n),   d_i = z_i - centre,

with h_m the complete homogeneous symmetric polynomials.  Clusters are then
joined by the ordinary Newton recursion, which only ever divides by
well-separated node differences.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import InputError

__all__ = ["EPS_DD", "clusters", "divided_difference", "complete_homogeneous"]

EPS_DD = 1e-5
_EXTRA_TERMS = 5


def clusters(points: Sequence[complex], eps: float = EPS_DD) -> list[list[int]]:
    """Single-linkage clusters of node indices under the relative threshold."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            zi, zj = points[i], points[j]
            if abs(zi - zj) <= eps * max(abs(zi), abs(zj)):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: min(g))


def complete_homogeneous(deltas: Sequence, m_max: int) -> list:
    """h_0..h_{m_max} of the given variables."""
    h = [1.0] + [0.0] * m_max
    for d in deltas:
        # multiply the generating function by 1/(1 - d t)
        for m in range(1, m_max + 1):
            h[m] = h[m] + d * h[m - 1]
    return h


def divided_difference(
    points: Sequence[complex],
    value: Callable,
    taylor: Callable,
    eps: float = EPS_DD,
):
    """f[points] for an analytic f.

    ``value(z)`` returns f(z); ``taylor(z0, n)`` returns the Taylor
    coefficients a_0..a_{n-1} of f at z0.  Values may be scalars or any type
    with ring arithmetic and division by scalars (jets, for instance).
    """
    pts = [complex(z) for z in points]
    n = len(pts)
    if n == 0:
        raise InputError("divided difference of zero nodes")
    groups = clusters(pts, eps)
    order = [i for g in groups for i in g]
    z = [pts[i] for i in order]
    gid = [k for k, g in enumerate(groups) for _ in g]

    # Taylor data per cluster of size >= 2
    cluster_data = {}
    start = 0
    for k, g in enumerate(groups):
        size = len(g)
        if size > 1:
            members = z[start : start + size]
            centre = sum(members) / size
            coeffs = taylor(centre, size + _EXTRA_TERMS)
            cluster_data[k] = (start, centre, coeffs)
        start += size

    def in_cluster(i, j):
        k = gid[i]
        s0, centre, coeffs = cluster_data[k]
        deltas = [zz - centre for zz in z[i : j + 1]]
        m = j - i + 1
        hs = complete_homogeneous(deltas, len(coeffs) - m)
        acc = coeffs[m - 1] * hs[0]
        for q in range(1, len(coeffs) - m + 1):
            acc = acc + coeffs[m - 1 + q] * hs[q]
        return acc

    # table[i] holds f[z_i .. z_{i+d}] for the current span d
    table = []
    for i in range(n):
        if gid[i] in cluster_data:
            table.append(in_cluster(i, i))
        else:
            table.append(value(z[i]))
    for d in range(1, n):
        new = []
        for i in range(n - d):
            j = i + d
            if gid[i] == gid[j]:
                new.append(in_cluster(i, j))
            else:
                new.append((table[i + 1] - table[i]) / (z[j] - z[i]))
        table = new
    return table[0]


def direct_divided_difference(points: Sequence[complex], value: Callable):
    """The symmetric sum formula; only valid for pairwise distinct nodes."""
    pts = [complex(z) for z in points]
    total = 0
    for k, zk in enumerate(pts):
        den = np.prod([zk - zl for l, zl in enumerate(pts) if l != k]) if len(pts) > 1 else 1.0
        total = total + value(zk) / den
    return total
