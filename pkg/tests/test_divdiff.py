import cmath
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phi3matrix import Jet
from phi3matrix.divdiff import EPS_DD, clusters, complete_homogeneous, divided_difference, direct_divided_difference
from phi3matrix.errors import InputError


def exp_taylor(z0, n):
    return [cmath.exp(z0) / math.factorial(k) for k in range(n)]


def log_taylor(z0, n):
    return [complex(v) for v in Jet.variable(complex(z0), n - 1).log().coeffs]


def test_confluent_is_taylor_coefficient():
    # f[z, z, z] = f''(z) / 2
    v = divided_difference([1.0, 1.0, 1.0], cmath.exp, exp_taylor)
    assert v == pytest.approx(math.e / 2, rel=1e-14)


def test_distinct_nodes_match_sum_formula():
    pts = [1.0, 2.5, 4.0 + 1j, 7.0]
    a = divided_difference(pts, cmath.log, log_taylor)
    b = direct_divided_difference(pts, cmath.log)
    assert abs(a - b) < 1e-14


@given(st.floats(0.5, 3.0), st.integers(3, 9))
def test_near_confluent_is_continuous(z0, k):
    # a cluster at separation 10^-k against the exact confluent value
    d = 10.0**-k
    pts = [z0, z0 + d, z0 + 2 * d]
    with mpmath.workdps(60):
        zs = [mpmath.mpf(z0), mpmath.mpf(z0) + mpmath.mpf(d), mpmath.mpf(z0) + 2 * mpmath.mpf(d)]
        exact = sum(
            mpmath.log(zs[i]) / mpmath.fprod(zs[i] - zs[j] for j in range(3) if j != i) for i in range(3)
        )
    # above the cluster threshold the recursion loses about eps / d^2
    tol = 1e-12 + 1e-15 / d**2 if d > EPS_DD * z0 else 1e-12
    assert abs(divided_difference(pts, cmath.log, log_taylor) - complex(exact)) < tol


def test_polynomial_divided_difference_is_leading_coefficient():
    f = lambda z: 3 * z**3 - z + 2
    taylor = lambda z0, n: [f(z0), 9 * z0**2 - 1, 9 * z0, 3] + [0] * max(0, n - 4)
    assert divided_difference([0.3, 1.1, 1.1 + 1e-8, 5.0], f, taylor) == pytest.approx(3.0, abs=1e-9)


def test_clusters_group_by_relative_distance():
    assert clusters([1.0, 1.0 + 1e-7, 2.0]) == [[0, 1], [2]]


def test_complete_homogeneous():
    h = complete_homogeneous([2.0, 3.0], 2)
    assert h == [1.0, 5.0, 4.0 + 6.0 + 9.0]


def test_empty_rejected():
    with pytest.raises(InputError):
        divided_difference([], cmath.exp, exp_taylor)
