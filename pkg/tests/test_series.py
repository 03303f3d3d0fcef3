import numpy as np
import pytest

from greenp2.errors import OrderExceedsTruncation, PositiveDimensional
from greenp2.polys import parse_poly
from greenp2.series import (
    AffineSeries2,
    compose_poly_series,
    local_multiplicity,
    recenter_taylor,
    shift_bivariate,
    vanishing_order,
)


def series_from(entries, trunc):
    s = AffineSeries2(trunc)
    for (i, j), c in entries.items():
        s.coeffs[i, j] = c
    return s


def test_recenter_binomial_example():
    """zw dehomogenized in the t chart and recentered at (1, 0) reads v + uv."""
    s = recenter_taylor(parse_poly("z*w"), 2, (1.0, 0.0), 2)
    expect = np.zeros((3, 3))
    expect[0, 1] = 1.0
    expect[1, 1] = 1.0
    assert np.allclose(s.coeffs, expect)


def test_recenter_constant():
    s = recenter_taylor(parse_poly("t^2"), 2, (0.7 - 0.2j, 1.5), 3)
    assert s.coeffs[0, 0] == 1.0
    assert np.max(np.abs(s.coeffs)) == 1.0


def test_recenter_already_centered():
    s = recenter_taylor(parse_poly("z^2"), 2, (0.0, 0.0), 2)
    assert s.coeffs[2, 0] == 1.0 and np.count_nonzero(s.coeffs) == 1


def test_recenter_round_trip():
    """Recentering away and back reproduces the coefficients to 1e-9 relative."""
    rng = np.random.default_rng(3)
    p = parse_poly("z^3 + 2z*w*t - w^2*t + t^3 - z^2*w")
    C = p.dehomogenize(2)
    center = (0.8 - 0.3j, -1.1 + 0.6j)
    there = shift_bivariate(C, center)
    back = shift_bivariate(there, (-center[0], -center[1]))
    assert np.max(np.abs(back - C)) <= 1e-9 * np.max(np.abs(C))


def test_vanishing_order_inspection():
    s = series_from({(2, 1): 1.0, (5, 0): 1.0}, 5)
    assert vanishing_order(s) == 3


def test_vanishing_order_unit():
    s = series_from({(0, 0): 1.0, (1, 0): 1.0}, 3)
    assert vanishing_order(s) == 0


def test_vanishing_order_jacobian_example():
    """The Jacobian -4uv of (2u+v^2, u^2) vanishes to order two."""
    g1 = series_from({(1, 0): 2.0, (0, 2): 1.0}, 4)
    g2 = series_from({(2, 0): 1.0}, 4)
    du1, dv1 = series_from({(0, 0): 2.0}, 4), series_from({(0, 1): 2.0}, 4)
    du2, dv2 = series_from({(1, 0): 2.0}, 4), series_from({(0, 0): 0.0}, 4)
    jac = du1 * dv2 - dv1 * du2
    assert vanishing_order(jac) == 2


def test_vanishing_order_raises_beyond_truncation():
    s = series_from({(3, 3): 1.0}, 5)  # order 6 exceeds truncation 5
    s.coeffs[3, 3] = 0.0
    with pytest.raises(OrderExceedsTruncation):
        vanishing_order(s)


def test_vanishing_order_graded_tolerance():
    """Huge high-degree coefficients must not drown a legitimate low order."""
    s = series_from({(1, 0): 1.0, (4, 4): 1e12}, 8)
    assert vanishing_order(s) == 1


def test_multiplication_truncates():
    a = series_from({(1, 0): 1.0, (0, 1): 1.0}, 3)
    prod = a * a
    assert prod.coeffs[2, 0] == 1.0 and prod.coeffs[1, 1] == 2.0
    assert vanishing_order(prod) == 2


def test_reciprocal_inverts():
    s = series_from({(0, 0): 2.0, (1, 0): 0.5, (0, 2): -1.0}, 6)
    one = s * s.reciprocal()
    assert abs(one.coeffs[0, 0] - 1.0) < 1e-12
    one.coeffs[0, 0] = 0.0
    assert np.max(np.abs(one.coeffs)) < 1e-12


def test_compose_poly_series():
    """(v + uv)^2 via composition of u^2 with the substituted series."""
    P = np.zeros((3, 3), dtype=complex)
    P[2, 0] = 1.0
    s1 = series_from({(0, 1): 1.0, (1, 1): 1.0}, 4)
    s2 = series_from({(1, 0): 1.0}, 4)
    comp = compose_poly_series(P, s1, s2)
    assert comp.coeffs[0, 2] == 1.0 and comp.coeffs[1, 2] == 2.0 and comp.coeffs[2, 2] == 1.0


class TestLocalMultiplicity:
    def test_transversal(self):
        g1 = series_from({(1, 0): 1.0, (0, 2): 3.0}, 4)
        g2 = series_from({(0, 1): 1.0}, 4)
        assert local_multiplicity(g1, g2) == 1

    def test_cusp_pair(self):
        g1 = series_from({(2, 0): 1.0}, 4)
        g2 = series_from({(0, 2): 1.0}, 4)
        assert local_multiplicity(g1, g2) == 4

    def test_tangency(self):
        g1 = series_from({(0, 1): 1.0, (2, 0): -1.0}, 4)
        g2 = series_from({(0, 1): 1.0}, 4)
        assert local_multiplicity(g1, g2) == 2

    def test_shared_branch_raises(self):
        g = series_from({(0, 1): 1.0, (2, 0): -1.0}, 4)
        with pytest.raises(PositiveDimensional):
            local_multiplicity(g, g.copy())
