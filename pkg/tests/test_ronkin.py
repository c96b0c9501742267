from fractions import Fraction
import math

import numpy as np
import pytest

from toricheights.ronkin import (
    INFINITY,
    Place,
    log_abs,
    ord_p,
    ronkin_arch,
    ronkin_arch_fiber,
    ronkin_dual,
    ronkin_dual_arch,
    ronkin_dual_nonarch,
    tropical_ronkin,
)

from conftest import mahler_line_oracle, poly


def test_valuations_and_places():
    assert ord_p(Fraction(3, 8), 2) == -3
    assert ord_p(12, 3) == 1
    assert log_abs(8, Place(2)) == pytest.approx(-3 * math.log(2))
    assert log_abs(-5, INFINITY) == pytest.approx(math.log(5))
    assert Place.parse("inf") == INFINITY and Place.parse("3") == Place(3)


def test_nonarch_dual_one_plus_half_x_at_two():
    # |1/2|_2 = 2, so the hull of (m, log|alpha_m|_2) / log 2 is the segment (0, 0)-(1, 1)
    d = ronkin_dual_nonarch(poly("1 + x/2", dim=1), 2)
    assert d.exact and d.unit == pytest.approx(math.log(2))
    assert d.evaluate([Fraction(1, 2)]) == pytest.approx(math.log(2) / 2)
    assert d.function.evaluate([1]) == 1


def test_nonarch_dual_drops_interior_point_below_hull():
    # log|2|_2 = -log 2 at m = 2 and 0 at m = 0, 1
    d = ronkin_dual_nonarch(poly("1 + x + 2*x**2", dim=1), 2)
    assert [d.function.evaluate([m]) for m in (0, 1, 2)] == [0, 0, -1]
    assert d.function.evaluate([Fraction(3, 2)]) == Fraction(-1, 2)


def test_nonarch_dual_vertex_values_are_exact_valuations():
    f = poly("6 + x/3 + 10*y + 5*x*y")
    for p in (2, 3, 5):
        d = ronkin_dual(f, Place(p))
        for m, c in f.terms:
            assert d.function.evaluate(list(m)) == -ord_p(c, p)


def test_monomial_dual_is_a_point():
    d = ronkin_dual_arch(poly("3*x*y"))
    assert np.allclose(d.function.to_float().points, [[1, 1]])
    assert float(d.function.to_float().values[0]) == pytest.approx(math.log(3))


def test_qmc_jensen_oracles():
    # m(1 + x) = 0 by Jensen and m(1 + x + y) from the Hurwitz zeta oracle
    a = ronkin_arch(poly("1 + x", dim=1), [0.0])
    assert abs(a.value) <= 1e-4
    b = ronkin_arch(poly("1 + x + y"), [0.0, 0.0])
    assert abs(b.value + mahler_line_oracle()) <= 1e-3
    assert b.error <= 1e-3


def test_arch_pointwise_lies_below_tropical():
    f = poly("1 + 3*x + x**2", dim=1)
    trop = tropical_ronkin(f)
    for u in (-2.0, -0.3, 0.0, 0.7, 2.5):
        assert ronkin_arch(f, [u], budget=2**14).value <= trop.evaluate([u]) + 1e-6


def test_tropical_with_all_monomials_can_undercut():
    # with the interior monomial 3x the tropical minimum drops below rho at 0
    f = poly("1 + 3*x + x**2", dim=1)
    rho0 = ronkin_arch(f, [0.0], budget=2**14).value
    assert tropical_ronkin(f, vertices_only=False).evaluate([0.0]) < rho0 - 0.1


def test_fiber_quadrature_matches_qmc():
    f = poly("1 + x + y")
    A = np.array([0.0, 0.5, -1.0])
    B = np.array([0.0, -1.0, 0.3])
    d = ronkin_arch_fiber(f, A, B)
    assert d["rho"].shape == (3, 3)
    for i, a in enumerate(A):
        for j, b in enumerate(B):
            q = ronkin_arch(f, [a, b], budget=2**16)
            assert abs(d["rho"][i, j] - q.value) <= q.error + d["error"] + 1e-3
    assert d["error"] < 1e-3


def test_arch_dual_is_nonnegative_on_simplex_and_zero_at_vertices():
    d = ronkin_dual_arch(poly("1 + x + y"))
    for x in ([0, 0], [1, 0], [0, 1]):
        assert abs(d.evaluate(x)) <= 1e-6
    for x in ([1 / 3, 1 / 3], [0.2, 0.5], [0.5, 0.0]):
        assert d.evaluate(x) >= -1e-6
    # the maximum of the dual is -min rho = m(1 + x + y) at the centroid gradient
    assert d.evaluate([1 / 3, 1 / 3]) == pytest.approx(mahler_line_oracle(), abs=5e-3)
    assert d.error <= 1e-2


def test_scaling_shifts_arch_dual():
    d1 = ronkin_dual_arch(poly("1 + x + y"))
    d2 = ronkin_dual_arch(poly("5 + 5*x + 5*y"))
    for x in ([0.1, 0.2], [1 / 3, 1 / 3]):
        assert d2.evaluate(x) - d1.evaluate(x) == pytest.approx(math.log(5), abs=1e-12)
