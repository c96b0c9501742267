from fractions import Fraction
import math

import numpy as np
import pytest

from conftest import random_pa
from toricheights.concave import (
    Estimate,
    GridConcave,
    PAConcave,
    integrate,
    legendre_dual,
    mixed_integral,
    perturbation_constant,
    sup_convolution,
    uniform_perturbation_bound,
)
from toricheights.lattice_geometry import LatticePolytope, mixed_volume, unit_cube, unit_simplex


def test_dual_of_tropical_line_is_zero_on_simplex():
    f = PAConcave.from_pieces([(0, 0), (1, 0), (0, 1)], [0, 0, 0])
    d = f.dual()
    assert d.domain == unit_simplex(2)
    assert set(d.values) == {0}
    assert d.dual().equals(f)


def test_dual_convention_on_a_single_piece():
    # min(<m,u> + b) has dual iota_m - b
    f = PAConcave.affine((2, -1), Fraction(3, 2))
    d = legendre_dual(f)
    assert d.points == ((2, -1),)
    assert d.values == (Fraction(-3, 2),)


def test_evaluate_and_integrate_tent():
    tent = PAConcave.lifted([(0,), (Fraction(1, 2),), (1,)], [0, Fraction(1, 2), 0])
    assert integrate(tent) == Fraction(1, 4)
    assert tent.evaluate((Fraction(1, 4),)) == Fraction(1, 4)
    assert tent.evaluate((2,)) == -math.inf


def test_sup_convolution_of_constants_adds_values_on_minkowski_sum():
    a = PAConcave.constant(unit_cube(2), 1)
    b = PAConcave.constant(unit_simplex(2), Fraction(1, 3))
    c = sup_convolution(a, b)
    assert c.domain == unit_cube(2) + unit_simplex(2)
    assert set(c.values) == {Fraction(4, 3)}


def test_self_sup_convolution_is_dilation():
    rng = np.random.default_rng(3)
    f = random_pa(rng, 2)
    g = sup_convolution(f, f)
    for x in f.domain.vertices:
        y = tuple(2 * c for c in x)
        assert g.evaluate(y) == 2 * f.evaluate(x)


def test_mixed_integral_monomial_slot_example():
    # MI(0 on square, iota_(1,0) + 3, 0 on simplex) = 3 MV(square, simplex) = 6
    mi = mixed_integral(PAConcave.zero(unit_cube(2)), PAConcave.indicator((1, 0), 3), PAConcave.zero(unit_simplex(2)))
    assert mi == 6 == 3 * mixed_volume(unit_cube(2), unit_simplex(2))


def test_mixed_integral_in_dimension_one_telescopes():
    # by hand: a zero point slot contributes 0 * length; the zero roof on
    # [0, 1] gives int_[0,2] (0 [+] roof) - int roof = 3/4 - 1/4 = max roof
    roof = PAConcave.lifted([(0,), (Fraction(1, 2),), (1,)], [0, Fraction(1, 2), 0])
    assert mixed_integral(PAConcave.zero(LatticePolytope([(0,)])), roof) == 0
    assert mixed_integral(PAConcave.zero(LatticePolytope([(0,), (1,)])), roof) == Fraction(1, 2)


def test_mixed_integral_of_constants_is_linear_in_constants():
    P, Q, R = unit_cube(2), unit_simplex(2), LatticePolytope([(0, 0), (2, 1), (1, 2)])
    mi = mixed_integral(PAConcave.constant(P, 2), PAConcave.constant(Q, -1), PAConcave.constant(R, 5))
    assert mi == 2 * mixed_volume(Q, R) - mixed_volume(P, R) + 5 * mixed_volume(P, Q)


@pytest.mark.parametrize("n", [1, 2])
def test_random_identities(n):
    rng = np.random.default_rng(10 + n)
    for _ in range(6):
        fs = [random_pa(rng, n, full=False) for _ in range(n + 1)]
        g = random_pa(rng, n, full=False)
        assert fs[0].dual().dual().equals(fs[0])
        assert sup_convolution(fs[0], g).dual().equals(fs[0].dual() + g.dual())
        base = mixed_integral(*fs)
        assert mixed_integral(*fs[::-1]) == base
        assert mixed_integral(sup_convolution(fs[0], g), *fs[1:]) == base + mixed_integral(g, *fs[1:])
        c = Fraction(int(rng.integers(-5, 6)), 7)
        m = tuple(int(v) for v in rng.integers(-2, 3, size=n))
        others = [f.domain for f in fs[1:]]
        assert mixed_integral(PAConcave.indicator(m, c), *fs[1:]) == c * mixed_volume(*others)


def test_float_mixed_integral_matches_exact():
    rng = np.random.default_rng(5)
    fs = [random_pa(rng, 2) for _ in range(3)]
    exact = mixed_integral(*fs)
    approx = mixed_integral(*[f.to_float() for f in fs])
    assert isinstance(approx, Estimate)
    assert approx.value == pytest.approx(float(exact), abs=1e-9)


def test_perturbation_bound_holds_for_intercept_jitter():
    rng = np.random.default_rng(8)
    fs = [random_pa(rng, 2) for _ in range(3)]
    eps = Fraction(1, 100)
    jittered = [PAConcave.lifted(f.points, [v + eps * int(rng.choice([-1, 1])) for v in f.values]) for f in fs]
    delta, bound, ok = uniform_perturbation_bound(fs, jittered, eps)
    assert ok and delta <= bound
    assert perturbation_constant(fs) > 0


def test_grid_bracket_contains_exact_mixed_integral():
    rng = np.random.default_rng(2)
    fs = [random_pa(rng, 2) for _ in range(3)]
    exact = float(mixed_integral(*fs))
    g = GridConcave.sample(fs[1].to_float(), fs[1].domain, resolution=16)
    est = mixed_integral(fs[0], g, fs[2])
    assert est.contains(exact)
    lo, hi = g.bracket(np.array([[float(c) for c in fs[1].domain.vertices[0]]]))
    v = float(fs[1].evaluate(fs[1].domain.vertices[0]))
    assert lo[0] - 1e-12 <= v <= hi[0] + 1e-12


def test_json_round_trip_exact_and_float():
    f = PAConcave.lifted([(0, 0), (1, 0), (0, 1)], [Fraction(1, 3), 0, -2])
    assert PAConcave.from_json(f.to_json()).equals(f)
    h = f.to_float()
    assert PAConcave.from_json(h.to_json()).equals(h, tol=1e-12)


def test_mixed_integral_arity_error():
    with pytest.raises(ValueError):
        mixed_integral(PAConcave.zero(unit_cube(2)), PAConcave.zero(unit_cube(2)))
