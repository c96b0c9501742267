from fractions import Fraction
import math

import mpmath
import pytest
import sympy

from toricheights.laurent import TorsionPoint, quasi_strict_sequence
from toricheights.verifier import (
    CSV_COLUMNS,
    ExperimentConfig,
    adelic_tail,
    convergence_experiment,
    cycle_height_exact,
    equidistribution_demo,
    good_prime_report,
    local_error_term,
    mahler_measure_poly,
    rows_to_csv,
    tail_bound,
)

from conftest import mahler_line_oracle, poly

I2 = TorsionPoint.identity(2)
LINE = poly("1 + x + y")


def weil_height(expr):
    """h(alpha) = m(minimal polynomial) / degree, roots by mpmath."""
    X = sympy.Symbol("X")
    P = sympy.Poly(sympy.minimal_polynomial(expr, X), X)
    cs = [int(c) for c in P.all_coeffs()]
    with mpmath.workdps(40):
        roots = mpmath.polyroots(cs, maxsteps=200, extraprec=200)
        m = mpmath.log(abs(cs[0])) + sum(max(mpmath.log(abs(r)), 0) for r in roots)
    return float(m) / P.degree()


def line_pair_point_height(N, a, b):
    # 1 + x + y = 0 and 1 + z^a x + z^b y = 0 meet at x = (z^b - 1)/(z^a - z^b), y = -1 - x
    z = sympy.exp(2 * sympy.pi * sympy.I / N)
    x = sympy.nsimplify((z**b - 1) / (z**a - z**b))
    y = -1 - x
    return weil_height(sympy.expand_complex(x)) + weil_height(sympy.expand_complex(y))


def test_rational_point_heights():
    c = cycle_height_exact(poly("x - 2"), poly("y - 3"), I2)
    assert c.value == pytest.approx(math.log(6), abs=1e-12)
    assert c.degree == 1
    assert cycle_height_exact(poly("x - 1"), poly("y - 1"), I2).value == pytest.approx(0, abs=1e-12)
    # h(2/3) = log 3
    assert cycle_height_exact(poly("3*x - 2"), poly("y - 1"), I2).value == pytest.approx(math.log(3), abs=1e-12)


@pytest.mark.parametrize("N,a,b", [(5, 1, 2), (7, 1, 3)])
def test_twisted_line_pair_matches_minimal_polynomial_oracle(N, a, b):
    c = cycle_height_exact(LINE, LINE, TorsionPoint(N, [a, b]))
    assert c.degree == 1
    assert c.value == pytest.approx(line_pair_point_height(N, a, b), abs=1e-9)


def test_zeta5_regression(pilot):
    c = cycle_height_exact(LINE, LINE, TorsionPoint(5, [1, 2]))
    assert c.value == pytest.approx(pilot["cycle_height_regressions"]["1+x+y twisted by (zeta_5, zeta_5^2)"], abs=1e-12)
    # closed form: y is a root of unity and x = -(1 + zeta^-1), so h = log(golden ratio) / 2
    assert c.value == pytest.approx(math.log((1 + math.sqrt(5)) / 2) / 2, abs=1e-12)


def test_swap_and_monomial_invariance():
    t = TorsionPoint(11, [1, 4])
    g = poly("2 + x - 3*y")
    base = cycle_height_exact(LINE, g, (I2, t)).value
    assert cycle_height_exact(g, LINE, (t, I2)).value == pytest.approx(base, abs=1e-10)
    shifted = poly("2*x*y + x**2*y - 3*x*y**2")
    assert cycle_height_exact(LINE, shifted, (I2, t)).value == pytest.approx(base, abs=1e-10)
    assert cycle_height_exact(LINE, -1 * g, (I2, t)).value == pytest.approx(base, abs=1e-10)


def test_local_error_terms():
    t = TorsionPoint(7, [1, 3])
    lv = local_error_term(LINE, LINE, t, 7)
    # 1 - zeta_7 has valuation 1/6 and deg = 2: I = -2 * (1/6) log 7
    assert lv.coeff == Fraction(-1, 3)
    assert lv.value == pytest.approx(-math.log(7) / 3)
    assert local_error_term(LINE, LINE, t, 3).coeff == 0
    assert local_error_term(LINE, LINE, I2, 7).is_infinite()


def test_good_prime_report():
    assert good_prime_report(LINE, LINE, 7)["good"]
    rep = good_prime_report(poly("1 + 2*x + y"), LINE, 2)
    assert not rep["unit_coefficients"] and not rep["good"]


def test_tail_rows_are_nonpositive_in_value_group_and_bounded():
    seq = quasi_strict_sequence(orders=[7, 9, 15, 25], coprime_to="s-1")
    rows = adelic_tail(LINE, LINE, seq, prime_bound=30)
    for r in rows:
        assert r.ok
        assert all(isinstance(c, Fraction) and c <= 0 for c in r.terms.values())
        assert r.value == pytest.approx(sum(float(c) * math.log(p) for p, c in r.terms.items()), abs=1e-14)
    by_N = {r.N: r for r in rows}
    # prime powers meet the bound 2 log p / phi(p^r); 15 mixes two primes and gives 0
    assert by_N[7].value == pytest.approx(-2 * math.log(7) / 6, rel=1e-12)
    assert by_N[9].value == pytest.approx(-2 * math.log(3) / 6, rel=1e-12)
    assert by_N[25].value == pytest.approx(-2 * math.log(5) / 20, rel=1e-12)
    assert by_N[15].value == 0
    assert tail_bound(LINE, LINE, TorsionPoint(7, [1, 3]), [7]) == pytest.approx(2 * math.log(7) / 6)


def test_small_convergence_run_rows_and_csv(tmp_path):
    cfg = ExperimentConfig(LINE, LINE, first=11, last=31)
    rows, summary = convergence_experiment(cfg)
    assert [r.N for r in rows] == [11, 13, 17, 19, 23, 29, 31]
    assert all(r.status == "ok" and r.degree == summary["degree_prediction"] == 1 for r in rows)
    assert summary["rhs_error"] <= 0.01
    text = rows_to_csv(rows, tmp_path / "rows.csv")
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert (tmp_path / "rows.csv").read_text() == text


def test_constant_polynomial_rows_report_errors():
    cfg = ExperimentConfig(LINE, poly("5 + 0*x"), first=11, last=13)
    rows, summary = convergence_experiment(cfg)
    assert all(r.status.startswith("error") for r in rows)
    assert math.isnan(summary["tail_max_abs_dev"])


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(LINE, LINE, first=3, last=11)
    with pytest.raises(ValueError):
        ExperimentConfig(LINE, LINE, arch_options={"nodes": 0})


def test_mahler_measures_for_equidistribution():
    assert mahler_measure_poly(poly("x - 2", dim=1)).value == pytest.approx(math.log(2))
    assert mahler_measure_poly(LINE).value == pytest.approx(mahler_line_oracle(), abs=1e-5)


def test_equidistribution_rows_for_linear_polynomial():
    # average of log|zeta - 2| over primitive N-th roots is log(Phi_N(2)) / phi(N)
    rows = equidistribution_demo(poly("x - 2", dim=1), [5, 7, 11])
    for r in rows:
        phi = r.N - 1
        expected = math.log(int(sympy.cyclotomic_poly(r.N, 2))) / phi
        assert r.lhs == pytest.approx(expected, abs=1e-12)
        assert r.abs_dev == pytest.approx(abs(expected - math.log(2)), abs=1e-12)


def test_non_strict_pair_gives_cyclotomic_unit():
    # 1 + zeta + zeta^2 is a unit, so the orbit average is 0 instead of m(h)
    (row,) = equidistribution_demo(LINE, [503], {503: 2})
    assert row.lhs == pytest.approx(0, abs=1e-12)
    assert row.abs_dev == pytest.approx(mahler_line_oracle(), abs=1e-5)
