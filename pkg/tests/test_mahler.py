import math

import mpmath
import pytest

from toricheights.mahler import log_plus_sum, mahler_measure, roots_with_radii


def jensen_oracle(coeffs):
    """m(S) = (1/2 pi) int log|S(e^{i theta})| d theta at high precision."""
    with mpmath.workdps(30):
        def integrand(th):
            z = mpmath.expj(th)
            return mpmath.log(abs(mpmath.polyval(list(reversed(coeffs)), z)))
        return float(mpmath.quad(integrand, mpmath.linspace(0, 2 * mpmath.pi, 9)) / (2 * mpmath.pi))


@pytest.mark.parametrize("coeffs,expected", [
    ([-1, 2], math.log(2)),
    ([1, 1, 1], 0.0),
    ([1, -3, 1], math.log((3 + math.sqrt(5)) / 2)),
    ([0, 0, 6], math.log(6)),
    ([-1, 0, 1], 0.0),
])
def test_closed_forms(coeffs, expected):
    est = mahler_measure(coeffs)
    assert est.error <= 1e-9
    assert est.value == pytest.approx(expected, abs=1e-12)


def test_lehmer_polynomial():
    lehmer = [1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]
    assert mahler_measure(lehmer).value == pytest.approx(math.log(1.17628081825991750654), abs=1e-12)


@pytest.mark.parametrize("coeffs", [[3, -2, 5, 1], [2, 0, 0, -7, 1], [1, 4, 4]])
def test_matches_quadrature(coeffs):
    assert mahler_measure(coeffs).value == pytest.approx(jensen_oracle(coeffs), abs=1e-8)


def test_roots_have_certified_radii():
    roots, radii = roots_with_radii([1, 0, -2])  # high to low
    assert sorted(float(r.real) for r in map(complex, roots)) == pytest.approx([-math.sqrt(2), math.sqrt(2)])
    assert all(r < 1e-20 for r in radii)
    value, err = log_plus_sum(roots, radii)
    assert value == pytest.approx(math.log(2))
    assert err < 1e-15


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        mahler_measure([0, 0])
