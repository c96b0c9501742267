import json
from pathlib import Path

import mpmath
import pytest

from toricheights.laurent import LaurentPoly

FIXTURES = Path(__file__).parent / "fixtures"


def poly(expr, dim=2):
    return LaurentPoly.from_string(expr, dim=dim)


@pytest.fixture(scope="session")
def pilot():
    return json.loads((FIXTURES / "pilot_thresholds.json").read_text())


def mahler_line_oracle():
    """m(1 + x + y) = (3 sqrt 3 / 4 pi) L(chi_{-3}, 2) through Hurwitz zeta values."""
    with mpmath.workdps(30):
        L = (mpmath.zeta(2, mpmath.mpf(1) / 3) - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
        return float(3 * mpmath.sqrt(3) / (4 * mpmath.pi) * L)


def limit_height_line_oracle():
    """Torus average of the height of the point where 1+x+y and 1+t1 x+t2 y meet.

    With chords 2|sin(u/2)| for independent uniform angles the average is
    ``2 E[log+(a / b)]`` for i.i.d. arcsine a, b, which reduces to
    ``(8 / pi^2) int_0^{pi/2} (x log sin x + x log 2 + Cl_2(2x) / 2) dx``.
    """
    with mpmath.workdps(25):
        def inner(x):
            return x * mpmath.log(mpmath.sin(x)) + x * mpmath.log(2) + mpmath.clsin(2, 2 * x) / 2
        return float(8 / mpmath.pi**2 * mpmath.quad(inner, [0, mpmath.pi / 4, mpmath.pi / 2]))


def random_pa(rng, n, max_points=5, full=True, span=2):
    """Exact lifted PA function on a random lattice polytope in [-span, span]^n."""
    from fractions import Fraction

    from toricheights.concave import PAConcave

    while True:
        k = int(rng.integers(n + 1, max_points + 1))
        pts = {tuple(int(v) for v in rng.integers(-span, span + 1, size=n)) for _ in range(k)}
        vals = [Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 4))) for _ in pts]
        f = PAConcave.lifted(sorted(pts), vals)
        if not full or f.domain.affine_dim == n:
            return f
