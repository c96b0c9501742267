"""Mahler measures with certified root inclusion."""
from __future__ import annotations

from fractions import Fraction
import math

import mpmath
import sympy

from .concave import Estimate

__all__ = ["mahler_measure", "roots_with_radii", "log_plus_sum"]

_X = sympy.Symbol("x")


def _weierstrass_radii(coeffs_high, roots, ctx):
    """Inclusion radii ``d * |p(z_i) / (a_d prod_{j != i}(z_i - z_j))|``.

    Every connected union of k of these disks holds exactly k roots.
    """
    d = len(roots)
    a = coeffs_high[0]
    radii = []
    for i, z in enumerate(roots):
        val = ctx.polyval(coeffs_high, z)
        den = a
        for j, w in enumerate(roots):
            if j != i:
                den *= z - w
        radii.append(d * abs(val / den) if den != 0 else ctx.inf)
    return radii


def roots_with_radii(coeffs_high, dps=30):
    """Roots of an integer polynomial (high to low) with inclusion radii."""
    with mpmath.workdps(dps):
        cs = [mpmath.mpf(int(c)) for c in coeffs_high]
        roots = mpmath.polyroots(cs, maxsteps=200, extraprec=2 * dps + 10 * len(cs))
        radii = _weierstrass_radii(cs, roots, mpmath.mp)
    return roots, radii


def log_plus_sum(roots, radii):
    """``sum log+ |z|`` and a rigorous bound on its error given inclusion disks."""
    total, err = 0.0, 0.0
    for z, r in zip(roots, radii):
        a = float(abs(z))
        r = float(r)
        total += max(math.log(a), 0.0) if a > 0 else 0.0
        lo, hi = max(a - r, 0.0), a + r
        if hi <= 1.0:
            continue
        lp_hi = math.log(hi)
        lp_lo = math.log(lo) if lo > 1.0 else 0.0
        err += lp_hi - lp_lo
    return total, err


def mahler_measure(S, tol=1e-9):
    """Mahler measure of an integer polynomial with an error bound.

    Parameters
    ----------
    S : sequence of int
        Coefficients from low to high degree.
    tol : float
        Target bound; precision is raised until the inclusion disks certify it.

    Returns
    -------
    Estimate
        ``log|lead| + sum log+ |root|`` with a certified error.

    Examples
    --------
    >>> round(mahler_measure([-1, 2]).value, 12)
    0.693147180560
    """
    S = [int(c) for c in S]
    while S and S[-1] == 0:
        S.pop()
    if not S:
        raise ValueError("Mahler measure of the zero polynomial")
    lo = next(i for i, c in enumerate(S) if c)
    S = S[lo:]
    if len(S) == 1:
        return Estimate(math.log(abs(S[0])), 0.0)
    P = sympy.Poly(list(reversed(S)), _X, domain="ZZ")
    content, factors = P.sqf_list()
    value = math.log(abs(int(content)))
    error = 0.0
    for F, e in factors:
        cs = [int(c) for c in F.all_coeffs()]
        value += e * math.log(abs(cs[0]))
        if len(cs) == 2:
            value += e * max(math.log(abs(Fraction(cs[1], cs[0]))), 0.0)
            continue
        if _is_cyclotomic_product(F):
            continue
        dps = 30
        while True:
            roots, radii = roots_with_radii(cs, dps)
            s, err = log_plus_sum(roots, radii)
            if err <= tol / max(len(factors), 1) or dps > 400:
                break
            dps *= 2
        value += e * s
        error += e * err
    return Estimate(value, error)


def _is_cyclotomic_product(F):
    """Monic integer polynomial all of whose roots are roots of unity (Kronecker)."""
    cs = F.all_coeffs()
    if abs(cs[0]) != 1 or abs(cs[-1]) != 1 or F.degree() > 12:
        return False
    d = F.degree()
    # a root of unity of degree d has order N with phi(N) <= d, so N <= 2 d^2 + 2
    x = _X
    rem = F.monic()
    for N in range(1, 2 * d * d + 3):
        if rem.degree() == 0:
            return True
        C = sympy.Poly(sympy.cyclotomic_poly(N, x), x)
        if C.degree() > rem.degree():
            continue
        while True:
            q, r = sympy.div(rem, C)
            if not r.is_zero:
                break
            rem = q
            if rem.degree() == 0:
                return True
    return rem.degree() == 0
