"""Resultant elimination for bivariate Laurent systems over Q(zeta_N).

The Sylvester determinant is computed once over Z[x, T1, T2, t], where T1, T2
stand for a generic twist of the second polynomial and t for the root of
unity generating coefficient fields. Specializing T1, T2, t to exact roots of
unity is then a cheap reduction into Q(zeta_L), and it commutes with taking
the determinant because the formal degrees are kept fixed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import math

import numpy as np
import sympy

from .cyclotomic import (
    Cyclotomic,
    crt_combine,
    crt_primes,
    totient,
    units_mod,
)
from .laurent import TorsionPoint, upsilon_test

__all__ = [
    "ImproperIntersection",
    "EliminationResult",
    "resultant_eliminate",
    "twisted_resultant",
    "galois_norm_poly",
    "norm_poly_with_conjugates",
]

_X, _Y, _T1, _T2, _T = sympy.symbols("x y T1 T2 t")
_GENS = (_X, _Y, _T1, _T2, _T)


class ImproperIntersection(ValueError):
    """The two curves share a component (or a polynomial is constant)."""


@dataclass(frozen=True)
class EliminationResult:
    """Univariate resultant in the surviving variable.

    Attributes
    ----------
    axis : str
        Eliminated variable (``"y"`` leaves a polynomial in x).
    coeffs : tuple
        Coefficients, low to high, of the resultant of the shifted polynomials.
    low_order : int
        Multiplicity of the root at 0 (a toric boundary artifact).
    degree : int
        Actual degree.
    formal_degree : int
        Degree predicted by the Sylvester matrix shape; the gap is the
        leading-coefficient drop (roots escaping to infinity).
    boundary_conflict : bool
        True when both curves meet the same boundary fibre (``y = 0`` or
        ``y = infinity`` over some nonzero x), which would mix boundary
        multiplicity into the torus part.
    conductor : int
    """

    axis: str
    coeffs: tuple
    low_order: int
    degree: int
    formal_degree: int
    boundary_conflict: bool
    conductor: int
    log: tuple = field(default=())

    @property
    def torus(self):
        """Coefficients of the torus part (boundary roots at 0 stripped)."""
        return self.coeffs[self.low_order : self.degree + 1]

    @property
    def torus_degree(self):
        return self.degree - self.low_order


def _is_zero(c):
    return c.is_zero() if isinstance(c, Cyclotomic) else c == 0


def _shift(f):
    lo = [min(e[k] for e in f.support) for k in range(f.dim)]
    return tuple(lo), {tuple(a - b for a, b in zip(e, lo)): c for e, c in f.terms}


def _coefficient_expr(c, D):
    """Integer polynomial in t for ``D * c``, plus the conductor of c."""
    if isinstance(c, Cyclotomic):
        terms = 0
        for k, v in enumerate(c.c):
            if v:
                v = Fraction(v) * D
                if v.denominator != 1:
                    raise ArithmeticError("scaling did not clear denominators")
                terms += int(v) * _T**k
        return terms, c.N
    v = Fraction(c) * D
    return int(v), 1


def _to_poly(f, generic_twist):
    """Shift and scale f into Z[x, y, T1, T2, t]."""
    shift, terms = _shift(f)
    D = f.integer_scale()
    expr = 0
    M = 1
    for (i, j), c in terms.items():
        ce, N = _coefficient_expr(c, D)
        M = math.lcm(M, N)
        mono = _X**i * _Y**j
        if generic_twist:
            mono *= _T1**i * _T2**j
        expr += ce * mono
    return sympy.Poly(expr, *_GENS, domain="ZZ"), shift, D, M


def _bareiss(mat):
    """Fraction-free determinant over a polynomial ring (sympy Polys)."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return None
    zero = a[0][0] * 0
    sign = 1
    prev = None
    for k in range(n - 1):
        if a[k][k].is_zero:
            for i in range(k + 1, n):
                if not a[i][k].is_zero:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return zero
        akk = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                v = a[i][j] * akk - a[i][k] * a[k][j]
                a[i][j] = v if prev is None else v.exquo(prev)
        prev = akk
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def _sylvester(F, G, var):
    """Sylvester matrix of F and G in ``var`` with Poly entries."""
    k = _GENS.index(var)
    others = [g for g in _GENS if g != var]
    def coeff_list(P):
        d = P.degree(var)
        cs = [sympy.Poly(0, *others, domain="ZZ") for _ in range(d + 1)]
        for mon, c in P.terms():
            rest = mon[:k] + mon[k + 1 :]
            cs[mon[k]] += sympy.Poly.from_dict({rest: c}, *others, domain="ZZ")
        return cs[::-1]  # high to low
    a, b = coeff_list(F), coeff_list(G)
    m, n = len(a) - 1, len(b) - 1
    zero = sympy.Poly(0, *others, domain="ZZ")
    rows = []
    for i in range(n):
        rows.append([zero] * i + a + [zero] * (n - 1 - i))
    for i in range(m):
        rows.append([zero] * i + b + [zero] * (m - 1 - i))
    return rows, m, n


@lru_cache(maxsize=256)
def _generic_resultant(fkey, gkey, axis, generic_twist):
    f, g = _KEYS[fkey], _KEYS[gkey]
    F, fshift, _, Mf = _to_poly(f, False)
    G, gshift, _, Mg = _to_poly(g, generic_twist)
    var = _Y if axis == "y" else _X
    if F.degree(var) == 0 or G.degree(var) == 0:
        # resultant with a polynomial free of var is a power of it
        rows = None
        if F.degree(var) == 0 and G.degree(var) == 0:
            return None, (F, G, fshift, gshift, math.lcm(Mf, Mg))
        P, d = (F, G.degree(var)) if F.degree(var) == 0 else (G, F.degree(var))
        return _drop(P ** d, var), (F, G, fshift, gshift, math.lcm(Mf, Mg))
    rows, _, _ = _sylvester(F, G, var)
    det = _bareiss(rows)
    return det, (F, G, fshift, gshift, math.lcm(Mf, Mg))


def _drop(P, var):
    others = [g for g in _GENS if g != var]
    k = _GENS.index(var)
    return sympy.Poly.from_dict({m[:k] + m[k + 1 :]: c for m, c in P.terms()}, *others, domain="ZZ")


_KEYS = {}


def _key(f):
    k = (f.dim, tuple((e, repr(c)) for e, c in f.terms))
    _KEYS[k] = f
    return k


def _specialize(R, a, b, N, M):
    """Coefficients (low to high, in the surviving variable) at T = zeta_N^(a, b), t = zeta_M."""
    L = math.lcm(N, M)
    powers = {}
    for (k, i, j, l), c in R.terms():
        e = ((a * i + b * j) * (L // N) + l * (L // M)) % L
        d = powers.setdefault(k, {})
        d[e] = d.get(e, 0) + int(c)
    deg = max(powers) if powers else -1
    out = []
    for k in range(deg + 1):
        val = Cyclotomic.from_powers(L, powers.get(k, {}))
        out.append(val.rational_value() if val.is_rational() else val)
    return out, L


def _specialize_poly2(P, a, b, N, M, drop_var):
    """Bivariate coefficient dict of P(x, y, T, t) at the twist, over Q(zeta_L)."""
    L = math.lcm(N, M)
    acc = {}
    for (i, j, p, q, l), c in P.terms():
        e = ((a * p + b * q) * (L // N) + l * (L // M)) % L
        d = acc.setdefault((i, j), {})
        d[e] = d.get(e, 0) + int(c)
    out = {}
    for key, d in acc.items():
        v = Cyclotomic.from_powers(L, d)
        if not v.is_zero():
            out[key] = v
    return out


def _field_det(mat):
    n = len(mat)
    a = [list(r) for r in mat]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if not _is_zero(a[i][c])), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c]
        inv = 1 / a[c][c] if not isinstance(a[c][c], Cyclotomic) else a[c][c].inverse()
        for i in range(c + 1, n):
            if not _is_zero(a[i][c]):
                fct = a[i][c] * inv
                a[i] = [x - fct * y for x, y in zip(a[i], a[c])]
    return det


def _univariate_resultant(p, q):
    """Resultant of two univariate coefficient lists (low to high) over the field."""
    m, n = len(p) - 1, len(q) - 1
    a, b = p[::-1], q[::-1]
    rows = []
    for i in range(n):
        rows.append([0] * i + list(a) + [0] * (n - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(b) + [0] * (m - 1 - i))
    return _field_det(rows)


def _strip(coeffs):
    """Drop low zero coefficients and high zero coefficients."""
    lo = next((i for i, c in enumerate(coeffs) if not _is_zero(c)), None)
    if lo is None:
        return []
    hi = max(i for i, c in enumerate(coeffs) if not _is_zero(c))
    return coeffs[lo : hi + 1]


def _share_nonzero_root(p, q):
    p, q = _strip(p), _strip(q)
    if len(p) <= 1 or len(q) <= 1:
        return False
    return _is_zero(_univariate_resultant(p, q))


def _boundary_conflict(Fd, Gd, axis):
    """Both curves through the same point of the boundary fibres of the eliminated variable."""
    k = 1 if axis == "y" else 0
    def edge(d, which):
        idx = [e[k] for e in d]
        level = min(idx) if which == "lo" else max(idx)
        deg = max(e[1 - k] for e in d)
        out = [0] * (deg + 1)
        for e, c in d.items():
            if e[k] == level:
                out[e[1 - k]] = c
        return out
    return _share_nonzero_root(edge(Fd, "lo"), edge(Gd, "lo")) or _share_nonzero_root(
        edge(Fd, "hi"), edge(Gd, "hi")
    )


def _eliminate(f, g, t, axis):
    if f.dim != 2 or g.dim != 2:
        raise ValueError("elimination is implemented for n = 2")
    if axis not in ("x", "y"):
        raise ValueError("axis must be 'x' or 'y'")
    if f.is_zero() or g.is_zero():
        raise ImproperIntersection("zero polynomial")
    generic = t is not None and not t.is_identity()
    R, (F, G, fshift, gshift, M) = _generic_resultant(_key(f), _key(g), axis, generic)
    N = t.order if generic else 1
    a, b = (t.exps if generic else (0, 0))
    var = _Y if axis == "y" else _X
    formal = F.degree(var) * _degree_other(G, axis) + G.degree(var) * _degree_other(F, axis)
    if R is None:
        raise ImproperIntersection("both polynomials are free of the eliminated variable")
    coeffs, L = _specialize(R, a, b, N, M)
    if generic:
        # twist used shifted exponents: multiply by chi^{gshift}(t)^{deg_var F}
        k = (a * gshift[0] + b * gshift[1]) % N * F.degree(var)
        if k % N:
            z = Cyclotomic.zeta(N, k)
            coeffs = [c * z if not _is_zero(c) else c for c in coeffs]
            coeffs = [c.rational_value() if isinstance(c, Cyclotomic) and c.is_rational() else c for c in coeffs]
    nz = [i for i, c in enumerate(coeffs) if not _is_zero(c)]
    if not nz:
        raise ImproperIntersection("resultant vanishes identically")
    Fd = _specialize_poly2(F, 0, 0, 1, M, var)
    Gd = _specialize_poly2(G, a, b, N, M, var)
    conflict = _boundary_conflict(Fd, Gd, axis)
    log = []
    if nz[0]:
        log.append(f"stripped boundary factor of order {nz[0]} at 0")
    if nz[-1] < formal:
        log.append(f"leading-coefficient drop {formal - nz[-1]}")
    if conflict:
        log.append("curves meet a common boundary point")
    return EliminationResult(
        axis=axis,
        coeffs=tuple(coeffs[: nz[-1] + 1]),
        low_order=nz[0],
        degree=nz[-1],
        formal_degree=formal,
        boundary_conflict=conflict,
        conductor=L,
        log=tuple(log),
    )


def _degree_other(P, axis):
    return P.degree(_X if axis == "y" else _Y)


def resultant_eliminate(f, g, axis="y"):
    """``Res_axis(f, g)`` for bivariate Laurent polynomials over Q(zeta_N).

    Both polynomials are first multiplied by monomials to become polynomials
    with nonnegative exponents. The returned coefficients are those of the
    resultant of these shifted polynomials.

    Raises
    ------
    ImproperIntersection
        If f and g agree up to a monomial factor, or the resultant vanishes.
    """
    if upsilon_test(f, g, TorsionPoint.identity(2)):
        raise ImproperIntersection("polynomials agree up to a monomial factor")
    return _eliminate(f, g, None, axis)


def twisted_resultant(f, g, t, axis="y"):
    """``Res_axis(f, t * g)`` through the cached generic-twist determinant."""
    if upsilon_test(f, g, t):
        raise ImproperIntersection("twisted polynomials agree up to a monomial factor")
    return _eliminate(f, g, t, axis)


# ---------------------------------------------------------------------------
# norms of univariate polynomials over Q(zeta_L)
# ---------------------------------------------------------------------------
def _integral_vectors(coeffs):
    """Common conductor, scaling D and integer power-basis vectors of D * coeffs."""
    L = 1
    for c in coeffs:
        if isinstance(c, Cyclotomic):
            L = math.lcm(L, c.N)
    lifted = [c.lift(L) if isinstance(c, Cyclotomic) else Cyclotomic(L, [c]) for c in coeffs]
    D = math.lcm(*(c.denominator() for c in lifted))
    vecs = [[int(Fraction(v) * D) for v in c.c] for c in lifted]
    return L, D, vecs, lifted


def galois_norm_poly(coeffs):
    """Primitive integer polynomial ``prim(prod_u sigma_u R)`` (low to high).

    Computed exactly by evaluating at elements of order L modulo primes
    ``q = 1 mod L`` and recombining with the CRT. The number of primes follows
    from the bound ``prod_u ||sigma_u R||_1`` on the coefficients.
    """
    coeffs = list(coeffs)
    while coeffs and _is_zero(coeffs[-1]):
        coeffs.pop()
    if not coeffs:
        raise ValueError("zero polynomial")
    L, D, vecs, lifted = _integral_vectors(coeffs)
    units = units_mod(L)
    if L <= 2:
        ints = [v[0] for v in vecs]
        return _primitive(ints)
    # coefficient bound from the complex conjugates
    bits = 0.0
    for u in units:
        s = sum(abs(_complex_galois(vec, L, u)) for vec in vecs)
        bits += math.log2(max(s, 1e-300))
    bits = max(bits, 0.0) + 16
    phi = totient(L)
    residues, moduli = [], []
    for q, gq in crt_primes(L, bits):
        Vq = np.array([[int(x) % q for x in row] for row in vecs], dtype=np.int64)
        acc = np.array([1], dtype=np.int64)
        table = np.empty(L, dtype=np.int64)
        table[0] = 1
        for k in range(1, L):
            table[k] = table[k - 1] * gq % q
        jj = np.arange(phi)
        for u in units:
            pw = table[(u * jj) % L]
            vals = (Vq * pw[None, :]) % q
            vals = vals.sum(axis=1) % q
            acc = np.convolve(acc, vals) % q
        residues.append([int(x) for x in acc])
        moduli.append(q)
    ints = crt_combine(residues, moduli)
    return _primitive(ints)


def _complex_galois(vec, L, u):
    z = np.exp(2j * np.pi * u * np.arange(len(vec)) / L)
    return complex(np.dot(np.asarray(vec, dtype=float), z))


def _primitive(ints):
    g = 0
    for v in ints:
        g = math.gcd(g, int(v))
    ints = [int(v) // g for v in ints]
    while ints and ints[-1] == 0:
        ints.pop()
    if ints and ints[-1] < 0:
        ints = [-v for v in ints]
    return ints


def norm_poly_with_conjugates(coeffs):
    """``(S, conjugates)``: the primitive norm polynomial and the complex
    coefficient vectors of every Galois conjugate of the input (low to high)."""
    S = galois_norm_poly(coeffs)
    L, D, vecs, lifted = _integral_vectors(list(coeffs))
    conj = []
    for u in units_mod(L):
        conj.append(np.array([_complex_galois(v, L, u) / D for v in vecs]))
    return S, conj
