"""Laurent polynomials over cyclotomic fields, torsion points and Galois orbits."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
import math

import numpy as np
import sympy

from .cyclotomic import Cyclotomic, units_mod
from .lattice_geometry import LatticePolytope

__all__ = [
    "LaurentPoly",
    "TorsionPoint",
    "GaloisOrbit",
    "twist",
    "upsilon_test",
    "quasi_strict_sequence",
    "spread_exponent",
]


def _clean(c):
    """Normalize a coefficient: rationals become int/Fraction, others stay Cyclotomic."""
    if isinstance(c, Cyclotomic):
        if c.is_rational():
            c = c.rational_value()
        else:
            return c
    if isinstance(c, bool):
        raise TypeError("bool coefficient")
    if isinstance(c, (sympy.Rational, sympy.Integer)):
        c = Fraction(int(c.p), int(c.q))
    if isinstance(c, str):
        c = Fraction(c)
    if isinstance(c, float):
        raise TypeError("float coefficients are not exact; pass a Fraction or string")
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def _is_zero(c):
    return c.is_zero() if isinstance(c, Cyclotomic) else c == 0


class LaurentPoly:
    """Finitely supported map from exponents in Z^n to Q(zeta_N).

    Parameters
    ----------
    terms : mapping or iterable of (exponent, coefficient)
        Coefficients may be int, Fraction, numeric strings or
        :class:`Cyclotomic`. Zero coefficients are dropped.
    dim : int, optional
        Ambient dimension; inferred from the exponents if omitted.
    """

    __slots__ = ("dim", "_terms", "__dict__")

    def __init__(self, terms, dim=None):
        items = terms.items() if isinstance(terms, dict) else terms
        acc = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            c = _clean(c)
            acc[e] = _clean(acc[e] + c) if e in acc else c
        acc = {e: c for e, c in acc.items() if not _is_zero(c)}
        if dim is None:
            if not acc:
                raise ValueError("dimension of the zero polynomial must be given")
            dim = len(next(iter(acc)))
        if any(len(e) != dim for e in acc):
            raise ValueError("exponents of mixed length")
        self.dim = dim
        self._terms = tuple(sorted(acc.items()))

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_string(cls, expr, variables=None, dim=None):
        """Parse a rational Laurent polynomial such as ``"1 + x + y"`` or ``"x - 2"``.

        Variables default to the names among x, y, z, w that occur, or to the
        first ``dim`` of them when ``dim`` is given.
        """
        if variables is None:
            variables = _var_names(dim) if dim else _default_vars(expr)
        syms = sympy.symbols(variables)
        syms = tuple(syms) if isinstance(syms, (list, tuple)) else (syms,)
        e = sympy.sympify(expr, locals={str(s): s for s in syms})
        num, den = sympy.fraction(sympy.together(sympy.expand(e)))
        P = sympy.Poly(sympy.expand(num), *syms)
        D = sympy.Poly(den, *syms)
        if len(D.terms()) != 1:
            raise ValueError("denominator must be a monomial")
        (dexp, dcoef), = D.terms()
        terms = {}
        for mon, coef in P.terms():
            terms[tuple(a - b for a, b in zip(mon, dexp))] = Fraction(int(coef.p), int(coef.q)) / Fraction(int(dcoef.p), int(dcoef.q))
        return cls(terms, len(syms))

    @classmethod
    def monomial(cls, m, c=1):
        return cls({tuple(m): c})

    @classmethod
    def constant(cls, c, dim):
        return cls({tuple([0] * dim): c}, dim)

    # -- accessors ----------------------------------------------------------
    @property
    def terms(self):
        """Sorted tuple of ``(exponent, coefficient)``."""
        return self._terms

    @cached_property
    def coeffs(self):
        return dict(self._terms)

    def coefficient(self, m):
        return self.coeffs.get(tuple(m), 0)

    @property
    def support(self):
        return tuple(e for e, _ in self._terms)

    def is_zero(self):
        return not self._terms

    def is_monomial(self):
        return len(self._terms) == 1

    def is_constant(self):
        return len(self._terms) == 1 and not any(self._terms[0][0])

    @cached_property
    def newton_polytope(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no Newton polytope")
        return LatticePolytope(self.support)

    @cached_property
    def conductor(self):
        """Least common conductor of the cyclotomic coefficients (1 if rational)."""
        N = 1
        for _, c in self._terms:
            if isinstance(c, Cyclotomic):
                N = math.lcm(N, c.N)
        return N

    def is_rational(self):
        return self.conductor == 1

    def rational_coefficients(self):
        """Coefficients as Fractions (rational polynomials only)."""
        if not self.is_rational():
            raise ValueError("polynomial has non-rational coefficients")
        return [Fraction(c) for _, c in self._terms]

    def complex_terms(self):
        """Exponents (K, n) int array and complex coefficients (K,)."""
        E = np.array([e for e, _ in self._terms], dtype=int).reshape(-1, self.dim)
        C = np.array([complex(c) if isinstance(c, Cyclotomic) else complex(float(c)) for _, c in self._terms])
        return E, C

    def evaluate(self, point):
        """Evaluate at complex points of shape (..., n)."""
        E, C = self.complex_terms()
        z = np.asarray(point, dtype=complex)
        if z.shape[-1] != self.dim:
            raise ValueError("dimension mismatch")
        logs = np.log(z)
        return np.exp(logs @ E.T.astype(float)) @ C

    def galois(self, u):
        return LaurentPoly(
            {e: c.galois(u % c.N) if isinstance(c, Cyclotomic) else c for e, c in self._terms}, self.dim
        )

    def integer_scale(self):
        """Positive integer D making every coefficient integral."""
        D = 1
        for _, c in self._terms:
            den = c.denominator() if isinstance(c, Cyclotomic) else Fraction(c).denominator
            D = math.lcm(D, den)
        return D

    def prime_support(self):
        """Primes dividing some numerator or denominator of a rational coefficient."""
        ps = set()
        for _, c in self._terms:
            if isinstance(c, Cyclotomic):
                sr = c.as_scaled_root_of_unity()
                if sr is None:
                    raise ValueError("coefficient is not a rational multiple of a root of unity")
                c = sr[0]
            c = Fraction(c)
            for v in (c.numerator, c.denominator):
                ps.update(sympy.primefactors(abs(v)))
        return sorted(ps)

    # -- algebra ------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.dim)
        _same_dim(self, other)
        return LaurentPoly(list(self._terms) + list(other._terms), self.dim)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._terms}, self.dim)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            c = _clean(other) if not isinstance(other, Cyclotomic) else other
            return LaurentPoly({e: v * c for e, v in self._terms}, self.dim)
        _same_dim(self, other)
        out = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return LaurentPoly(out, self.dim)

    __rmul__ = __mul__

    def times_monomial(self, m, c=1):
        return LaurentPoly({tuple(a + b for a, b in zip(e, m)): v * c for e, v in self._terms}, self.dim)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.dim != other.dim or self.support != other.support:
            return False
        return all(a == b for (_, a), (_, b) in zip(self._terms, other._terms))

    def __hash__(self):
        return hash((self.dim, self.support))

    def __repr__(self):
        names = _var_names(self.dim)
        parts = []
        for e, c in self._terms:
            mon = "*".join(f"{v}^{k}" if k != 1 else v for v, k in zip(names, e) if k)
            parts.append(f"({c})" + (f"*{mon}" if mon else ""))
        return "LaurentPoly(" + (" + ".join(parts) or "0") + ")"

    # -- serialization ------------------------------------------------------
    def to_json(self):
        out = []
        for e, c in self._terms:
            if isinstance(c, Cyclotomic):
                for k, v in enumerate(c.c):
                    if v:
                        v = Fraction(v)
                        out.append({"exp": list(e), "num": v.numerator, "den": v.denominator, "zeta_pow": k, "zeta_order": c.N})
            else:
                v = Fraction(c)
                out.append({"exp": list(e), "num": v.numerator, "den": v.denominator})
        return {"dim": self.dim, "terms": out}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            return cls.from_string(data)
        if "expr" in data:
            return cls.from_string(data["expr"], data.get("vars"), data.get("dim"))
        dim = int(data["dim"])
        acc = []
        for t in data["terms"]:
            q = Fraction(int(t["num"]), int(t.get("den", 1)))
            if "zeta_pow" in t:
                N = int(t.get("zeta_order", 0))
                if N <= 0:
                    raise ValueError("terms with zeta_pow need zeta_order")
                acc.append((tuple(t["exp"]), Cyclotomic.from_powers(N, {int(t["zeta_pow"]): q})))
            else:
                acc.append((tuple(t["exp"]), q))
        if not acc:
            return cls({}, dim)
        return cls(_merge(acc), dim)


def _merge(items):
    out = {}
    for e, c in items:
        out[e] = out[e] + c if e in out else c
    return out


def _same_dim(a, b):
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")


def _var_names(n):
    return ["x", "y", "z", "w"][:n] if n <= 4 else [f"x{i}" for i in range(1, n + 1)]


def _default_vars(expr):
    names = [v for v in ("x", "y", "z", "w") if v in expr]
    return names or ["x"]


# ---------------------------------------------------------------------------
# torsion points
# ---------------------------------------------------------------------------
class TorsionPoint:
    """``(zeta_N^a_1, ..., zeta_N^a_n)`` with N the exact order.

    Parameters
    ----------
    order : int
    exps : sequence of int
        Exponents; the pair is normalized so ``gcd(order, *exps) == 1``.
    """

    __slots__ = ("order", "exps")

    def __init__(self, order, exps):
        order = int(order)
        if order < 1:
            raise ValueError("order must be positive")
        exps = [int(a) % order for a in exps]
        g = math.gcd(order, *exps)
        self.order = order // g
        self.exps = tuple((a // g) % self.order for a in exps)

    @classmethod
    def identity(cls, n):
        return cls(1, [0] * n)

    @property
    def dim(self):
        return len(self.exps)

    def is_identity(self):
        return self.order == 1

    def chi(self, m):
        """Exponent k with ``chi^m(self) = zeta_N^k``."""
        return sum(a * b for a, b in zip(self.exps, m)) % self.order

    def chi_value(self, m):
        return Cyclotomic.zeta(self.order, self.chi(m))

    def coords(self):
        return np.exp(2j * np.pi * np.asarray(self.exps) / self.order)

    def __mul__(self, other):
        N = math.lcm(self.order, other.order)
        a = [x * (N // self.order) + y * (N // other.order) for x, y in zip(self.exps, other.exps)]
        return TorsionPoint(N, a)

    def inverse(self):
        return TorsionPoint(self.order, [-a for a in self.exps])

    def power(self, u):
        return TorsionPoint(self.order, [u * a for a in self.exps])

    def galois_orbit(self):
        return GaloisOrbit(self, units_mod(self.order))

    def __eq__(self, other):
        return isinstance(other, TorsionPoint) and (self.order, self.exps) == (other.order, other.exps)

    def __hash__(self):
        return hash((self.order, self.exps))

    def __repr__(self):
        return f"TorsionPoint(order={self.order}, exps={self.exps})"

    def to_json(self):
        return {"order": self.order, "exps": list(self.exps)}

    @classmethod
    def from_json(cls, data):
        return cls(data["order"], data["exps"])


@dataclass(frozen=True)
class GaloisOrbit:
    """Orbit ``{base^u : u in units}`` of a torsion point over Q."""

    base: TorsionPoint
    units: tuple

    def __len__(self):
        return len(self.units)

    def __iter__(self):
        return (self.base.power(u) for u in self.units)


def twist(f, t):
    """``t * f = sum_m alpha_m chi^m(t) chi^m``."""
    if t.dim != f.dim:
        raise ValueError("dimension mismatch")
    if t.is_identity():
        return f
    return LaurentPoly({e: _times_zeta(c, t.order, t.chi(e)) for e, c in f.terms}, f.dim)


def _times_zeta(c, N, k):
    if k == 0:
        return c
    z = Cyclotomic.zeta(N, k)
    return z * c if not isinstance(c, Cyclotomic) else c * z


def _pair(t, n):
    if isinstance(t, TorsionPoint):
        return TorsionPoint.identity(n), t
    t1, t2 = t
    return t1, t2


def upsilon_test(f, g, t):
    """True iff ``t1 * f`` and ``t2 * g`` agree up to a monomial factor.

    Parameters
    ----------
    f, g : LaurentPoly
    t : TorsionPoint or pair of TorsionPoint
        A single point twists g only.
    """
    t1, t2 = _pair(t, f.dim)
    F, G = twist(f, t1), twist(g, t2)
    if F.is_zero() or G.is_zero() or len(F.terms) != len(G.terms):
        return False
    m0 = tuple(a - b for a, b in zip(G.support[0], F.support[0]))
    if any(tuple(a + b for a, b in zip(e, m0)) != e2 for e, e2 in zip(F.support, G.support)):
        return False
    (_, f0), (_, g0) = F.terms[0], G.terms[0]
    return all(cg * f0 == cf * g0 for (_, cf), (_, cg) in zip(F.terms, G.terms))


# ---------------------------------------------------------------------------
# torsion sequences
# ---------------------------------------------------------------------------
def _shortest_vector_sq(N, s):
    """Squared length of the shortest nonzero vector of {(a, b): a + b s = 0 mod N}."""
    u, v = (N, 0), (-s, 1)
    def n2(w):
        return w[0] * w[0] + w[1] * w[1]
    if n2(u) < n2(v):
        u, v = v, u
    while True:
        # v is the shorter one; reduce u against v
        k = round((u[0] * v[0] + u[1] * v[1]) / n2(v))
        u = (u[0] - k * v[0], u[1] - k * v[1])
        if n2(u) >= n2(v):
            return n2(v)
        u, v = v, u


def spread_exponent(N, coprime_to=None):
    """Exponent s maximizing the shortest character vector killing (zeta_N, zeta_N^s).

    Only s with ``gcd(s, N) = 1`` and ``s`` not congruent to 0 or +-1 are
    considered; ties go to the smallest s. ``coprime_to`` adds the extra
    condition ``gcd(s - 1, N) = 1``.
    """
    best, best_s = -1, None
    for s in range(2, N - 1):
        if math.gcd(s, N) != 1:
            continue
        if coprime_to == "s-1" and math.gcd(s - 1, N) != 1:
            continue
        v = _shortest_vector_sq(N, s)
        if v > best:
            best, best_s = v, s
    if best_s is None:
        raise ValueError(f"no admissible exponent for N = {N}")
    return best_s


def quasi_strict_sequence(kind="spread", length=None, first=5, last=None, seed=0, orders=None, coprime_to=None):
    """Torsion pairs ``(identity, (zeta_N, zeta_N^s))`` for increasing N.

    Parameters
    ----------
    kind : {"spread", "random"}
        How s is chosen: ``"spread"`` is deterministic (see
        :func:`spread_exponent`), ``"random"`` draws s from ``seed``.
    length : int, optional
        Number of terms (primes from ``first`` on).
    first, last : int
        Prime range, used when ``orders`` is not given.
    orders : sequence of int, optional
        Explicit strictly increasing orders (composites allowed).
    coprime_to : {None, "s-1"}
        Forwarded to :func:`spread_exponent` (``"spread"`` only).
    """
    if orders is None:
        if length is None and last is None:
            raise ValueError("give length, last or orders")
        orders = []
        p = sympy.nextprime(first - 1)
        while (length is None or len(orders) < length) and (last is None or p <= last):
            orders.append(int(p))
            p = sympy.nextprime(p)
    orders = [int(N) for N in orders]
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise ValueError("orders must increase strictly")
    rng = np.random.default_rng(seed)
    out = []
    for N in orders:
        if N < 5:
            raise ValueError("orders below 5 admit no exponent outside {0, 1, -1}")
        if kind == "spread":
            s = spread_exponent(N, coprime_to)
        elif kind == "random":
            choices = [s for s in range(2, N - 1) if math.gcd(s, N) == 1]
            s = int(rng.choice(choices))
        else:
            raise ValueError(f"unknown kind {kind!r}")
        out.append((TorsionPoint.identity(2), TorsionPoint(N, (1, s))))
    return out
