"""Exact arithmetic in cyclotomic fields Q(zeta_N).

Elements are dense rational vectors of length phi(N) in the power basis
``1, zeta, ..., zeta^(phi(N)-1)``, always reduced modulo Phi_N. The fixed
complex embedding sends zeta_N to exp(2 pi i / N).
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
import cmath
import math

import numpy as np
import sympy

__all__ = [
    "cyclotomic_polynomial",
    "totient",
    "Cyclotomic",
    "units_mod",
    "norm_integer",
]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N):
    """Integer coefficients (low to high) of Phi_N by the divisor recursion.

    >>> cyclotomic_polynomial(6)
    (1, -1, 1)
    """
    if N < 1:
        raise ValueError("N must be positive")
    num = [-1] + [0] * (N - 1) + [1]  # x^N - 1
    for d in range(1, N):
        if N % d == 0:
            num = _exact_divide(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _exact_divide(a, b):
    """Quotient of integer polynomials (low to high), b monic up to sign."""
    a = list(a)
    q = [0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(q) - 1, -1, -1):
        c = a[i + len(b) - 1]
        if c % lead:
            raise ArithmeticError("inexact division")
        c //= lead
        q[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    if any(a[: len(b) - 1]):
        raise ArithmeticError("nonzero remainder")
    return q


@lru_cache(maxsize=None)
def totient(N):
    return int(sympy.totient(N))


@lru_cache(maxsize=None)
def units_mod(N):
    """Sorted units of Z/N (the Galois group of Q(zeta_N))."""
    return tuple(u for u in range(1, max(N, 2)) if math.gcd(u, N) == 1)


@lru_cache(maxsize=None)
def _power_table(N):
    """Reduced coordinates of zeta^k for k = 0..N-1, as an int matrix (N, phi)."""
    phi = totient(N)
    Phi = cyclotomic_polynomial(N)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(N):
        rows.append(tuple(cur))
        # multiply by zeta and reduce
        nxt = [0] + cur[:-1]
        top = cur[-1]
        if top:
            for j in range(phi):
                nxt[j] -= top * Phi[j]
        cur = nxt
    return np.array(rows, dtype=object)


def _reduce(coeffs, N):
    """Reduce a dense rational vector of any length modulo Phi_N."""
    phi = totient(N)
    Phi = cyclotomic_polynomial(N)
    c = list(coeffs)
    for i in range(len(c) - 1, phi - 1, -1):
        t = c[i]
        if t:
            off = i - phi
            for j in range(phi):
                c[off + j] -= t * Phi[j]
        c[i] = 0
    c = c[:phi] + [0] * max(0, phi - len(c))
    return tuple(_norm(v) for v in c)


def _norm(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


class Cyclotomic:
    """Element of Q(zeta_N) in the reduced power basis.

    Parameters
    ----------
    N : int
        Conductor of the ambient field (not necessarily minimal).
    coeffs : sequence of int or Fraction
        Power-basis coordinates; reduced on construction.
    """

    __slots__ = ("N", "c")

    def __init__(self, N, coeffs):
        self.N = int(N)
        self.c = _reduce([_coerce(v) for v in coeffs], self.N)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zeta(cls, N, k=1):
        """zeta_N^k."""
        obj = cls.__new__(cls)
        obj.N = N
        obj.c = tuple(_norm(v) for v in _power_table(N)[k % N])
        return obj

    @classmethod
    def rational(cls, q, N=1):
        return cls(N, [q])

    @classmethod
    def from_powers(cls, N, powers):
        """Sum of ``coeff * zeta_N^k`` for ``{k: coeff}``."""
        phi = totient(N)
        table = _power_table(N)
        acc = [0] * phi
        for k, v in powers.items():
            v = _coerce(v)
            if v == 0:
                continue
            row = table[k % N]
            for j in range(phi):
                if row[j]:
                    acc[j] += v * row[j]
        obj = cls.__new__(cls)
        obj.N = N
        obj.c = tuple(_norm(v) for v in acc)
        return obj

    # -- predicates ---------------------------------------------------------
    def is_zero(self):
        return not any(self.c)

    def is_rational(self):
        return not any(self.c[1:])

    def rational_value(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return Fraction(self.c[0])

    def as_scaled_root_of_unity(self):
        """Return ``(q, k)`` with ``self == q * zeta_N^k`` and q rational, else None."""
        if self.is_zero():
            return None
        table = _power_table(self.N)
        piv = next(j for j, v in enumerate(self.c) if v)
        for k in range(self.N):
            row = table[k]
            if row[piv] == 0:
                continue
            q = Fraction(self.c[piv]) / row[piv]
            if all(Fraction(a) == q * b for a, b in zip(self.c, row)):
                return q, k
        return None

    # -- conversion -----------------------------------------------------------
    def lift(self, M):
        """Same element expressed in Q(zeta_M) for a multiple M of N."""
        if M == self.N:
            return self
        if M % self.N:
            raise ValueError(f"{M} is not a multiple of {self.N}")
        step = M // self.N
        return Cyclotomic.from_powers(M, {j * step: v for j, v in enumerate(self.c) if v})

    def to_complex(self):
        z = cmath.exp(2j * math.pi / self.N)
        return complex(sum(complex(float(v)) * z**j for j, v in enumerate(self.c) if v))

    __complex__ = to_complex

    def galois(self, u):
        """Image under sigma_u: zeta -> zeta^u (u a unit mod N)."""
        if math.gcd(u, self.N) != 1:
            raise ValueError("u must be a unit")
        return Cyclotomic.from_powers(self.N, {(j * u) % self.N: v for j, v in enumerate(self.c) if v})

    def conjugates(self):
        """Complex values of all Galois conjugates, ordered by unit."""
        return [self.galois(u).to_complex() for u in units_mod(self.N)]

    def norm(self):
        """Exact field norm to Q."""
        return norm_integer(self) if self._integral() else _norm_rational(self)

    def _integral(self):
        return all(isinstance(v, int) for v in self.c)

    def denominator(self):
        return math.lcm(*(Fraction(v).denominator for v in self.c))

    # -- arithmetic ---------------------------------------------------------
    def _align(self, other):
        if isinstance(other, Cyclotomic):
            if other.N == self.N:
                return self, other
            M = math.lcm(self.N, other.N)
            return self.lift(M), other.lift(M)
        v = _coerce(other)
        return self, Cyclotomic(self.N, [v])

    def __add__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        return _raw(a.N, tuple(_norm(x + y) for x, y in zip(a.c, b.c)))

    __radd__ = __add__

    def __neg__(self):
        return _raw(self.N, tuple(-x for x in self.c))

    def __sub__(self, other):
        try:
            a, b = self._align(other)
        except TypeError:
            return NotImplemented
        return _raw(a.N, tuple(_norm(x - y) for x, y in zip(a.c, b.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                v = _coerce(other)
            except TypeError:
                return NotImplemented
            return _raw(self.N, tuple(_norm(x * v) for x in self.c))
        a, b = self._align(other)
        prod = [0] * (2 * len(a.c) - 1)
        for i, x in enumerate(a.c):
            if x:
                for j, y in enumerate(b.c):
                    if y:
                        prod[i + j] += x * y
        return Cyclotomic(a.N, prod)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyclotomic(self.N, [1 / Fraction(self.c[0])])
        t = sympy.Symbol("t")
        a = sympy.Poly([sympy.Rational(str(v)) for v in reversed(self.c)], t, domain="QQ")
        m = sympy.Poly(list(reversed(cyclotomic_polynomial(self.N))), t, domain="QQ")
        inv = sympy.invert(a, m)
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(inv.all_coeffs())]
        return Cyclotomic(self.N, coeffs)

    def __truediv__(self, other):
        if isinstance(other, Cyclotomic):
            a, b = self._align(other)
            return a * b.inverse()
        v = _coerce(other)
        return self * (1 / Fraction(v))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = Cyclotomic(self.N, [1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            a, b = self._align(other)
            return a.c == b.c
        try:
            v = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.is_rational() and Fraction(self.c[0]) == v

    def __hash__(self):
        # consistent with equality only within one conductor, except for rationals
        if self.is_rational():
            return hash(Fraction(self.c[0]))
        return hash((self.N, self.c))

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = [f"{v}*z^{j}" for j, v in enumerate(self.c) if v]
        return f"Cyclotomic(N={self.N}: {' + '.join(terms) or '0'})"


def _raw(N, c):
    obj = Cyclotomic.__new__(Cyclotomic)
    obj.N = N
    obj.c = c
    return obj


def _coerce(v):
    if isinstance(v, bool):
        raise TypeError("bool")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return _norm(v)
    if isinstance(v, str):
        return _norm(Fraction(v))
    if isinstance(v, (sympy.Rational, sympy.Integer)):
        return _norm(Fraction(int(v.p), int(v.q)))
    raise TypeError(f"cannot use {type(v).__name__} as a rational")


# ---------------------------------------------------------------------------
# exact norms by multi-modular evaluation
# ---------------------------------------------------------------------------
@lru_cache(maxsize=None)
def _crt_primes(N, count_bits):
    """Primes q = 1 mod N below 2^25 with their order-N elements, enough for count_bits."""
    out = []
    bits = 0.0
    k = (1 << 24) // N
    while bits < count_bits:
        q = k * N + 1
        k -= 1
        if q < 3 or k <= 0:
            raise RuntimeError("ran out of CRT primes")
        if not sympy.isprime(q):
            continue
        g = _order_n_element(q, N)
        out.append((q, g))
        bits += math.log2(q)
    return tuple(out)


def _order_n_element(q, N):
    fac = sympy.factorint(N)
    for a in range(2, q):
        g = pow(a, (q - 1) // N, q)
        if all(pow(g, N // p, q) != 1 for p in fac):
            return g
    raise RuntimeError("no element of order N")


def crt_primes(N, bits):
    """Primes q = 1 mod N (with an element of order N) whose product exceeds 2^bits."""
    return _crt_primes(N, int(math.ceil(bits)) + 1)


def crt_combine(residues, moduli):
    """Symmetric CRT reconstruction of integer vectors."""
    x = [0] * len(residues[0])
    M = 1
    for r, q in zip(residues, moduli):
        inv = pow(M, -1, q)
        x = [xi + M * (((int(ri) - xi) * inv) % q) for xi, ri in zip(x, r)]
        M *= q
    half = M // 2
    return [xi - M if xi > half else xi for xi in x]


def norm_integer(a):
    """Exact norm of an algebraic integer given in the power basis."""
    N = a.N
    if N <= 2:
        return int(a.c[0])
    if a.is_zero():
        return 0
    units = units_mod(N)
    bits = max(sum(math.log2(abs(z)) for z in a.conjugates()), 0) + 8
    res, mods = [], []
    for q, g in crt_primes(N, bits):
        pw = [pow(g, k, q) for k in range(N)]
        val = 1
        for u in units:
            s = 0
            for j, v in enumerate(a.c):
                if v:
                    s += v * pw[(j * u) % N]
            val = (val * s) % q
        res.append([val])
        mods.append(q)
    return crt_combine(res, mods)[0]


def _norm_rational(a):
    d = a.denominator()
    return Fraction(norm_integer(a * d), d ** totient(a.N))
