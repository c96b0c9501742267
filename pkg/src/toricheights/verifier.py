"""Exact heights of twisted intersection cycles and the experiments built on them.

The model is P^1 x P^1 with the canonical metric on O(1, 1), so the height of
a point of the torus is ``h(x) + h(y)`` (Weil heights), and the height of the
Galois-stable cycle ``Z(f, omega * g)`` is ``[m(S_x) + m(S_y)] / phi(N)`` where
``S_x`` is the primitive integer polynomial whose roots are the x-coordinates
of all conjugate points.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import io
import math
import time

import numpy as np
import sympy

from .concave import Estimate
from .cyclotomic import Cyclotomic, totient, units_mod
from .elimination import ImproperIntersection, norm_poly_with_conjugates, twisted_resultant
from .heights import degree_prediction, limit_height
from .laurent import LaurentPoly, TorsionPoint, quasi_strict_sequence, upsilon_test
from .lattice_geometry import mixed_volume, unit_cube
from .mahler import log_plus_sum, mahler_measure
from .ronkin import ord_p, ronkin_arch_fiber

__all__ = [
    "CSV_COLUMNS",
    "NonGeneric",
    "InUpsilon",
    "BadPrime",
    "CycleHeight",
    "ConvergenceRow",
    "ExperimentConfig",
    "LogValue",
    "cycle_height_exact",
    "convergence_experiment",
    "local_error_term",
    "good_prime_report",
    "adelic_tail",
    "tail_bound",
    "equidistribution_demo",
    "mahler_measure_poly",
    "rows_to_csv",
]

CSV_COLUMNS = ("N", "s", "lhs", "rhs", "abs_dev", "degree", "status", "wall_ms")


class NonGeneric(ValueError):
    """The cycle meets the toric boundary in a way the elimination cannot separate."""


class InUpsilon(ValueError):
    """The twisted polynomials agree up to a monomial (the cycle is not proper)."""


class BadPrime(ValueError):
    """The prime lies in the exceptional set of the local error formula."""


# ---------------------------------------------------------------------------
# exact cycle heights
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CycleHeight:
    """Height of ``Z(t1 * f, t2 * g)`` under the canonical O(1, 1) metric.

    Attributes
    ----------
    value, error : float
    degree : int
        Number of torus points over Q(zeta_N), with multiplicity.
    order : int
        Conductor N of the twist.
    parts : tuple
        ``(m(S_x), m(S_y))``.
    log : tuple
    """

    value: float
    error: float
    degree: int
    order: int
    parts: tuple
    log: tuple = ()


def _relative_twist(omega, n=2):
    if isinstance(omega, TorsionPoint):
        return omega
    t1, t2 = omega
    return t2 * t1.inverse()


def _roots_log_plus(conj):
    """``sum log+ |r|`` over the roots of one complex polynomial, with an error bound."""
    c = np.asarray(conj, dtype=complex)
    if len(c) == 2:
        r = -c[0] / c[1]
        a = abs(r)
        return (math.log(a) if a > 1 else 0.0), 1e-14 * (1 + abs(math.log(max(a, 1e-300))))
    roots = np.roots(c[::-1])
    d = len(roots)
    radii = []
    for i, z in enumerate(roots):
        den = c[-1] * np.prod([z - w for j, w in enumerate(roots) if j != i])
        val = np.polyval(c[::-1], z)
        radii.append(d * abs(val / den) + 1e-15 * max(1.0, abs(z)) if den != 0 else np.inf)
    return log_plus_sum(roots, radii)


def _mahler_from_conjugates(res):
    """m of the Galois norm of the torus part of a resultant.

    ``log|lead S|`` comes from the exact norm polynomial; the roots are those
    of the conjugates of the torus part, each of small degree.
    """
    S, conj = norm_poly_with_conjugates(res.torus)
    value = math.log(abs(S[-1]))
    error = 0.0
    for c in conj:
        v, e = _roots_log_plus(c)
        value += v
        error += e
    return value, error, S


def cycle_height_exact(f, g, omega):
    """Exact-arithmetic height of the twisted intersection cycle.

    Parameters
    ----------
    f, g : LaurentPoly
        Bivariate polynomials with rational (or cyclotomic) coefficients.
    omega : TorsionPoint or pair of TorsionPoint
        A single point twists g; a pair ``(t1, t2)`` twists both. Only the
        relative twist ``t2 / t1`` matters, since the canonical height is
        invariant under torsion translation.

    Returns
    -------
    CycleHeight

    Raises
    ------
    InUpsilon
        If the twisted polynomials agree up to a monomial.
    ImproperIntersection
        If the curves share a component.
    NonGeneric
        If both curves pass through a common point of the toric boundary.
    """
    if f.dim != 2 or g.dim != 2:
        raise ValueError("cycle heights are implemented for n = 2")
    t = _relative_twist(omega)
    if upsilon_test(f, g, t):
        raise InUpsilon("twisted polynomials agree up to a monomial")
    rx = twisted_resultant(f, g, t, axis="y")
    ry = twisted_resultant(f, g, t, axis="x")
    for r in (rx, ry):
        if r.boundary_conflict:
            raise NonGeneric(f"curves share a boundary point (eliminating {r.axis})")
    if rx.torus_degree != ry.torus_degree:
        raise NonGeneric("projections disagree on the number of torus points")
    if rx.torus_degree == 0:
        raise ImproperIntersection("empty intersection in the torus")
    mx, ex, _ = _mahler_from_conjugates(rx)
    my, ey, _ = _mahler_from_conjugates(ry)
    N = t.order
    L = max(rx.conductor, ry.conductor, 1)
    # the norm is taken over Q(zeta_L); normalize by its degree
    deg_field = totient(L) if L > 2 else 1
    return CycleHeight(
        value=(mx + my) / deg_field,
        error=(ex + ey) / deg_field,
        degree=rx.torus_degree,
        order=N,
        parts=(mx, my),
        log=rx.log + ry.log,
    )


# ---------------------------------------------------------------------------
# convergence experiment
# ---------------------------------------------------------------------------
@dataclass
class ConvergenceRow:
    N: int
    s: int
    lhs: float
    rhs: float
    abs_dev: float
    degree: int
    status: str
    wall_ms: float

    def as_list(self):
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class ExperimentConfig:
    """Parameters of a convergence, tail or equidistribution run.

    Attributes
    ----------
    f, g : LaurentPoly
    first, last : int
        Prime range of torsion orders, within [5, 2500].
    orders : list of int, optional
        Explicit orders overriding the prime range.
    exponent_rule : str
        ``"spread"`` or ``"random"``.
    seed : int
    arch_options : dict
        Forwarded to the Archimedean Ronkin dual.
    model : str
    """

    f: LaurentPoly
    g: LaurentPoly
    first: int = 101
    last: int = 401
    orders: list | None = None
    exponent_rule: str = "spread"
    seed: int = 0
    arch_options: dict = field(default_factory=dict)
    model: str = "P1xP1 canonical O(1,1)"

    def __post_init__(self):
        if not (5 <= self.first <= self.last <= 2500):
            raise ValueError("prime range must lie within [5, 2500]")
        for k in ("resolution", "nodes"):
            if k in self.arch_options and int(self.arch_options[k]) <= 0:
                raise ValueError("budgets must be positive")

    def sequence(self):
        if self.orders is not None:
            return quasi_strict_sequence(self.exponent_rule, orders=self.orders, seed=self.seed)
        return quasi_strict_sequence(self.exponent_rule, first=self.first, last=self.last, seed=self.seed)


def convergence_experiment(config):
    """Compare exact cycle heights with the predicted limit height.

    Returns
    -------
    (rows, summary) : (list of ConvergenceRow, dict)
        The summary holds the RHS, its error bound, the degree prediction and
        the maximal deviation over the last three proper rows.
    """
    f, g = config.f, config.g
    square = unit_cube(2)
    try:
        rhs_report = limit_height([f, g], [square], arch_options=config.arch_options)
        rhs, rhs_err = rhs_report.total, rhs_report.error
    except ValueError:
        rhs_report, rhs, rhs_err = None, float("nan"), float("nan")
    try:
        deg = degree_prediction([f, g])
    except ValueError:
        deg = 0
    rows = []
    for t1, t2 in config.sequence():
        t0 = time.perf_counter()
        N, s = t2.order, t2.exps[1]
        try:
            ch = cycle_height_exact(f, g, (t1, t2))
            lhs = ch.value
            status = "ok" if ch.degree == deg else f"degree-mismatch:{ch.degree}"
            rows.append(ConvergenceRow(N, s, lhs, rhs, abs(lhs - rhs), ch.degree, status,
                                       1e3 * (time.perf_counter() - t0)))
        except (ImproperIntersection, NonGeneric, InUpsilon, ValueError) as exc:
            rows.append(ConvergenceRow(N, s, float("nan"), rhs, float("nan"), 0,
                                       f"error:{type(exc).__name__}", 1e3 * (time.perf_counter() - t0)))
    proper = [r for r in rows if r.status == "ok"]
    tail = proper[-3:]
    summary = {
        "rhs": rhs,
        "rhs_error": rhs_err,
        "degree_prediction": deg,
        "rows": len(rows),
        "proper_rows": len(proper),
        "tail_orders": [r.N for r in tail],
        "tail_max_abs_dev": max((r.abs_dev for r in tail), default=float("nan")),
        "model": config.model,
        "rhs_terms": rhs_report.to_json()["terms"] if rhs_report else [],
    }
    return rows, summary


def rows_to_csv(rows, path=None):
    """Write rows with the fixed column set; returns the CSV text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in sorted(rows, key=lambda r: r.N):
        w.writerow([_fmt(v) for v in r.as_list()])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# p-adic local error terms
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class LogValue:
    """``coeff * log p``; ``coeff is None`` encodes minus infinity."""

    coeff: Fraction | None
    p: int

    @property
    def value(self):
        return -math.inf if self.coeff is None else float(self.coeff) * math.log(self.p)

    def __float__(self):
        return self.value

    def is_infinite(self):
        return self.coeff is None


@lru_cache(maxsize=None)
def _zeta_residues(d, p):
    """Residues of zeta_d^k in F_p (None when outside the prime field), k = 0..d-1.

    The prime above p is fixed by sending zeta_d^(d / d0), d0 = gcd(d, p - 1),
    to ``g^((p - 1) / d0)`` with g the least primitive root mod p. Every prime
    above p arises this way for some choice, since the Galois group permutes
    the primitive d0-th roots of unity in F_p transitively.
    """
    d0 = math.gcd(d, p - 1)
    step = d // d0
    c = pow(int(sympy.primitive_root(p)), (p - 1) // d0, p) if p > 2 else 1
    return tuple(pow(c, k // step, p) if k % step == 0 else None for k in range(d))


def _zeta_residue_equals(gamma, k, d, p):
    """Whether zeta_d^k reduces to the residue of the rational gamma (p-unit)."""
    g = gamma.numerator * pow(gamma.denominator, -1, p) % p
    if d == 1:
        return g == 1 % p
    r = _zeta_residues(d, p)[k % d]
    return r is not None and r == g


def _split_order(n, p):
    r = 0
    while n % p == 0:
        n //= p
        r += 1
    return r, n


def _valuation_gamma_minus_zeta(gamma, k, N, p):
    """``v(gamma - zeta_N^k)`` for the fixed prime above p, with v(p) = 1.

    Returns None when the difference is zero.
    """
    gamma = Fraction(gamma)
    k %= N
    g = math.gcd(k, N)
    order = N // g
    if gamma == 0:
        return Fraction(0)
    vg = ord_p(gamma, p)
    if vg != 0:
        return Fraction(min(vg, 0))
    if order == 1 and gamma == 1:
        return None
    if order == 2 and gamma == -1:
        return None
    r, d = _split_order(order, p)
    # zeta = zeta_{p^r} * zeta_d with zeta_d = zeta_N^{k * a} for a suitable a
    kd = (k // g) * pow(p**r, -1, d) % d if d > 1 else 0
    if not _zeta_residue_equals(gamma, kd, d, p):
        return Fraction(0)
    if r >= 1:
        if p == 2 and r == 1:
            if d == 1:
                return Fraction(_val_int(gamma + 1, p))
            return Fraction(_val_int(gamma + 1, p))
        return Fraction(1, totient(p**r))
    # r = 0: zeta is the Teichmuller lift of gamma mod p
    if p == 2:
        return Fraction(_val_int(gamma - 1, p))
    return Fraction(_val_int(gamma ** (p - 1) - 1, p))


def _val_int(q, p):
    q = Fraction(q)
    if q == 0:
        return math.inf
    return ord_p(q, p)


def _scaled_root(c):
    """``(q, N, k)`` with ``c = q * zeta_N^k``."""
    if isinstance(c, Cyclotomic):
        sr = c.as_scaled_root_of_unity()
        if sr is None:
            raise ValueError("coefficient is not a rational multiple of a root of unity")
        return sr[0], c.N, sr[1]
    return Fraction(c), 1, 0


def good_prime_report(f, g, p):
    """Checks that put p outside the exceptional set.

    Returns
    -------
    dict
        ``unit_coefficients``, ``primitive_edges`` and ``irreducible_reductions``
        flags plus ``good``.
    """
    units = all(ord_p(c, p) == 0 for h in (f, g) for _, c in h.terms)
    edges = all(_edges_primitive(h) for h in (f, g))
    irred = units and all(_irreducible_mod(h, p) for h in (f, g))
    return {
        "unit_coefficients": units,
        "primitive_edges": edges,
        "irreducible_reductions": irred,
        "good": units and edges and irred,
    }


def _edges_primitive(h):
    P = h.newton_polytope
    V = P.vertices
    if len(V) < 2:
        return True
    # adjacent vertices along the boundary
    for a, b in P.halfspaces:
        on = [v for v in V if sum(x * y for x, y in zip(a, v)) == b]
        if len(on) == 2:
            d = [int(x - y) for x, y in zip(on[0], on[1])]
            if math.gcd(*d) != 1:
                pts = [e for e in h.support if sum(x * y for x, y in zip(a, e)) == b]
                if len(pts) < math.gcd(*d) + 1:
                    return False
    return True


@lru_cache(maxsize=None)
def _irreducible_mod_cached(key, p):
    """Sound irreducibility probe over F_p for a bivariate polynomial.

    f is irreducible when its content in F_p[y] is constant and some
    specialization ``f(x, c)`` of full x-degree is irreducible; failing that
    the probe reports False (inconclusive counts as bad).
    """
    dim, terms = key
    if dim == 1:
        x = sympy.Symbol("x")
        lo = min(e[0] for e, _ in terms)
        P = sympy.Poly(sum(c * x ** (e[0] - lo) for e, c in terms), x, modulus=p)
        return P.degree() > 0 and P.is_irreducible
    if dim != 2:
        return False
    x, y = sympy.symbols("x y")
    lx = min(e[0] for e, _ in terms)
    ly = min(e[1] for e, _ in terms)
    rows = {}
    for e, c in terms:
        rows.setdefault(e[0] - lx, []).append((e[1] - ly, c))
    if max(rows) == 0:
        # free of x: swap the roles of the variables
        return _irreducible_mod_cached((2, tuple(((e[1], e[0]), c) for e, c in terms)), p)
    ycoef = {i: sympy.Poly(sum(c * y**j for j, c in r), y, modulus=p) for i, r in rows.items()}
    content = None
    for P in ycoef.values():
        content = P if content is None else sympy.gcd(content, P)
    if content.degree() > 0:
        return False
    dx = max(rows)
    for c in range(p):
        if ycoef[dx].eval(c) % p == 0:
            continue
        P = sympy.Poly(sum(int(ycoef[i].eval(c)) * x**i for i in ycoef), x, modulus=p)
        if P.degree() == dx and P.is_irreducible:
            return True
    return False


def _irreducible_mod(h, p):
    terms = []
    for e, c in h.terms:
        q, _, _ = _scaled_root(c)
        if isinstance(c, Cyclotomic) and not c.is_rational():
            return True  # no rational reduction; the probe does not apply
        terms.append((e, int(q.numerator * pow(q.denominator, -1, p) % p)))
    return _irreducible_mod_cached((h.dim, tuple(terms)), p)


def _translate_offset(f, g):
    """m0 with supp g = supp f + m0, or None."""
    if len(f.terms) != len(g.terms):
        return None
    m0 = tuple(a - b for a, b in zip(g.support[0], f.support[0]))
    if all(tuple(a + b for a, b in zip(e, m0)) == e2 for e, e2 in zip(f.support, g.support)):
        return m0
    return None


def local_error_term(f, g, t, p, degree=None, check=True):
    """Exact local error term at a good prime p.

    ``I_p = deg * log max_{m != m'} |alpha_{m-m0} beta_{m'} chi^{m'}(t)
    - alpha_{m'-m0} beta_m chi^m(t)|_p`` when ``supp g = supp f + m0`` and 0
    otherwise; t twists g relative to f.

    Parameters
    ----------
    f, g : LaurentPoly
    t : TorsionPoint or pair of TorsionPoint
    p : int
    degree : int, optional
        Degree of Z(f) against the square; defaults to ``MV([0,1]^2, NP f)``.
    check : bool
        Verify that p is good.

    Returns
    -------
    LogValue
        ``coeff * log p``; ``coeff is None`` when the twisted polynomials
        agree up to a monomial (minus infinity).
    """
    if check and not good_prime_report(f, g, p)["good"]:
        raise BadPrime(f"{p} is in the exceptional set")
    tt = _relative_twist(t)
    m0 = _translate_offset(f, g)
    if m0 is None:
        return LogValue(Fraction(0), p)
    if degree is None:
        degree = int(mixed_volume(unit_cube(f.dim), f.newton_polytope))
    alpha = dict(f.terms)
    beta = dict(g.terms)
    N = tt.order
    supp = [e for e, _ in f.terms]
    best = None
    for i, m in enumerate(supp):
        for mp in supp[i + 1 :]:
            # A zeta^a - B zeta^b = B zeta^a (A/B - zeta^(b-a))
            gm = tuple(a + b for a, b in zip(m, m0))
            gmp = tuple(a + b for a, b in zip(mp, m0))
            qa, Na, ka = _scaled_root(alpha[m] * beta[gmp])
            qb, Nb, kb = _scaled_root(alpha[mp] * beta[gm])
            L = math.lcm(N, Na, Nb)
            a = (tt.chi(gmp) * (L // N) + ka * (L // Na)) % L
            b = (tt.chi(gm) * (L // N) + kb * (L // Nb)) % L
            v = _valuation_gamma_minus_zeta(qa / qb, b - a, L, p)
            if v is None:
                continue
            v = v + ord_p(qb, p)
            best = v if best is None else min(best, v)
    if best is None:
        return LogValue(None, p)
    return LogValue(-degree * best, p)


def tail_bound(f, g, t, primes, degree=None):
    """``C * sum_{p | N, p in primes} log p / phi(N')`` with N' the largest character order.

    ``C`` is the degree; ``N'`` runs over the orders of ``chi^{m - m'}(t)``.
    """
    tt = _relative_twist(t)
    if degree is None:
        degree = int(mixed_volume(unit_cube(f.dim), f.newton_polytope))
    supp = [e for e, _ in f.terms]
    N = tt.order
    total = 0.0
    for p in primes:
        if N % p:
            continue
        best = 0
        for i, m in enumerate(supp):
            for mp in supp[i + 1 :]:
                k = (tt.chi(m) - tt.chi(mp)) % N
                order = N // math.gcd(k, N)
                r, _ = _split_order(order, p)
                if r:
                    best = max(best, totient(p**r))
        if best:
            total += math.log(p) / best
    return degree * total


@dataclass
class TailRow:
    N: int
    s: int
    value: float
    bound: float
    terms: dict
    wall_ms: float
    degree: int = 0

    @property
    def ok(self):
        return self.value <= 1e-12 and -self.value <= self.bound * (1 + 1e-12) + 1e-15

    def as_row(self):
        return ConvergenceRow(self.N, self.s, self.value, -self.bound, abs(self.value), self.degree,
                              "ok" if self.ok else "bound-violated", self.wall_ms)


def adelic_tail(f, g, sequence, prime_bound=100):
    """Orbit-averaged local error terms summed over good primes up to a bound.

    Parameters
    ----------
    f, g : LaurentPoly
    sequence : iterable of torsion pairs
    prime_bound : int

    Returns
    -------
    list of TailRow
        ``terms`` maps each contributing prime to the exact orbit average
        (a Fraction, in units of log p).
    """
    primes = [int(p) for p in sympy.primerange(2, prime_bound + 1)]
    good = [p for p in primes if good_prime_report(f, g, p)["good"]]
    degree = int(mixed_volume(unit_cube(f.dim), f.newton_polytope))
    rows = []
    for pair in sequence:
        t0 = time.perf_counter()
        tt = _relative_twist(pair)
        N = tt.order
        units = units_mod(N) if N > 1 else [1]
        terms = {}
        for p in good:
            acc = Fraction(0)
            for u in units:
                lv = local_error_term(f, g, tt.power(u), p, degree=degree, check=False)
                if lv.coeff is None:
                    raise InUpsilon("orbit meets the exceptional set")
                acc += lv.coeff
            acc /= len(units)
            if acc:
                terms[p] = acc
        value = math.fsum(float(c) * math.log(p) for p, c in terms.items())
        bound = tail_bound(f, g, tt, good, degree)
        rows.append(TailRow(N, tt.exps[-1], value, bound, terms, 1e3 * (time.perf_counter() - t0), degree))
    return rows


# ---------------------------------------------------------------------------
# logarithmic equidistribution
# ---------------------------------------------------------------------------
def mahler_measure_poly(h):
    """Mahler measure of a Laurent polynomial in one or two variables."""
    if h.dim == 1:
        if not h.is_rational():
            raise ValueError("rational coefficients required")
        lo = min(e[0] for e in h.support)
        hi = max(e[0] for e in h.support)
        D = h.integer_scale()
        coeffs = [0] * (hi - lo + 1)
        for (e,), c in h.terms:
            coeffs[e - lo] = int(Fraction(c) * D)
        est = mahler_measure(coeffs)
        return Estimate(est.value - math.log(D), est.error)
    if h.dim == 2:
        if h.is_monomial():
            (_, c), = h.terms
            return Estimate(math.log(abs(complex(c))), 0.0)
        data = ronkin_arch_fiber(h, np.array([0.0]), np.array([0.0]), nodes=4096)
        return Estimate(-float(data["rho"][0, 0]), max(data["error"], 1e-12))
    raise NotImplementedError("Mahler measures are implemented for n <= 2")


def _orbit_log_average(h, t):
    """``(1/phi(N)) sum_u log|h(t^u)|`` exactly via the field norm of h(t)."""
    N = t.order
    val = 0
    for e, c in h.terms:
        z = Cyclotomic.zeta(N, t.chi(e)) if N > 1 else 1
        val = val + (c * z if isinstance(c, Cyclotomic) else z * c)
    if not isinstance(val, Cyclotomic):
        val = Cyclotomic(max(N, 1), [val])
    if val.is_zero():
        raise ZeroDivisionError("the orbit meets a zero of h")
    nm = val.norm()
    phi = totient(val.N) if val.N > 2 else 1
    return math.log(abs(nm.numerator if isinstance(nm, Fraction) else nm)) / phi - (
        math.log(nm.denominator) / phi if isinstance(nm, Fraction) else 0.0
    )


def equidistribution_demo(h, orders, exponents=None):
    """Orbit averages of log|h| over ``(zeta_N, zeta_N^s)`` minus m(h).

    Parameters
    ----------
    h : LaurentPoly
        One or two variables.
    orders : sequence of int
    exponents : dict, optional
        ``N -> s`` for two variables; defaults to the spread exponent.

    Returns
    -------
    list of ConvergenceRow
        ``lhs`` is the orbit average, ``rhs`` the Mahler measure and
        ``degree`` the orbit size.
    """
    from .laurent import spread_exponent

    mh = mahler_measure_poly(h)
    rows = []
    for N in orders:
        t0 = time.perf_counter()
        if h.dim == 1:
            t, s = TorsionPoint(N, [1]), 1
        else:
            s = (exponents or {}).get(N) or spread_exponent(N)
            t = TorsionPoint(N, [1, s] + [0] * (h.dim - 2))
        try:
            avg = _orbit_log_average(h, t)
            status = "ok"
        except ZeroDivisionError:
            avg, status = float("nan"), "error:orbit-hits-zero"
        rows.append(ConvergenceRow(N, s, avg, mh.value, abs(avg - mh.value), totient(N), status,
                                   1e3 * (time.perf_counter() - t0)))
    return rows
