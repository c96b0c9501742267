"""Ronkin functions and their Legendre duals at every place of Q.

Sign convention
---------------
``rho_{f,v}(u) = -(average of log|f|_v over the fibre val_v^{-1}(u))`` with
``val_v(t) = (-log|t_1|_v, ..., -log|t_n|_v)``. This makes rho concave; at a
prime p it is ``min_m(<m, u> - log|alpha_m|_p)``, and its dual is the upper
hull of ``{(m, log|alpha_m|_v)}`` for monomials. The classical convex Ronkin
function is ``N_f(w) = -rho_f(-w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
import math
import time

import numpy as np
from scipy.spatial import HalfspaceIntersection

from .concave import Estimate, GridConcave, PAConcave
from .cyclotomic import Cyclotomic
from .laurent import LaurentPoly

__all__ = [
    "Place",
    "INFINITY",
    "RonkinDual",
    "log_abs",
    "ord_p",
    "ronkin_nonarch",
    "ronkin_dual_nonarch",
    "ronkin_arch",
    "ronkin_arch_fiber",
    "ronkin_dual_arch",
    "ronkin_dual",
    "tropical_ronkin",
]


@dataclass(frozen=True, order=True)
class Place:
    """A place of Q: ``p = 0`` encodes the Archimedean place.

    Ordering puts the Archimedean place first, then primes ascending.
    """

    p: int = 0

    @property
    def is_archimedean(self):
        return self.p == 0

    @property
    def weight(self):
        return 1

    @property
    def log_unit(self):
        """Scale of the value group: log p, or 1 at infinity."""
        return 1.0 if self.p == 0 else math.log(self.p)

    def __str__(self):
        return "inf" if self.p == 0 else str(self.p)

    @classmethod
    def parse(cls, s):
        s = str(s).strip().lower()
        if s in ("inf", "infinity", "oo", "0"):
            return cls(0)
        return cls(int(s))


INFINITY = Place(0)


def ord_p(c, p):
    """p-adic valuation of a rational or of ``q * zeta^k``."""
    if isinstance(c, Cyclotomic):
        sr = c.as_scaled_root_of_unity()
        if sr is None:
            raise NotImplementedError("p-adic absolute value needs coefficients of the form q * zeta^k")
        c = sr[0]
    c = Fraction(c)
    if c == 0:
        raise ValueError("valuation of zero")
    v = 0
    n, d = c.numerator, c.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def log_abs(c, place):
    """``log|c|_v`` as a float."""
    if place.is_archimedean:
        return math.log(abs(complex(c))) if isinstance(c, Cyclotomic) else math.log(abs(float(Fraction(c))))
    return -ord_p(c, place.p) * math.log(place.p)


@dataclass(frozen=True)
class RonkinDual:
    """Dual of a Ronkin function on NP(f).

    Attributes
    ----------
    place : Place
    function : PAConcave or GridConcave
        In units of ``unit`` (``log p`` at primes, 1 at infinity).
    unit : float
    provenance : dict
    """

    place: Place
    function: object
    unit: float = 1.0
    provenance: dict = field(default_factory=dict)

    @property
    def exact(self):
        return isinstance(self.function, PAConcave) and self.function.exact

    def real_function(self):
        """The dual in real units (float PA or grid)."""
        f = self.function
        if self.unit == 1.0:
            return f.to_float() if isinstance(f, PAConcave) else f
        g = f.to_float()
        return PAConcave.lifted(g.points, np.asarray(g.values) * self.unit)

    def evaluate(self, x):
        return np.asarray(self.real_function().evaluate(x))

    @property
    def error(self):
        return float(self.provenance.get("error", 0.0))


# ---------------------------------------------------------------------------
# non-Archimedean places
# ---------------------------------------------------------------------------
def ronkin_nonarch(f, p):
    """``rho_{f,p}`` as exact pieces in units of log p.

    The returned function R satisfies ``rho_{f,p}(u) = log(p) * R(u / log p)``;
    its intercepts are the valuations ``ord_p(alpha_m)``.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    slopes = [e for e, _ in f.terms]
    inter = [ord_p(c, p) for _, c in f.terms]
    return PAConcave.from_pieces(slopes, inter)


def ronkin_dual_nonarch(f, p):
    """Exact dual at p: upper hull of ``(m, -ord_p(alpha_m))`` in units of log p."""
    R = ronkin_nonarch(f, p)
    return RonkinDual(Place(p), R.dual(), math.log(p), {"method": "tropical", "error": 0.0})


def tropical_ronkin(f, place=INFINITY, vertices_only=True):
    """``min_m(<m, u> - log|alpha_m|_v)`` over the vertex monomials (or all)."""
    verts = set(f.newton_polytope.vertices) if vertices_only else None
    slopes, inter = [], []
    for e, c in f.terms:
        if verts is not None and e not in verts:
            continue
        slopes.append(e)
        inter.append(-log_abs(c, place))
    return PAConcave.from_pieces(np.asarray(slopes, float), np.asarray(inter, float))


# ---------------------------------------------------------------------------
# Archimedean pointwise values by quasi-Monte Carlo
# ---------------------------------------------------------------------------
def _lattice_generator(n, M):
    """Korobov generating vector (1, g, g^2, ...) with g near M / golden ratio."""
    if n == 1:
        return np.array([1])
    g = int(round(M / ((1 + 5**0.5) / 2)))
    while math.gcd(g, M) != 1:
        g += 1
    return np.array([pow(g, k, M) for k in range(n)])


def _qmc_mean(f, u, M, shift):
    E, C = f.complex_terms()
    n = f.dim
    z = _lattice_generator(n, M)
    k = np.arange(M)[:, None]
    theta = 2 * np.pi * ((k * z[None, :] / M + shift[None, :]) % 1.0)
    u = np.asarray(u, dtype=float)
    phase = theta @ E.T.astype(float)
    mag = np.exp(-(E @ u))
    vals = np.exp(1j * phase) @ (C * mag)
    small = np.abs(vals) < 1e-15
    if np.any(small):
        th = theta[small] + 1e-6
        vals[small] = np.exp(1j * (th @ E.T.astype(float))) @ (C * mag)
    return float(np.mean(np.log(np.abs(vals))))


def ronkin_arch(f, u, budget=2**18, seed=0):
    """Archimedean Ronkin value by a randomly shifted rank-1 lattice rule.

    Parameters
    ----------
    f : LaurentPoly
    u : sequence of float
    budget : int
        Total number of nodes, split into two independently shifted halves.
    seed : int

    Returns
    -------
    Estimate
        Mean of the two half-budget estimates; the error is twice their gap.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    if len(u) != f.dim:
        raise ValueError("dimension mismatch")
    if f.is_monomial():
        (e, c), = f.terms
        val = float(np.dot(e, u)) - log_abs(c, INFINITY)
        return Estimate(val, 0.0)
    rng = np.random.default_rng(seed)
    M = max(budget // 2, 2)
    a = _qmc_mean(f, u, M, rng.random(f.dim))
    b = _qmc_mean(f, u, M, rng.random(f.dim))
    return Estimate(-0.5 * (a + b), 2.0 * abs(a - b) + 1e-12)


# ---------------------------------------------------------------------------
# Archimedean fibre quadrature (n = 2)
# ---------------------------------------------------------------------------
def _univariate_jensen(coeffs, u):
    """Mean of log|P| over |z| = e^{-u}; coeffs low to high (complex), any u array."""
    coeffs = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(coeffs)[0]
    lo, hi = nz[0], nz[-1]
    c = coeffs[lo : hi + 1]
    u = np.asarray(u, dtype=float)
    out = math.log(abs(c[-1])) - lo * u
    if len(c) > 1:
        roots = np.roots(c[::-1])
        L = np.log(np.abs(roots))
        out = out + np.maximum(L[None, :], -u.reshape(-1, 1)).sum(axis=1).reshape(u.shape)
    return out


def _poly_roots_batch(C):
    """Roots of many polynomials: C has shape (B, d + 1), low to high, leading nonzero."""
    d = C.shape[1] - 1
    if d == 1:
        return (-C[:, 0] / C[:, 1])[:, None]
    if d == 2:
        a, b, c = C[:, 2], C[:, 1], C[:, 0]
        disc = np.sqrt(b * b - 4 * a * c)
        sgn = np.where(np.real(np.conj(b) * disc) >= 0, 1.0, -1.0)
        q = -0.5 * (b + sgn * disc)
        q = np.where(q == 0, 1e-300, q)
        return np.stack([q / a, c / q], axis=1)
    comp = np.zeros((C.shape[0], d, d), dtype=complex)
    comp[:, 0, :] = -C[:, -2::-1] / C[:, -1:]
    comp[:, 1:, :-1] = np.eye(d - 1)
    return np.linalg.eigvals(comp)


def _interp_integrals(L, tau):
    """Periodic piecewise-linear means of ``max(L, tau)`` and ``[L < tau]``.

    L has shape (M, d) (sorted log-moduli at equispaced nodes), tau (T,).
    Returns (value (T,), count (T,)).
    """
    M = L.shape[0]
    a = L.reshape(-1)
    b = np.roll(L, -1, axis=0).reshape(-1)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    base = L.sum() / M
    tau = np.asarray(tau, dtype=float)[:, None]
    span = np.where(hi > lo, hi - lo, 1.0)
    full = tau >= hi
    part = (tau > lo) & ~full
    e = np.where(full, tau - 0.5 * (a + b), 0.0) + np.where(part, (tau - lo) ** 2 / (2 * span), 0.0)
    cnt = np.where(full, 1.0, 0.0) + np.where(part, (tau - lo) / span, 0.0)
    return base + e.sum(axis=1) / M, cnt.sum(axis=1) / M


def _orientation_data(f):
    """Shifted coefficient table of f in powers of x (rows) and y (columns)."""
    E, C = f.complex_terms()
    i0, j0 = E[:, 0].min(), E[:, 1].min()
    dx, dy = E[:, 0].max() - i0, E[:, 1].max() - j0
    T = np.zeros((dx + 1, dy + 1), dtype=complex)
    for (i, j), c in zip(E, C):
        T[i - i0, j - j0] += c
    return T, int(i0), int(j0)


def _fiber_grid(T, i0, j0, A, B, M):
    """rho and d(rho)/du1 on the grid A x B using Jensen in the first variable.

    T[i, j] is the coefficient of x^i y^j after shifting.
    """
    dx = T.shape[0] - 1
    top = T[dx]
    jensen_top = _univariate_jensen(top, B)  # mean log|c_top(y)| for each u2
    # half-step offset keeps nodes off roots lying on the circle at u2 = 0
    theta = 2 * np.pi * (np.arange(M) + 0.5) / M
    rho = np.empty((len(A), len(B)))
    rho_half = np.empty_like(rho)
    grad = np.empty_like(rho)
    tau = -np.asarray(A, dtype=float)
    jpow = np.arange(T.shape[1])
    for kb, u2 in enumerate(B):
        y = np.exp(-u2 + 1j * theta)
        Y = y[:, None] ** jpow[None, :]
        Cy = Y @ T.T  # (M, dx + 1) coefficients of x^i
        if dx == 0:
            val = np.zeros(len(A))
            cnt = np.zeros(len(A))
            val_h = val
        else:
            R = _poly_roots_batch(Cy)
            L = np.sort(np.log(np.abs(R) + 1e-300), axis=1)
            val, cnt = _interp_integrals(L, tau)
            val_h, _ = _interp_integrals(L[::2], tau)
        mean_log = -i0 * np.asarray(A) - j0 * u2 + jensen_top[kb] + val
        mean_log_h = -i0 * np.asarray(A) - j0 * u2 + jensen_top[kb] + val_h
        rho[:, kb] = -mean_log
        rho_half[:, kb] = -mean_log_h
        grad[:, kb] = i0 + cnt
    return rho, grad, np.abs(rho - rho_half)


def ronkin_arch_fiber(f, A, B, nodes=2048):
    """Archimedean Ronkin function and gradient on the tensor grid ``A x B`` (n = 2).

    Jensen's formula integrates exactly in the first variable for each node
    of the second; the remaining one-dimensional mean of the clipped
    log-moduli of the roots is integrated exactly for their piecewise-linear
    interpolant. Both variable orders are computed; their discrepancy is part
    of the reported error.

    Returns
    -------
    dict
        ``rho`` (|A|, |B|), ``grad`` (|A|, |B|, 2) and ``error`` (float).
    """
    if f.dim != 2:
        raise ValueError("fibre quadrature is implemented for n = 2")
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    T, i0, j0 = _orientation_data(f)
    rho_x, gx, ex = _fiber_grid(T, i0, j0, A, B, nodes)
    rho_y, gy, ey = _fiber_grid(T.T.copy(), j0, i0, B, A, nodes)
    rho_y, gy, ey = rho_y.T, gy.T, ey.T
    mono_x = np.count_nonzero(T[-1]) == 1
    mono_y = np.count_nonzero(T[:, -1]) == 1
    if mono_x and not mono_y:
        rho = rho_x
    elif mono_y and not mono_x:
        rho = rho_y
    else:
        rho = 0.5 * (rho_x + rho_y)
    err = float(max(np.max(np.abs(rho_x - rho_y)) if (mono_x and mono_y) else 0.0,
                    np.max(ex if mono_x or not mono_y else ey)))
    return {
        "rho": rho,
        "grad": np.stack([gx, gy], axis=-1),
        "error": err,
        "orientation_gap": float(np.max(np.abs(rho_x - rho_y))),
    }


# ---------------------------------------------------------------------------
# exact one-variable duals
# ---------------------------------------------------------------------------
def _dual_1d_points(coeffs):
    """Lifted points (k, value) of the Archimedean dual of sum_k c_k z^k."""
    c = np.asarray(coeffs, dtype=complex)
    nz = np.nonzero(c)[0]
    lo, hi = nz[0], nz[-1]
    c = c[lo : hi + 1]
    d = len(c) - 1
    if d == 0:
        return np.array([[lo]], float), np.array([math.log(abs(c[0]))])
    roots = np.roots(c[::-1])
    logs = np.sort(np.log(np.abs(roots)))[::-1]
    # rho(u) = lo*u - log|c_d| + sum_r min(-log|r|, u); dual value at lo + k is
    # log|c_d| plus the sum of the d - k largest log|r|
    pts = lo + np.arange(d + 1)
    vals = np.empty(d + 1)
    for k in range(d + 1):
        vals[k] = math.log(abs(c[-1])) + logs[: d - k].sum()
    return pts[:, None].astype(float), vals


def _collinear_dual(f):
    """Exact float dual for f supported on a line (n arbitrary)."""
    supp = np.array(f.support)
    m0 = supp[0]
    diffs = supp - m0
    nzrow = next(r for r in diffs if np.any(r))
    g = math.gcd(*[int(v) for v in nzrow])
    v = nzrow // g
    ks = [int(np.dot(r, v) // np.dot(v, v)) for r in diffs]
    kmin = min(ks)
    coeffs = np.zeros(max(ks) - kmin + 1, dtype=complex)
    for k, (_, c) in zip(ks, f.terms):
        coeffs[k - kmin] = complex(c) if isinstance(c, Cyclotomic) else float(Fraction(c))
    pts1, vals = _dual_1d_points(coeffs)
    base = m0 + kmin * v
    pts = base[None, :] + (pts1[:, 0] - 0)[:, None] * v[None, :]
    return PAConcave.lifted(pts, vals)


def _is_collinear(f):
    return f.newton_polytope.affine_dim <= 1


# ---------------------------------------------------------------------------
# Archimedean dual
# ---------------------------------------------------------------------------
def _default_radius(f):
    P = f.newton_polytope
    V = np.array([[float(c) for c in v] for v in P.vertices])
    diam = float(np.max(np.linalg.norm(V[:, None] - V[None], axis=-1)))
    logs = [abs(log_abs(c, INFINITY)) for _, c in f.terms]
    return max(2.0 * diam * (1.0 + max(logs)), 8.0)


def _warped_axis(R, size, center=0.0, warp=2.0):
    s = np.linspace(-1.0, 1.0, size)
    return center + R * np.sinh(warp * s) / np.sinh(warp)


def _edge_points(f):
    """Exact lifted points of the dual restricted to every edge of NP(f)."""
    P = f.newton_polytope
    pts, vals = [], []
    for a, b in P.halfspaces:
        on = [(e, c) for e, c in f.terms if sum(x * y for x, y in zip(a, e)) == b]
        if len(on) < 2:
            continue
        g = _collinear_dual(LaurentPoly(dict(on), f.dim))
        pts.append(np.asarray(g.points, float))
        vals.append(np.asarray(g.values, float))
    if not pts:
        return np.zeros((0, f.dim)), np.zeros(0)
    return np.vstack(pts), np.concatenate(vals)


def _tangent_hull(domain, U, rho, slack):
    """Lifted vertices of ``{(x, z): x in domain, z <= <u, x> - rho(u) + slack}``."""
    n = domain.dim
    H = np.array([[float(c) for c in a] + [-float(b)] for a, b in domain.halfspaces])
    # z - <u, x> + rho(u) - slack <= 0  ->  [-u, 1, rho - slack]
    T = np.column_stack([-U, np.ones(len(U)), rho - slack])
    V = np.array([[float(c) for c in v] for v in domain.vertices])
    zfloor = float(np.min(V @ U.T - rho[None, :])) - 10.0
    dom = np.column_stack([H[:, :n], np.zeros(len(H)), H[:, n]])
    floor = np.r_[np.zeros(n), -1.0, zfloor]
    halfspaces = np.vstack([T, dom, floor])
    # interior point: domain centroid, height just below the tangent minimum there
    c = V.mean(axis=0)
    zc = float(np.min(U @ c - rho + slack))
    interior = np.r_[c, 0.5 * (zc + zfloor)]
    hs = HalfspaceIntersection(halfspaces, interior)
    P = hs.intersections
    P = P[P[:, n] > zfloor + 1e-6]
    return PAConcave.lifted(P[:, :n], P[:, n])


def ronkin_dual_arch(f, resolution=81, nodes=2048, radius=None, warp=2.0):
    """Archimedean dual of the Ronkin function on NP(f).

    Monomials and polynomials with collinear support get an exact
    (float) PA dual from their roots. In the plane the dual is bracketed:

    * the lower function is the concave hull of the Fenchel graph points
      ``(grad rho(u), <u, grad rho(u)> - rho(u))`` over a u-net, together
      with the exact values on the edges of NP(f);
    * the upper function is the minimum of the tangent planes
      ``<u, x> - rho(u)`` over the same net, restricted to NP(f).

    Parameters
    ----------
    f : LaurentPoly
    resolution : int
        Net points per axis.
    nodes : int
        Quadrature nodes on each fibre circle.
    radius : float, optional
        Half-width of the u-net; defaults to
        ``max(2 diam (1 + max|log|alpha||), 8)``.
    warp : float
        ``sinh`` warping of the net towards its centre.
    """
    if f.is_zero():
        raise ValueError("zero polynomial")
    if f.is_monomial():
        (e, c), = f.terms
        fn = PAConcave.lifted(np.array([e], float), np.array([log_abs(c, INFINITY)]))
        return RonkinDual(INFINITY, fn, 1.0, {"method": "monomial", "error": 0.0})
    if f.dim == 1 or _is_collinear(f):
        return RonkinDual(INFINITY, _collinear_dual(f), 1.0, {"method": "roots", "error": 0.0})
    if f.dim != 2:
        raise NotImplementedError("Archimedean duals are implemented for n <= 2")
    # rescale by a rational vertex coefficient so c * f reuses the grid of f
    c = f.coefficient(f.newton_polytope.vertices[0])
    if not isinstance(c, Cyclotomic) and c != 1:
        c = Fraction(c)
        base = _cached_grid_dual(_fkey(f * (1 / c)), resolution, nodes, radius, warp)
        shift = math.log(abs(c))
        meta = dict(base.provenance, scale=str(c))
        return RonkinDual(INFINITY, base.function.shift(shift), 1.0, meta)
    return _cached_grid_dual(_fkey(f), resolution, nodes, radius, warp)


_FCACHE = {}


def _fkey(f):
    k = (f.dim, tuple((e, repr(c)) for e, c in f.terms))
    _FCACHE[k] = f
    return k


@lru_cache(maxsize=32)
def _cached_grid_dual(key, resolution, nodes, radius, warp):
    t0 = time.perf_counter()
    f = _FCACHE[key]
    R = _default_radius(f) if radius is None else float(radius)
    A = _warped_axis(R, resolution, warp=warp)
    data = ronkin_arch_fiber(f, A, A, nodes)
    rho, grad, err = data["rho"], data["grad"], data["error"]
    UU = np.stack(np.meshgrid(A, A, indexing="ij"), -1).reshape(-1, 2)
    rho_f = rho.reshape(-1)
    G = grad.reshape(-1, 2)
    P = f.newton_polytope
    Hs = np.array([[float(c) for c in a] for a, _ in P.halfspaces])
    hb = np.array([float(b) for _, b in P.halfspaces])
    inside = np.all(G @ Hs.T <= hb + 1e-12, axis=1)
    lo_pts = [G[inside]]
    lo_vals = [np.sum(UU[inside] * G[inside], axis=1) - rho_f[inside]]
    ep, ev = _edge_points(f)
    lo_pts.append(ep)
    lo_vals.append(ev)
    for e, c in f.terms:
        if e in set(P.vertices):
            lo_pts.append(np.array([e], float))
            lo_vals.append(np.array([log_abs(c, INFINITY)]))
    lo = PAConcave.lifted(np.vstack(lo_pts), np.concatenate(lo_vals))
    hi = _tangent_hull(P, UU, rho_f, 0.0)
    meta = {
        "method": "fibre-jensen",
        "resolution": resolution,
        "nodes": nodes,
        "radius": R,
        "warp": warp,
        "error": err,
        "orientation_gap": data["orientation_gap"],
        "seconds": time.perf_counter() - t0,
    }
    G = GridConcave(P, lo, hi, err, meta)
    return RonkinDual(INFINITY, G, 1.0, meta)


def ronkin_dual(f, place, **kwargs):
    """Dual of rho_{f,v} at any place."""
    if place.is_archimedean:
        return ronkin_dual_arch(f, **kwargs)
    return ronkin_dual_nonarch(f, place.p)
