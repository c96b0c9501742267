"""Piecewise-affine concave calculus and the mixed integral.

Conventions
-----------
A concave function on a bounded polytope is stored in *lifted* form: finitely
many points ``(m_i, c_i)`` whose upper concave hull over ``conv{m_i}`` is the
function. A concave function on all of R^n is stored as *pieces*
``u -> min_i(<m_i, u> + b_i)``. The Legendre-Fenchel dual is

    f^v(x) = inf_u (<u, x> - f(u)),

so the pieces ``(m_i, b_i)`` and the lifted points ``(m_i, -b_i)`` are dual to
each other and canonical forms map onto each other.

Exact inputs (ints and Fractions) give exact outputs. Any float input switches
the computation to floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
import math

import numpy as np
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError

from ._hull import (
    affine_rank,
    fan_triangulation,
    hull_facets,
    hull_vertices,
    scale_to_integers,
    simplex_volume,
)
from .lattice_geometry import LatticePolytope, minkowski_sum

__all__ = [
    "Estimate",
    "PAConcave",
    "GridConcave",
    "legendre_dual",
    "sup_convolution",
    "integrate",
    "mixed_integral",
    "perturbation_constant",
    "uniform_perturbation_bound",
]

_FLOAT_TOL = 1e-10


@dataclass(frozen=True)
class Estimate:
    """A real number with an absolute error bound."""

    value: float
    error: float = 0.0

    def __float__(self):
        return float(self.value)

    def __add__(self, other):
        o = as_estimate(other)
        return Estimate(float(self.value) + o.value, self.error + o.error)

    __radd__ = __add__

    def __neg__(self):
        return Estimate(-self.value, self.error)

    def __sub__(self, other):
        return self + (-as_estimate(other))

    def __mul__(self, k):
        return Estimate(self.value * float(k), self.error * abs(float(k)))

    __rmul__ = __mul__

    def contains(self, x, slack=0.0):
        return abs(float(x) - self.value) <= self.error + slack


def as_estimate(x):
    if isinstance(x, Estimate):
        return x
    return Estimate(float(x), 0.0)


def _is_exact_value(v):
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


def _exact_num(v):
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    raise TypeError


# ---------------------------------------------------------------------------
# hull back-ends
# ---------------------------------------------------------------------------
class _ExactUpper:
    """Exact upper hull of lifted points (integers after scaling)."""

    def __init__(self, points, values):
        self.n = len(points[0])
        ints_x, self.den_x = scale_to_integers(points)
        self.r, self.piv = affine_rank(ints_x)
        vden = math.lcm(*(Fraction(v).denominator for v in values))
        self.den_c = vden
        ints_c = [int(Fraction(v) * vden) for v in values]
        self.points, self.values = points, values
        self.ints_x = ints_x
        if self.r == 0:
            best = max(range(len(values)), key=lambda i: values[i])
            self.keep = [best]
            self.upper, self.vertical = [], []
            return
        proj = [tuple(p[c] for c in self.piv) for p in ints_x]
        self.proj = proj
        zmin = min(ints_c) - 1
        lifted = [p + (c,) for p, c in zip(proj, ints_c)]
        bottom = [p + (zmin,) for p in sorted(set(proj))]
        allpts = lifted + bottom
        facets = hull_facets(allpts)
        K = len(lifted)
        self.upper = [f for f in facets if f.normal[-1] > 0]
        self.vertical = [f for f in facets if f.normal[-1] == 0]
        verts = hull_vertices(allpts, facets)
        self.keep = sorted((i for i in verts if i < K), key=lambda i: points[i])
        self.K = K

    def evaluate(self, x):
        xs = [Fraction(c) * self.den_x for c in x]
        if self.r == 0:
            p = self.points[self.keep[0]]
            return Fraction(self.values[self.keep[0]]) if tuple(map(Fraction, p)) == tuple(map(Fraction, x)) else -math.inf
        if self.r < self.n:
            ints0 = self.ints_x[0]
            # membership in the affine span: solve through pivot coordinates
            rows = [tuple(Fraction(a - b) for a, b in zip(p, ints0)) for p in self.ints_x]
            target = [a - b for a, b in zip(xs, ints0)]
            if not _in_span(rows, target):
                return -math.inf
        z = tuple(xs[c] for c in self.piv)
        for f in self.vertical:
            if sum(a * b for a, b in zip(f.normal, z)) > f.offset:
                return -math.inf
        best = None
        for f in self.upper:
            v = (f.offset - sum(a * b for a, b in zip(f.normal, z))) / f.normal[-1]
            if best is None or v < best:
                best = v
        return best / self.den_c

    def integral(self):
        if self.r < self.n:
            return Fraction(0)
        total = Fraction(0)
        vals = self.values
        for f in self.upper:
            idx = sorted({self.proj[j]: j for j in f.support if j < self.K}.values())
            if len(idx) <= self.n:
                continue
            cell = [self.proj[j] for j in idx]
            if affine_rank(cell)[0] < self.n:
                continue
            for simp in fan_triangulation(cell):
                vol = simplex_volume([cell[k] for k in simp])
                mean = sum(Fraction(vals[idx[k]]) for k in simp) / (self.n + 1)
                total += vol * mean
        return total / Fraction(self.den_x) ** self.n

    def slopes(self):
        """Gradients of the upper facets in original coordinates."""
        out = []
        for f in self.upper:
            g = [Fraction(0)] * self.n
            for c, a in zip(self.piv, f.normal[:-1]):
                g[c] = Fraction(-a * self.den_x, f.normal[-1] * self.den_c)
            out.append(tuple(g))
        return out


def _in_span(rows, target):
    from ._hull import _echelon

    d = len(target)
    red, piv = _echelon([tuple(r) for r in rows if any(r)], d) if any(any(r) for r in rows) else ([], [])
    t = [Fraction(v) for v in target]
    for row, c in zip(red, piv):
        if t[c] != 0:
            f = t[c]
            t = [a - f * b for a, b in zip(t, row)]
    return all(v == 0 for v in t)


class _FloatUpper:
    """Floating-point upper hull of lifted points."""

    def __init__(self, X, c):
        X = np.asarray(X, dtype=float)
        c = np.asarray(c, dtype=float)
        self.n = X.shape[1]
        # keep the largest value per location
        order = np.lexsort(np.vstack([-c] + [X[:, k] for k in range(self.n - 1, -1, -1)]))
        Xs, cs = X[order], c[order]
        first = np.ones(len(Xs), dtype=bool)
        if len(Xs) > 1:
            first[1:] = np.any(Xs[1:] != Xs[:-1], axis=1)
        self.index = order[first]
        X, c = Xs[first], cs[first]
        self.X, self.c = X, c
        self.center = X.mean(axis=0)
        Y = X - self.center
        scale = max(1.0, float(np.abs(Y).max(initial=0.0)))
        if len(X) > 1:
            _, s, vt = np.linalg.svd(Y, full_matrices=False)
            r = int(np.sum(s > 1e-9 * scale * max(1.0, s[0] / scale)))
        else:
            r, vt = 0, np.zeros((0, self.n))
        self.r = r
        self.basis = vt[:r]
        self.planes = np.zeros((0, r + 2))
        self.simplices = np.zeros((0, r + 1), dtype=int)
        self.domain_eq = np.zeros((0, r + 1))
        if r == 0:
            self.keep = np.array([int(np.argmax(c))])
            return
        Z = Y @ self.basis.T
        self.Z = Z
        crange = float(c.max() - c.min())
        if r == 1:
            self._upper_1d(Z[:, 0], c)
            return
        try:
            dom = ConvexHull(Z)
        except QhullError:
            dom = ConvexHull(Z, qhull_options="QJ")
        dv = dom.vertices
        self.domain_eq = dom.equations
        bottom = np.column_stack([Z[dv], np.full(len(dv), c.min() - 1.0 - crange)])
        pts = np.vstack([np.column_stack([Z, c]), bottom])
        try:
            H = ConvexHull(pts)
        except QhullError:
            H = ConvexHull(pts, qhull_options="QJ")
        up = H.equations[:, -2] > 1e-12
        sims = H.simplices[up]
        self.simplices = sims
        # plane rows: (normal over Z, normal_z, offset)
        self.planes = H.equations[up]
        keep = np.unique(sims.ravel())
        self.keep = keep[keep < len(X)]

    def _upper_1d(self, z, c):
        order = np.lexsort((-c, z))
        hull = []
        for i in order:
            if hull and z[hull[-1]] == z[i]:
                continue
            while len(hull) >= 2:
                a, b = hull[-2], hull[-1]
                cross = (z[b] - z[a]) * (c[i] - c[a]) - (c[b] - c[a]) * (z[i] - z[a])
                if cross >= -1e-14 * (1 + abs(c[i])):
                    hull.pop()
                else:
                    break
            hull.append(i)
        self.keep = np.array(hull)
        self.simplices = np.array([[hull[k], hull[k + 1]] for k in range(len(hull) - 1)], dtype=int).reshape(-1, 2)
        zs = z[hull]
        self.domain_eq = np.array([[1.0, -zs.max()], [-1.0, zs.min()]])
        planes = []
        for a, b in self.simplices:
            slope = (c[b] - c[a]) / (z[b] - z[a])
            # -slope*z + 1*c - (c_a - slope*z_a) = 0  written as (n_z, n_c, off)
            nrm = math.hypot(slope, 1.0)
            planes.append([-slope / nrm, 1.0 / nrm, -(c[a] - slope * z[a]) / nrm])
        self.planes = np.array(planes).reshape(-1, 3)

    def evaluate(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.r == 0:
            same = np.all(np.abs(x - self.X[self.keep[0]]) <= 1e-9, axis=1)
            return np.where(same, self.c[self.keep[0]], -np.inf)
        Y = x - self.center
        Z = Y @ self.basis.T
        resid = np.linalg.norm(Y - Z @ self.basis, axis=1)
        out = np.full(len(x), -np.inf)
        inside = resid <= 1e-9 * max(1.0, float(np.abs(self.Z).max()))
        dom = self.domain_eq
        if len(dom):
            inside &= np.all(Z @ dom[:, :-1].T + dom[:, -1] <= 1e-9, axis=1)
        P = self.planes
        vals = -(Z @ P[:, :-2].T + P[:, -1]) / P[:, -2]
        out[inside] = vals[inside].min(axis=1)
        return out

    def integral(self):
        if self.r < self.n or len(self.simplices) == 0:
            return 0.0
        Z, c = self.Z, self.c
        S = self.simplices
        # drop bottom-point references (cannot appear in upper facets)
        S = S[np.all(S < len(Z), axis=1)]
        V = Z[S]  # (F, n+1, n)
        D = V[:, 1:, :] - V[:, :1, :]
        vol = np.abs(np.linalg.det(D)) / math.factorial(self.n)
        return float(np.sum(vol * c[S].mean(axis=1)))


# ---------------------------------------------------------------------------
# PAConcave
# ---------------------------------------------------------------------------
class PAConcave:
    """Piecewise-affine concave function.

    Use the constructors :meth:`lifted`, :meth:`from_pieces`, :meth:`zero`,
    :meth:`indicator` rather than ``__init__``.

    Attributes
    ----------
    dim : int
        Ambient dimension.
    kind : {"lifted", "pieces"}
        ``"lifted"`` functions live on a bounded polytope, ``"pieces"`` on R^n.
    exact : bool
        True when all data are ints or Fractions.
    """

    def __init__(self, dim, kind, points, values, exact):
        self.dim = dim
        self.kind = kind
        self._points = points
        self._values = values
        self.exact = exact

    # -- constructors -------------------------------------------------------
    @classmethod
    def lifted(cls, points, values, canonical=False):
        """Upper concave hull of ``{(points[i], values[i])}``."""
        if len(points) == 0:
            raise ValueError("need at least one lifted point")
        exact = all(_is_exact_value(v) for v in values) and all(
            _is_exact_value(c) for p in points for c in p
        )
        if exact:
            pts = [tuple(_exact_num(c) for c in p) for p in points]
            vals = [_exact_num(v) for v in values]
            dim = len(pts[0])
        else:
            pts = np.asarray(points, dtype=float).reshape(len(values), -1)
            vals = np.asarray(values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("lifted values must be finite")
            dim = pts.shape[1]
        f = cls(dim, "lifted", pts, vals, exact)
        if canonical:
            return f
        return f._canonical()

    @classmethod
    def from_pieces(cls, slopes, intercepts, domain=None):
        """``u -> min_i(<slopes[i], u> + intercepts[i])``, optionally restricted."""
        dual = cls.lifted(slopes, [-b if _is_exact_value(b) else -float(b) for b in intercepts])
        f = cls(dual.dim, "pieces", dual._points, _neg(dual._values, dual.exact), dual.exact)
        if domain is None:
            return f
        return _restrict_pieces(f, domain)

    @classmethod
    def zero(cls, P):
        return cls.lifted(list(P.vertices), [0] * len(P.vertices))

    @classmethod
    def constant(cls, P, c):
        return cls.lifted(list(P.vertices), [c] * len(P.vertices))

    @classmethod
    def indicator(cls, m, c=0):
        """``iota_{m} + c``: value c at m, minus infinity elsewhere."""
        return cls.lifted([tuple(m)], [c])

    @classmethod
    def affine(cls, slope, intercept):
        return cls.from_pieces([tuple(slope)], [intercept])

    # -- basic accessors ----------------------------------------------------
    @property
    def points(self):
        """Lifted points (or slopes, for pieces functions) in canonical order."""
        if self.exact:
            return tuple(self._points)
        return np.asarray(self._points)

    @property
    def values(self):
        """Lifted values (or intercepts, for pieces functions)."""
        if self.exact:
            return tuple(self._values)
        return np.asarray(self._values)

    def __len__(self):
        return len(self._values)

    @cached_property
    def domain(self):
        if self.kind == "pieces":
            return None
        if self.exact:
            return LatticePolytope(self._points)
        P = np.asarray(self._points, dtype=float)
        R = np.round(P)
        if np.all(np.abs(P - R) <= 1e-9):
            return LatticePolytope([tuple(int(c) for c in r) for r in R])
        raise AttributeError("float lifted function with non-lattice vertices has no exact domain")

    def to_float(self):
        if not self.exact:
            return self
        pts = np.array([[float(c) for c in p] for p in self._points], dtype=float).reshape(len(self._values), self.dim)
        vals = np.array([float(v) for v in self._values])
        return PAConcave(self.dim, self.kind, pts, vals, False)

    @cached_property
    def _upper(self):
        pts, vals = self._lift_data()
        if self.exact:
            return _ExactUpper(list(pts), list(vals))
        return _FloatUpper(pts, vals)

    def _lift_data(self):
        if self.kind == "lifted":
            return self._points, self._values
        return self._points, _neg(self._values, self.exact)

    def _canonical(self):
        up = self._upper
        if self.exact:
            keep = up.keep
            pts = tuple(self._points[i] for i in keep)
            vals = tuple(self._values[i] for i in keep)
        else:
            idx = up.index[up.keep]
            pts = np.asarray(self._points)[idx]
            vals = np.asarray(self._values)[idx]
            order = np.lexsort([pts[:, k] for k in range(self.dim - 1, -1, -1)])
            pts, vals = pts[order], vals[order]
        g = PAConcave(self.dim, self.kind, pts, vals, self.exact)
        return g

    # -- evaluation ---------------------------------------------------------
    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        """Value at ``x`` (minus infinity outside a bounded domain)."""
        if self.kind == "pieces":
            if self.exact and all(_is_exact_value(c) for c in x):
                return min(
                    sum(a * b for a, b in zip(s, x)) + v for s, v in zip(self._points, self._values)
                )
            P = np.asarray(self._points, dtype=float).reshape(len(self), self.dim)
            V = np.asarray([float(v) for v in self._values])
            X = np.atleast_2d(np.asarray(x, dtype=float))
            out = (X @ P.T + V).min(axis=1)
            return out if np.ndim(x) > 1 else float(out[0])
        if self.exact and np.ndim(x) == 1 and all(_is_exact_value(c) for c in x):
            return self._upper.evaluate(x)
        up = self.to_float()._upper
        out = up.evaluate(x)
        return out if np.ndim(x) > 1 else float(out[0])

    # -- algebra ------------------------------------------------------------
    def shift(self, c):
        """Add a constant."""
        if self.kind == "lifted":
            vals = _add_const(self._values, c, self.exact)
        else:
            vals = _add_const(self._values, c, self.exact)
        exact = self.exact and _is_exact_value(c)
        f = PAConcave(self.dim, self.kind, self._points, vals, exact)
        return f if exact or not self.exact else f.to_float()

    def translate(self, m):
        """``x -> f(x - m)`` for lifted functions."""
        if self.kind != "lifted":
            raise ValueError("translate applies to lifted functions")
        if self.exact:
            pts = tuple(tuple(a + b for a, b in zip(p, m)) for p in self._points)
            return PAConcave(self.dim, "lifted", pts, self._values, True)
        return PAConcave(self.dim, "lifted", np.asarray(self._points) + np.asarray(m, float), self._values, False)

    def __add__(self, other):
        if isinstance(other, PAConcave):
            return _pieces_sum(self, other)
        return self.shift(other)

    __radd__ = __add__

    def equals(self, other, tol=0.0):
        """Equality of canonical forms (exact, or up to ``tol`` for floats)."""
        if self.kind != other.kind or self.dim != other.dim or len(self) != len(other):
            return False
        if self.exact and other.exact and tol == 0:
            return self._points == other._points and self._values == other._values
        a, b = self.to_float(), other.to_float()
        return bool(
            np.allclose(a._points, b._points, atol=tol, rtol=0)
            and np.allclose(a._values, b._values, atol=tol, rtol=0)
        )

    def __eq__(self, other):
        return isinstance(other, PAConcave) and self.equals(other)

    __hash__ = None

    def dual(self):
        return legendre_dual(self)

    def integral(self):
        return integrate(self)

    def max_value(self):
        """Maximum of a lifted function (attained at a lifted point)."""
        if self.kind != "lifted":
            raise ValueError("maximum of a pieces function is unbounded in general")
        return max(self._values)

    def slopes(self):
        """Gradients of the affine pieces of a lifted function."""
        if self.exact:
            return self._upper.slopes()
        up = self._upper
        if up.r < self.n_:
            return []
        P = up.planes
        grads = -P[:, :-2] / P[:, -2:-1]
        return [tuple(g @ up.basis) for g in grads]

    @property
    def n_(self):
        return self.dim

    def lipschitz(self):
        s = self.slopes() if self.kind == "lifted" else [tuple(p) for p in self._points]
        if not len(s):
            return 0.0
        return max(math.sqrt(sum(float(c) ** 2 for c in g)) for g in s)

    def __repr__(self):
        pts = [tuple(p) for p in self.points]
        return f"PAConcave({self.kind}, n={self.dim}, {len(pts)} pts, exact={self.exact})"

    # -- serialization ------------------------------------------------------
    def to_json(self):
        def num(v):
            if isinstance(v, int):
                return v
            if isinstance(v, Fraction):
                return str(v)
            return float(v)

        if self.kind == "pieces":
            return {
                "domain": None,
                "pieces": [
                    {"slope": [num(c) for c in p], "intercept": num(v)}
                    for p, v in zip(self.points, self.values)
                ],
            }
        dom = self.domain.to_json() if self.exact else None
        return {
            "domain": dom,
            "lifted": [
                {"point": [num(c) for c in p], "value": num(v)} for p, v in zip(self.points, self.values)
            ],
        }

    @classmethod
    def from_json(cls, data):
        def num(v):
            if isinstance(v, (int, float)):
                return v
            return Fraction(v)

        if "lifted" in data:
            pts = [tuple(num(c) for c in e["point"]) for e in data["lifted"]]
            vals = [num(e["value"]) for e in data["lifted"]]
            f = cls.lifted(pts, vals)
            if data.get("domain") is not None:
                dom = LatticePolytope.from_json(data["domain"])
                if f.exact and f.domain != dom:
                    raise ValueError("lifted points do not span the stated domain")
            return f
        slopes = [tuple(num(c) for c in e["slope"]) for e in data["pieces"]]
        inter = [num(e["intercept"]) for e in data["pieces"]]
        dom = data.get("domain")
        return cls.from_pieces(slopes, inter, None if dom is None else LatticePolytope.from_json(dom))


def _neg(values, exact):
    if exact:
        return tuple(-v for v in values)
    return -np.asarray(values, dtype=float)


def _add_const(values, c, exact):
    if exact and _is_exact_value(c):
        return tuple(v + c for v in values)
    return np.asarray([float(v) for v in values]) + float(c)


def _pieces_sum(f, g):
    """Pointwise sum of two functions on R^n (pieces form)."""
    if f.kind != "pieces" or g.kind != "pieces":
        raise ValueError("pointwise sums are supported for functions on R^n; use sup_convolution on polytopes")
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if f.exact and g.exact:
        slopes = [tuple(a + b for a, b in zip(p, q)) for p in f._points for q in g._points]
        inter = [a + b for a in f._values for b in g._values]
    else:
        F, G = f.to_float(), g.to_float()
        slopes = (F._points[:, None, :] + G._points[None, :, :]).reshape(-1, f.dim)
        inter = (F._values[:, None] + G._values[None, :]).ravel()
    return PAConcave.from_pieces(slopes, inter)


def _restrict_pieces(f, domain):
    """Lifted form of a pieces function restricted to a polytope."""
    n = f.dim
    H = list(domain.halfspaces)
    S = [tuple(p) for p in f.points]
    B = list(f.values)
    if f.exact:
        cons = [tuple(-Fraction(c) for c in s) + (Fraction(1),) for s in S]
        rhs = [Fraction(b) for b in B]
        cons += [tuple(Fraction(c) for c in a) + (Fraction(0),) for a, _ in H]
        rhs += [Fraction(b) for _, b in H]
        found = {}
        for combo in combinations(range(len(cons)), n + 1):
            if not any(i < len(S) for i in combo):
                continue
            sol = _solve_exact([cons[i] for i in combo], [rhs[i] for i in combo])
            if sol is None:
                continue
            if all(sum(a * b for a, b in zip(cr, sol)) <= r for cr, r in zip(cons, rhs)):
                found[tuple(sol[:n])] = sol[n]
        pts = [tuple(_exact_num(c) for c in k) for k in found]
        return PAConcave.lifted(pts, [_exact_num(v) for v in found.values()])
    A = np.array([list(-np.asarray(s, float)) + [1.0] for s in S] + [[float(c) for c in a] + [0.0] for a, _ in H])
    b = np.array([float(v) for v in B] + [float(v) for _, v in H])
    lo = float(min(b[: len(S)])) - 1e3
    A2 = np.vstack([A, np.r_[np.zeros(n), -1.0]])
    b2 = np.r_[b, -lo]
    interior = _interior_point(A2, b2)
    hs = HalfspaceIntersection(np.column_stack([A2, -b2]), interior)
    V = hs.intersections
    V = V[V[:, -1] > lo + 1e-9]
    return PAConcave.lifted(V[:, :n], V[:, n])


def _interior_point(A, b):
    from scipy.optimize import linprog

    norms = np.linalg.norm(A, axis=1)
    c = np.zeros(A.shape[1] + 1)
    c[-1] = -1
    res = linprog(c, A_ub=np.column_stack([A, norms]), b_ub=b, bounds=[(None, None)] * A.shape[1] + [(0, None)])
    if res.status != 0 or res.x[-1] <= 1e-12:
        raise ValueError("restriction domain has empty interior")
    return res.x[:-1]


def _solve_exact(rows, rhs):
    n = len(rows)
    m = [list(r) + [v] for r, v in zip(rows, rhs)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [v * inv for v in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------
def legendre_dual(f):
    """Legendre-Fenchel dual ``x -> inf_u(<u, x> - f(u))``.

    A pieces function on R^n maps to a lifted function on the hull of its
    slopes, and conversely. Canonical forms correspond point for point, so
    ``legendre_dual(legendre_dual(f))`` reproduces ``f`` exactly.
    """
    if isinstance(f, GridConcave):
        raise TypeError("grid functions are dualized through their brackets")
    if f.kind == "pieces":
        return PAConcave(f.dim, "lifted", f._points, _neg(f._values, f.exact), f.exact)
    return PAConcave(f.dim, "pieces", f._points, _neg(f._values, f.exact), f.exact)


def sup_convolution(f, g):
    """``(f [+] g)(x) = sup_{x1 + x2 = x} f(x1) + g(x2)`` on lifted functions."""
    if isinstance(f, GridConcave) or isinstance(g, GridConcave):
        return GridConcave.combine(f, g)
    if f.kind != "lifted" or g.kind != "lifted":
        raise ValueError("sup-convolution is implemented for functions on polytopes")
    if f.dim != g.dim:
        raise ValueError("dimension mismatch")
    if f.exact and g.exact:
        if len(f) == 1:
            return g.translate(f._points[0]).shift(f._values[0])
        if len(g) == 1:
            return f.translate(g._points[0]).shift(g._values[0])
        if f.equals(g):
            pts = [tuple(2 * c for c in p) for p in f._points]
            return PAConcave.lifted(pts, [2 * v for v in f._values])
        pts = [tuple(a + b for a, b in zip(p, q)) for p in f._points for q in g._points]
        vals = [a + b for a in f._values for b in g._values]
        return PAConcave.lifted(pts, vals)
    F, G = f.to_float(), g.to_float()
    P = (F._points[:, None, :] + G._points[None, :, :]).reshape(-1, f.dim)
    V = (F._values[:, None] + G._values[None, :]).ravel()
    return PAConcave.lifted(P, V)


def integrate(f):
    """Integral over the domain (Lebesgue, lattice covolume one).

    Returns a Fraction for exact input, a float for float input and an
    :class:`Estimate` for grid functions.
    """
    if isinstance(f, GridConcave):
        return f.integral()
    if f.kind != "lifted":
        raise ValueError("cannot integrate over an unbounded domain")
    return f._upper.integral()


def _subset_sums(fs):
    """Sup-convolutions over all nonempty index subsets, built incrementally."""
    memo = {}
    for k in range(1, len(fs) + 1):
        for J in combinations(range(len(fs)), k):
            if k == 1:
                memo[J] = fs[J[0]]
            else:
                memo[J] = sup_convolution(memo[J[:-1]], fs[J[-1]])
    return memo


def mixed_integral(*fs):
    """Mixed integral of n + 1 concave functions on polytopes in R^n.

    ``MI(f_0..f_n) = sum_{J != {}} (-1)^(n+1-|J|) int_{Q_J} [+]_{j in J} f_j``.

    Returns a Fraction when every input is exact, otherwise an
    :class:`Estimate` whose error accounts for grid brackets.
    """
    if len(fs) == 1 and isinstance(fs[0], (list, tuple)):
        fs = tuple(fs[0])
    dims = {f.dim for f in fs}
    if len(dims) != 1:
        raise ValueError("dimension mismatch")
    n = dims.pop()
    if len(fs) != n + 1:
        raise ValueError(f"mixed integral in dimension {n} takes {n + 1} functions, got {len(fs)}")
    grids = [i for i, f in enumerate(fs) if isinstance(f, GridConcave)]
    if grids:
        lo = [f.lo if isinstance(f, GridConcave) else f for f in fs]
        hi = [f.hi if isinstance(f, GridConcave) else f for f in fs]
        a = float(_mi_pa(lo, n))
        b = float(_mi_pa(hi, n))
        band = 0.0
        for i in grids:
            others = [fs[j] for j in range(n + 1) if j != i]
            band += fs[i].value_error * float(_mv_of(others))
        lo_v, hi_v = min(a, b) - band, max(a, b) + band
        return Estimate(0.5 * (lo_v + hi_v), 0.5 * (hi_v - lo_v))
    out = _mi_pa(list(fs), n)
    if all(f.exact for f in fs):
        return out
    return Estimate(float(out), _float_error(fs, n))


def _mv_of(fs):
    from .lattice_geometry import mixed_volume

    polys = [f.domain for f in fs]
    return mixed_volume(*polys)


def _float_error(fs, n):
    scale = max(max(abs(float(v)) for v in f.values) for f in fs) + 1.0
    return 1e-9 * scale


def _mi_pa(fs, n):
    memo = _subset_sums(fs)
    total = 0
    for J, g in memo.items():
        total += (-1) ** (n + 1 - len(J)) * integrate(g)
    return total


def perturbation_constant(fs):
    """Constant C with ``|MI(f + eps) - MI(f)| <= C eps`` for sup-norm eps.

    ``C = (n + 1) * sum_J vol(Q_J)``, where ``Q_J`` is the Minkowski sum of
    the domains indexed by J.
    """
    n = fs[0].dim
    polys = [f.domain for f in fs]
    total = Fraction(0)
    for k in range(1, n + 2):
        for J in combinations(range(n + 1), k):
            S = polys[J[0]]
            for j in J[1:]:
                S = minkowski_sum(S, polys[j])
            total += S.volume
    return (n + 1) * total


def uniform_perturbation_bound(fs, perturbed, eps):
    """Check the stability bound for a perturbed family.

    Returns
    -------
    (delta, bound, ok) : tuple
        ``delta = |MI(perturbed) - MI(fs)|`` and ``bound = C * eps``.
    """
    a = mixed_integral(*fs)
    b = mixed_integral(*perturbed)
    delta = abs(float(as_estimate(b).value) - float(as_estimate(a).value))
    bound = float(perturbation_constant(fs)) * float(eps)
    return delta, bound, delta <= bound * (1 + 1e-9) + 1e-12


# ---------------------------------------------------------------------------
# GridConcave
# ---------------------------------------------------------------------------
class GridConcave:
    """Numeric concave function on a polytope carried by a lower/upper bracket.

    ``lo`` and ``hi`` are float lifted PA functions on the same domain with
    ``lo - value_error <= f <= hi + value_error``. Because the mixed integral
    is monotone in every slot, evaluating it on the brackets bounds the truth.

    Parameters
    ----------
    domain : LatticePolytope
    lo, hi : PAConcave
    value_error : float
        Uniform uncertainty of the sampled values.
    meta : dict, optional
        Provenance (resolution, budget, seed, timings).
    """

    def __init__(self, domain, lo, hi, value_error=0.0, meta=None):
        self.domain = domain
        self.lo = lo.to_float()
        self.hi = hi.to_float()
        self.value_error = float(value_error)
        self.meta = dict(meta or {})
        self.dim = domain.dim
        self.exact = False
        self.kind = "lifted"

    @classmethod
    def sample(cls, f, domain, resolution=64, lipschitz=None):
        """Sample a concave callable on a lattice grid of spacing 1/resolution.

        The lower bracket is the concave hull of the samples; the upper one
        adds ``2 * L * h * sqrt(n)`` with ``L`` the Lipschitz bound.
        """
        if lipschitz is None:
            lipschitz = f.lipschitz() if isinstance(f, PAConcave) else None
        if lipschitz is None:
            raise ValueError("a Lipschitz bound is required")
        n = domain.dim
        V = np.array([[float(c) for c in v] for v in domain.vertices])
        lo, hi = V.min(axis=0), V.max(axis=0)
        h = 1.0 / resolution
        axes = [np.arange(np.floor(a * resolution), np.ceil(b * resolution) + 1) * h for a, b in zip(lo, hi)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
        A = np.array([[float(c) for c in a] for a, _ in domain.halfspaces])
        b = np.array([float(v) for _, v in domain.halfspaces])
        grid = grid[np.all(grid @ A.T <= b + 1e-12, axis=1)]
        pts = np.vstack([grid, V])
        vals = np.asarray(f(pts) if not isinstance(f, PAConcave) else f.evaluate(pts), dtype=float)
        low = PAConcave.lifted(pts, vals)
        band = 2.0 * float(lipschitz) * h * math.sqrt(n)
        return cls(domain, low, low.shift(band), 0.0, {"resolution": resolution, "band": band})

    @classmethod
    def combine(cls, f, g):
        flo = f.lo if isinstance(f, GridConcave) else f
        fhi = f.hi if isinstance(f, GridConcave) else f
        glo = g.lo if isinstance(g, GridConcave) else g
        ghi = g.hi if isinstance(g, GridConcave) else g
        err = (f.value_error if isinstance(f, GridConcave) else 0.0) + (
            g.value_error if isinstance(g, GridConcave) else 0.0
        )
        return cls(minkowski_sum(_domain(f), _domain(g)), sup_convolution(flo, glo), sup_convolution(fhi, ghi), err)

    def evaluate(self, x):
        a = self.lo.evaluate(x)
        b = self.hi.evaluate(x)
        return 0.5 * (np.asarray(a) + np.asarray(b))

    __call__ = evaluate

    def bracket(self, x):
        return self.lo.evaluate(x) - self.value_error, self.hi.evaluate(x) + self.value_error

    def integral(self):
        a = float(integrate(self.lo))
        b = float(integrate(self.hi))
        vol = float(self.domain.volume)
        lo_v, hi_v = a - self.value_error * vol, b + self.value_error * vol
        return Estimate(0.5 * (lo_v + hi_v), 0.5 * (hi_v - lo_v))

    def max_value(self):
        return Estimate(
            0.5 * (float(self.lo.max_value()) + float(self.hi.max_value())),
            0.5 * (float(self.hi.max_value()) - float(self.lo.max_value())) + self.value_error,
        )

    def shift(self, c):
        return GridConcave(self.domain, self.lo.shift(c), self.hi.shift(c), self.value_error, self.meta)

    def __repr__(self):
        return f"GridConcave(n={self.dim}, lo={len(self.lo)} pts, hi={len(self.hi)} pts, err={self.value_error:.2e})"


def _domain(f):
    return f.domain
