"""Exact lattice polytopes: Minkowski sums, volumes, mixed volumes, support values.

Volumes use the Lebesgue measure for which the integer lattice has covolume
one, so the unit simplex in the plane has volume 1/2 and the mixed volume is
normalized by ``MV(Q, ..., Q) = n! vol(Q)``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
import math

from ._hull import (
    affine_rank,
    fan_triangulation,
    hull_facets,
    hull_vertices,
    scale_to_integers,
    simplex_volume,
)

__all__ = [
    "LatticePolytope",
    "minkowski_sum",
    "normalized_volume",
    "mixed_volume",
    "support_value",
    "unit_simplex",
    "unit_cube",
]


def _exact(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(c, int):
        return c
    f = Fraction(c)
    return f.numerator if f.denominator == 1 else f


class LatticePolytope:
    """Convex hull of finitely many rational points in R^n.

    Parameters
    ----------
    points : iterable of sequences
        Generating points. Ints, Fractions and exact decimal strings are
        accepted; only the extreme points are kept.
    dim : int, optional
        Ambient dimension, required when ``points`` is empty-looking.

    Notes
    -----
    Instances are immutable. Equality compares canonical (lexicographically
    sorted) vertex lists.
    """

    __slots__ = ("_dim", "_vertices", "__dict__")

    def __init__(self, points, dim=None):
        pts = [tuple(_exact(c) for c in p) for p in points]
        if not pts:
            raise ValueError("a polytope needs at least one point")
        n = len(pts[0]) if dim is None else dim
        if any(len(p) != n for p in pts):
            raise ValueError("points of mixed dimension")
        self._dim = n
        self._vertices = _canonical_vertices(sorted(set(pts)))

    # construction helpers -------------------------------------------------
    @classmethod
    def point(cls, m):
        return cls([tuple(m)])

    @property
    def dim(self):
        """Ambient dimension n."""
        return self._dim

    @property
    def vertices(self):
        """Canonical tuple of extreme points, sorted lexicographically."""
        return self._vertices

    @cached_property
    def affine_dim(self):
        ints, _ = scale_to_integers(self._vertices)
        return affine_rank(ints)[0]

    @cached_property
    def halfspaces(self):
        """Inequalities ``(a, b)`` meaning ``<a, x> <= b`` that cut out the polytope.

        Lower-dimensional polytopes also get a pair of opposite inequalities
        per defining equation of their affine span.
        """
        ints, den = scale_to_integers(self._vertices)
        n = self._dim
        r, piv = affine_rank(ints)
        out = []
        p0 = ints[0]
        if r < n:
            diffs = [tuple(a - b for a, b in zip(p, p0)) for p in ints[1:]]
            for eq in _span_equations(diffs, n, piv):
                b = Fraction(sum(a * x for a, x in zip(eq, p0)), den)
                out.append((eq, b))
                out.append((tuple(-a for a in eq), -b))
        if r == 0:
            return tuple(out)
        proj = [tuple(p[c] for c in piv) for p in ints]
        for f in hull_facets(proj):
            a = [0] * n
            for c, v in zip(piv, f.normal):
                a[c] = v
            out.append((tuple(a), Fraction(f.offset, den)))
        return tuple(out)

    def contains(self, x):
        x = tuple(Fraction(c) for c in x)
        return all(sum(a * c for a, c in zip(av, x)) <= b for av, b in self.halfspaces)

    @cached_property
    def volume(self):
        return normalized_volume(self)

    def support_value(self, u):
        return support_value(self, u)

    def translate(self, m):
        return LatticePolytope([tuple(a + b for a, b in zip(v, m)) for v in self._vertices])

    def scale(self, k):
        return LatticePolytope([tuple(k * a for a in v) for v in self._vertices])

    def __add__(self, other):
        return minkowski_sum(self, other)

    def __eq__(self, other):
        return isinstance(other, LatticePolytope) and self._vertices == other._vertices

    def __hash__(self):
        return hash(self._vertices)

    def __repr__(self):
        return f"LatticePolytope({[list(v) for v in self._vertices]})"

    def lattice_points(self):
        """All integer points of the polytope (small polytopes only)."""
        lo = [math.floor(min(v[i] for v in self._vertices)) for i in range(self._dim)]
        hi = [math.ceil(max(v[i] for v in self._vertices)) for i in range(self._dim)]
        from itertools import product

        return [p for p in product(*(range(a, b + 1) for a, b in zip(lo, hi))) if self.contains(p)]

    def to_json(self):
        return [[_json_num(c) for c in v] for v in self._vertices]

    @classmethod
    def from_json(cls, data):
        return cls([tuple(_parse_num(c) for c in v) for v in data])


def _json_num(c):
    if isinstance(c, int):
        return c
    return str(c)


def _parse_num(c):
    if isinstance(c, (int, Fraction)):
        return c
    if isinstance(c, float):
        if not c.is_integer():
            raise ValueError(f"non-integral float coordinate {c!r}; pass a string")
        return int(c)
    return Fraction(c)


def _span_equations(diffs, n, piv):
    """Integer normals of the hyperplanes containing the affine span."""
    from ._hull import _echelon

    red, pv = _echelon(diffs, n) if diffs else ([], [])
    eqs = []
    for free in (c for c in range(n) if c not in pv):
        vec = [Fraction(0)] * n
        vec[free] = Fraction(1)
        for row, c in zip(red, pv):
            vec[c] = -row[free]
        den = math.lcm(*(v.denominator for v in vec))
        eqs.append(tuple(int(v * den) for v in vec))
    return eqs


def _canonical_vertices(pts):
    ints, den = scale_to_integers(pts)
    r, piv = affine_rank(ints)
    if r <= 0:
        return (pts[0],)
    proj = [tuple(p[c] for c in piv) for p in ints]
    idx = hull_vertices(proj)
    return tuple(sorted(pts[i] for i in idx))


def _check_dims(*polys):
    dims = {P.dim for P in polys}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def minkowski_sum(P, Q):
    """Canonical hull of ``{p + q}`` over the vertices of P and Q."""
    _check_dims(P, Q)
    return LatticePolytope(
        [tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices]
    )


def normalized_volume(P):
    """Exact Lebesgue volume (lattice covolume 1); 0 for lower-dimensional P."""
    n = P.dim
    verts = P.vertices
    ints, den = scale_to_integers(verts)
    r, _ = affine_rank(ints)
    if r < n:
        return Fraction(0)
    total = Fraction(0)
    for simp in fan_triangulation(ints):
        total += simplex_volume([ints[i] for i in simp])
    return total / den**n


def mixed_volume(*polys):
    """Mixed volume by inclusion-exclusion over nonempty subsets.

    Examples
    --------
    >>> mixed_volume(unit_simplex(2), unit_simplex(2))
    Fraction(1, 1)
    """
    if len(polys) == 1 and isinstance(polys[0], (list, tuple)):
        polys = tuple(polys[0])
    n = _check_dims(*polys)
    if len(polys) != n:
        raise ValueError(f"mixed volume in dimension {n} needs {n} polytopes, got {len(polys)}")
    total = Fraction(0)
    for k in range(1, n + 1):
        sign = (-1) ** (n - k)
        for J in combinations(range(n), k):
            S = polys[J[0]]
            for j in J[1:]:
                S = minkowski_sum(S, polys[j])
            total += sign * S.volume
    return total


def support_value(P, u):
    """``min`` over the vertices of ``<u, x>``."""
    if len(u) != P.dim:
        raise ValueError("dimension mismatch")
    u = [Fraction(c) if not isinstance(c, float) else c for c in u]
    return min(sum(a * b for a, b in zip(u, v)) for v in P.vertices)


def unit_simplex(n):
    pts = [tuple([0] * n)] + [tuple(int(i == j) for i in range(n)) for j in range(n)]
    return LatticePolytope(pts)


def unit_cube(n):
    from itertools import product

    return LatticePolytope(list(product((0, 1), repeat=n)))
