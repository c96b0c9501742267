"""Exact convex-hull kernel on integer point sets.

Everything here works on tuples of Python ints. Callers scale rational data
to a common denominator first. Qhull proposes candidate facets in floating
point and every candidate is re-derived and validated in exact arithmetic, so
a wrong float answer triggers a brute-force fallback instead of a wrong result.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from itertools import combinations
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

__all__ = [
    "Facet",
    "affine_rank",
    "integer_nullvector",
    "hull_facets",
    "hull_vertices",
    "fan_triangulation",
    "simplex_volume",
    "bareiss_det",
    "scale_to_integers",
]


class Facet:
    """Valid inequality ``<normal, x> <= offset`` with the indices it touches."""

    __slots__ = ("normal", "offset", "support")

    def __init__(self, normal, offset, support):
        self.normal = normal
        self.offset = offset
        self.support = support

    def __repr__(self):
        return f"Facet({self.normal}, {self.offset}, n={len(self.support)})"


def scale_to_integers(rows):
    """Return ``(int_rows, den)`` with ``int_rows = den * rows`` exactly."""
    den = 1
    for r in rows:
        for c in r:
            if not isinstance(c, int):
                den = math.lcm(den, Fraction(c).denominator)
    if den == 1:
        return [tuple(int(c) for c in r) for r in rows], 1
    return [tuple(int(Fraction(c) * den) for c in r) for r in rows], den


def bareiss_det(mat):
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _echelon(rows, ncols):
    """Row-reduce integer rows over Q; return (reduced rows, pivot columns)."""
    m = [[Fraction(c) for c in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def affine_rank(points):
    """Affine rank of integer points and pivot coordinates spanning it.

    Projecting onto the returned pivot coordinates is injective on the affine
    span, so hull questions can be answered in that lower dimension.
    """
    if not points:
        return -1, []
    p0 = points[0]
    d = len(p0)
    diffs = [tuple(a - b for a, b in zip(p, p0)) for p in points[1:]]
    diffs = [v for v in diffs if any(v)]
    if not diffs:
        return 0, []
    piv = _int_pivots(diffs, d)
    return len(piv), piv


def _int_pivots(rows, ncols):
    """Pivot columns of integer rows by fraction-free elimination."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, len(m)):
            f = m[i][c]
            if f:
                row = [p * a - f * b for a, b in zip(m[i], m[r])]
                g = reduce(math.gcd, row, 0)
                m[i] = [v // g for v in row] if g > 1 else row
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return pivots


def integer_nullvector(rows, d):
    """Primitive integer vector spanning the kernel of ``rows`` (d - 1 rows).

    Computed from signed maximal minors; returns None when the kernel is not
    one-dimensional.
    """
    rows = [list(r) for r in rows]
    vec = []
    for i in range(d):
        minor = [[v for j, v in enumerate(r) if j != i] for r in rows]
        vec.append((-1) ** i * (bareiss_det(minor) if d > 1 else 1))
    g = reduce(math.gcd, vec, 0)
    if g == 0:
        return None
    return tuple(v // g for v in vec)


def _dots(normals, points):
    """Exact matrix of <normal_i, point_j>, vectorised when ints are small."""
    big = max(
        (max((abs(c) for c in v), default=0) for v in normals), default=0
    ) * max((max((abs(c) for c in p), default=0) for p in points), default=0)
    if big * max(len(points[0]), 1) < 2**62:
        return np.asarray(normals, dtype=np.int64) @ np.asarray(points, dtype=np.int64).T
    return np.array(
        [[sum(a * b for a, b in zip(v, p)) for p in points] for v in normals],
        dtype=object,
    )


def _finalize(cands, points):
    """Validate candidate (normal, offset) pairs exactly and attach supports."""
    if not cands:
        return None
    normals = [c[0] for c in cands]
    offsets = [c[1] for c in cands]
    vals = _dots(normals, points)
    facets = []
    for i, (n, b) in enumerate(zip(normals, offsets)):
        row = vals[i]
        if any(v > b for v in row):
            return None
        support = frozenset(j for j, v in enumerate(row) if v == b)
        facets.append(Facet(n, b, support))
    return facets


def _brute_force_facets(points):
    d = len(points[0])
    uniq = sorted(set(points))
    if math.comb(len(uniq), d) > 200000:
        raise RuntimeError("hull fallback too large")
    seen = {}
    for combo in combinations(uniq, d):
        rows = [tuple(a - b for a, b in zip(p, combo[0])) for p in combo[1:]]
        n = integer_nullvector(rows, d)
        if n is None:
            continue
        b = sum(a * x for a, x in zip(n, combo[0]))
        vals = [sum(a * x for a, x in zip(n, p)) for p in uniq]
        if all(v <= b for v in vals):
            seen[(n, b)] = None
        elif all(v >= b for v in vals):
            seen[(tuple(-a for a in n), -b)] = None
    facets = _finalize(list(seen), points)
    if facets is None:  # pragma: no cover - exact construction cannot fail
        raise RuntimeError("exact hull validation failed")
    return facets


def hull_facets(points):
    """Facets of the hull of full-dimensional integer points.

    Parameters
    ----------
    points : list of tuple of int
        Points of affine rank equal to their length ``d``.

    Returns
    -------
    list of Facet
        Each facet normal is a primitive integer vector pointing outward.
    """
    d = len(points[0])
    if d == 1:
        xs = [p[0] for p in points]
        hi, lo = max(xs), min(xs)
        return [
            Facet((1,), hi, frozenset(i for i, x in enumerate(xs) if x == hi)),
            Facet((-1,), -lo, frozenset(i for i, x in enumerate(xs) if x == lo)),
        ]
    uniq = sorted(set(points))
    if len(uniq) <= d + 1:
        return _brute_force_facets(points)
    arr = np.asarray(uniq, dtype=float)
    center = arr.mean(axis=0)
    try:
        hull = ConvexHull(arr - center)
    except QhullError:
        return _brute_force_facets(points)
    cands = {}
    for simplex, eq in zip(hull.simplices, hull.equations):
        verts = [uniq[i] for i in simplex]
        rows = [tuple(a - b for a, b in zip(p, verts[0])) for p in verts[1:]]
        n = integer_nullvector(rows, d)
        if n is None:
            continue
        if float(np.dot(n, eq[:d])) < 0:
            n = tuple(-a for a in n)
        b = sum(a * x for a, x in zip(n, verts[0]))
        cands[(n, b)] = None
    facets = _finalize(list(cands), points)
    if facets is None:
        return _brute_force_facets(points)
    return facets


def hull_vertices(points, facets=None):
    """Indices (into ``points``) of the extreme points, one per location."""
    d = len(points[0])
    if facets is None:
        facets = hull_facets(points)
    incident = {}
    for f in facets:
        for j in f.support:
            incident.setdefault(j, []).append(f.normal)
    seen = set()
    out = []
    for j in sorted(incident, key=lambda k: points[k]):
        if points[j] in seen:
            continue
        normals = incident[j]
        if len(normals) >= d and (d == 1 or _rank(normals) == d):
            out.append(j)
            seen.add(points[j])
    return out


def _rank(rows):
    return len(_int_pivots(rows, len(rows[0])))


def simplex_volume(verts):
    """Exact Lebesgue volume of an integer simplex given by d + 1 vertices."""
    d = len(verts[0])
    rows = [[a - b for a, b in zip(v, verts[0])] for v in verts[1:]]
    return Fraction(abs(bareiss_det(rows)), math.factorial(d))


def fan_triangulation(points, idx=None):
    """Triangulate the hull of full-dimensional integer points.

    The fan is taken from the lexicographically smallest vertex; facets not
    containing it are triangulated recursively inside their affine span.

    Returns
    -------
    list of tuple of int
        Each simplex is a tuple of ``d + 1`` indices into ``points``.
    """
    if idx is None:
        idx = list(range(len(points)))
    sub = [points[i] for i in idx]
    d = len(sub[0])
    if d == 1:
        xs = [p[0] for p in sub]
        return [(idx[xs.index(min(xs))], idx[xs.index(max(xs))])]
    facets = hull_facets(sub)
    verts = hull_vertices(sub, facets)
    apex = min(verts, key=lambda k: sub[k])
    apex_pt = sub[apex]
    out = []
    for f in facets:
        if apex in f.support or any(sub[j] == apex_pt for j in f.support):
            continue
        fidx = sorted({sub[j]: j for j in f.support}.values())
        fpts = [sub[j] for j in fidx]
        _, piv = affine_rank(fpts)
        proj = [tuple(p[c] for c in piv) for p in fpts]
        for simp in fan_triangulation(proj):
            out.append((idx[apex],) + tuple(idx[fidx[k]] for k in simp))
    return out
