"""Adelic height predictions for toric varieties.

All three height functions (torus, hypersurface and limit heights) are the
same adelic sum ``sum_v MI(roofs at v, Ronkin duals at v)`` with different
numbers of Ronkin slots, and they share one implementation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .concave import Estimate, GridConcave, PAConcave, as_estimate, mixed_integral
from .laurent import LaurentPoly
from .lattice_geometry import LatticePolytope, mixed_volume
from .ronkin import INFINITY, Place, RonkinDual, ronkin_dual

__all__ = [
    "MetrizedToricDivisor",
    "HeightReport",
    "PlaceTerm",
    "relevant_places",
    "torus_height",
    "hypersurface_height",
    "limit_height",
    "degree_prediction",
]


class MetrizedToricDivisor:
    """Toric divisor with a concave roof function at finitely many places.

    Parameters
    ----------
    polytope : LatticePolytope
    roofs : dict, optional
        ``Place -> PAConcave | GridConcave | RonkinDual``. Unlisted places
        carry the zero function.
    label : str
        ``"canonical"``, ``"ronkin"`` or ``"custom"``.
    """

    def __init__(self, polytope, roofs=None, label="custom"):
        if not isinstance(polytope, LatticePolytope):
            polytope = LatticePolytope(polytope)
        self.polytope = polytope
        self.roofs = dict(roofs or {})
        self.label = label
        for v, r in self.roofs.items():
            fn = r.function if isinstance(r, RonkinDual) else r
            if fn.domain != polytope:
                raise ValueError(f"roof at {v} is not defined on the divisor polytope")
        if label == "canonical" and self.roofs:
            raise ValueError("canonical divisors have zero roofs")

    @classmethod
    def canonical(cls, polytope):
        return cls(polytope, {}, "canonical")

    @classmethod
    def ronkin(cls, f, **arch_options):
        """Divisor on NP(f) whose roofs are the Ronkin duals of f."""
        places = [INFINITY] + [Place(p) for p in sorted(f.prime_support())]
        roofs = {}
        for v in places:
            roofs[v] = ronkin_dual(f, v, **(arch_options if v.is_archimedean else {}))
        return cls(f.newton_polytope, roofs, "ronkin")

    @property
    def dim(self):
        return self.polytope.dim

    def places(self):
        return sorted(self.roofs)

    def roof(self, place):
        """Roof at a place as ``(function, unit)``; zero if unlisted."""
        r = self.roofs.get(place)
        if r is None:
            return PAConcave.zero(self.polytope), None
        if isinstance(r, RonkinDual):
            return r.function, r.unit
        return r, 1.0

    def to_json(self):
        roofs = {}
        for v, r in self.roofs.items():
            fn = r.real_function() if isinstance(r, RonkinDual) else r
            if isinstance(fn, GridConcave):
                raise ValueError("grid roofs are not serializable")
            roofs[str(v)] = fn.to_json()
        return {"polytope": self.polytope.to_json(), "label": self.label, "roofs": roofs}

    @classmethod
    def from_json(cls, data):
        P = LatticePolytope.from_json(data["polytope"])
        roofs = {Place.parse(k): PAConcave.from_json(v) for k, v in data.get("roofs", {}).items()}
        label = data.get("label", "custom" if roofs else "canonical")
        return cls(P, roofs, label)

    def __repr__(self):
        return f"MetrizedToricDivisor({self.label}, vertices={self.polytope.vertices}, places={[str(v) for v in self.places()]})"


@dataclass(frozen=True)
class PlaceTerm:
    """Contribution ``n_v * MI`` of one place.

    ``exact`` is the coefficient of ``log p`` (or the value itself at
    infinity) when the contribution is known exactly.
    """

    place: Place
    value: float
    error: float
    exact: Fraction | None = None

    def to_json(self):
        out = {"place": str(self.place), "value": self.value, "error": self.error}
        if self.exact is not None:
            out["exact"] = str(self.exact) + ("" if self.place.is_archimedean else f"*log({self.place.p})")
        return out


@dataclass(frozen=True)
class HeightReport:
    """Per-place contributions, their sum and the summed error."""

    terms: tuple
    total: float
    error: float
    kind: str = "height"
    meta: dict = field(default_factory=dict)

    @property
    def places(self):
        return [t.place for t in self.terms]

    def estimate(self):
        return Estimate(self.total, self.error)

    def agrees_with(self, value, tol):
        """``|total - value| <= tol``; refuses tolerances below the report's own error."""
        if tol < self.error:
            raise ValueError(f"tolerance {tol:g} is tighter than the report error {self.error:g}")
        return abs(self.total - float(value)) <= tol

    def to_json(self):
        return {
            "kind": self.kind,
            "total": self.total,
            "error": self.error,
            "places": [str(v) for v in self.places],
            "terms": [t.to_json() for t in self.terms],
            "meta": self.meta,
        }


def relevant_places(divisors, laurents):
    """Places where the adelic summand can be nonzero.

    The Archimedean place, every prime in the numerator or denominator of
    some coefficient, and every place carrying a roof.
    """
    places = {INFINITY}
    for f in laurents:
        places.update(Place(p) for p in f.prime_support())
    for D in divisors:
        places.update(D.roofs)
    return sorted(places)


def _as_divisor(D):
    if isinstance(D, MetrizedToricDivisor):
        return D
    return MetrizedToricDivisor.canonical(D)


def _point_value(fn):
    """Value at the point if the function lives on a single point, else None."""
    if isinstance(fn, PAConcave) and fn.kind == "lifted" and fn.domain.affine_dim == 0:
        return max(fn.values)
    return None


def _place_term(place, slots, domains):
    """MI of the slots ``[(function, unit)]`` at one place."""
    units = {u for _, u in slots if u is not None}
    exact = all(isinstance(fn, PAConcave) and fn.exact for fn, _ in slots) and len(units) <= 1
    unit = units.pop() if exact and units else 1.0
    # a point slot reduces the mixed integral to a multiple of a mixed volume
    for i, (fn, u) in enumerate(slots):
        c = _point_value(fn)
        if c is not None:
            mv = mixed_volume(*[domains[j] for j in range(len(slots)) if j != i])
            if exact:
                coeff = Fraction(c) * mv
                return PlaceTerm(place, float(coeff) * unit, 0.0, coeff)
            scale = 1.0 if u is None else u
            return PlaceTerm(place, float(c) * scale * float(mv), 0.0, None)
    if exact:
        coeff = mixed_integral(*[fn for fn, _ in slots])
        return PlaceTerm(place, float(coeff) * unit, 0.0, coeff)
    fns = []
    for fn, u in slots:
        if u not in (None, 1.0):
            fn = PAConcave.lifted(fn.to_float().points, np.asarray(fn.to_float().values) * u)
        fns.append(fn)
    est = as_estimate(mixed_integral(*fns))
    return PlaceTerm(place, float(est.value), float(est.error), None)


def _adelic_sum(divisors, laurents, arch_options=None, kind="height"):
    divisors = [_as_divisor(D) for D in divisors]
    laurents = list(laurents)
    slots_n = len(divisors) + len(laurents)
    dims = {D.dim for D in divisors} | {f.dim for f in laurents}
    if len(dims) != 1:
        raise ValueError("dimension mismatch")
    n = dims.pop()
    if slots_n != n + 1:
        raise ValueError(f"need {n + 1} divisors and polynomials in dimension {n}, got {slots_n}")
    arch_options = dict(arch_options or {})
    domains = [D.polytope for D in divisors] + [f.newton_polytope for f in laurents]
    terms = []
    for v in relevant_places(divisors, laurents):
        slots = [D.roof(v) for D in divisors]
        for f in laurents:
            rd = ronkin_dual(f, v, **(arch_options if v.is_archimedean else {}))
            slots.append((rd.function, rd.unit))
        terms.append(_place_term(v, slots, domains))
    total = math.fsum(t.value for t in terms)
    error = math.fsum(t.error for t in terms)
    return HeightReport(tuple(terms), total, error, kind, {"dim": n, "arch_options": arch_options})


def torus_height(*divisors, arch_options=None):
    """Height of the toric variety: ``sum_v MI(roofs at v)``."""
    return _adelic_sum(divisors, [], arch_options, "torus")


def hypersurface_height(f, *divisors, arch_options=None):
    """Height of the hypersurface ``Z(f)`` in the torus: n divisors plus one Ronkin slot."""
    return _adelic_sum(divisors, [f], arch_options, "hypersurface")


def limit_height(laurents, divisors, arch_options=None):
    """Predicted limit height of twisted complete intersections.

    ``sum_v MI(roofs of divisors, Ronkin duals of f_1..f_k)``.

    Parameters
    ----------
    laurents : sequence of LaurentPoly
    divisors : sequence of MetrizedToricDivisor or LatticePolytope
        Bare polytopes get canonical (zero) roofs.
    arch_options : dict, optional
        Forwarded to the Archimedean dual (``resolution``, ``nodes``, ``radius``).
    """
    if isinstance(laurents, LaurentPoly):
        laurents = [laurents]
    return _adelic_sum(divisors, laurents, arch_options, "limit")


def degree_prediction(laurents, divisors=()):
    """Degree ``MV(Delta_1..Delta_{n-k}, NP f_1..NP f_k)`` of the limit cycle."""
    if isinstance(laurents, LaurentPoly):
        laurents = [laurents]
    polys = [_as_divisor(D).polytope for D in divisors] + [f.newton_polytope for f in laurents]
    n = polys[0].dim
    if len(polys) != n:
        raise ValueError(f"degree in dimension {n} takes {n} polytopes")
    return int(mixed_volume(*polys))
