"""Problem files and report serialization."""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import math
from pathlib import Path

from .heights import MetrizedToricDivisor
from .laurent import LaurentPoly
from .lattice_geometry import LatticePolytope, unit_cube, unit_simplex

__all__ = ["Problem", "load_problem", "parse_range", "dump_json"]


@dataclass
class Problem:
    """Polynomials, metrized divisors and numerical options of one run.

    Missing divisors are filled with the canonical unit cube, so a problem
    with two bivariate polynomials describes the P^1 x P^1 model.
    """

    polynomials: list
    divisors: list
    arch_options: dict = field(default_factory=dict)
    sequence: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.polynomials[0].dim if self.polynomials else self.divisors[0].dim


def _polytope(spec, dim):
    if isinstance(spec, str):
        if spec in ("cube", "square"):
            return unit_cube(dim)
        if spec == "simplex":
            return unit_simplex(dim)
        raise ValueError(f"unknown polytope {spec!r}")
    return LatticePolytope.from_json(spec)


def load_problem(source):
    """Read a problem from a path, a JSON string or a dict.

    Format::

        {"dim": 2,
         "polynomials": ["1 + x + y", {"dim": 2, "terms": [...]}],
         "divisors": [{"polytope": "cube"}],
         "arch": {"resolution": 81, "nodes": 2048},
         "sequence": {"rule": "spread", "seed": 0}}
    """
    if isinstance(source, (str, Path)) and Path(str(source)).exists():
        data = json.loads(Path(source).read_text())
    elif isinstance(source, str):
        data = json.loads(source)
    else:
        data = dict(source)
    dim = data.get("dim")
    polys = []
    for p in data.get("polynomials", []):
        if isinstance(p, str):
            polys.append(LaurentPoly.from_string(p, dim=dim))
        else:
            polys.append(LaurentPoly.from_json(p))
    if dim is None:
        dim = polys[0].dim if polys else None
    divisors = []
    for d in data.get("divisors", []):
        if isinstance(d, str):
            divisors.append(MetrizedToricDivisor.canonical(_polytope(d, dim)))
            continue
        P = _polytope(d["polytope"], dim)
        roofs = d.get("roofs", {})
        if roofs:
            divisors.append(MetrizedToricDivisor.from_json({"polytope": P.to_json(), "roofs": roofs,
                                                           "label": d.get("label", "custom")}))
        else:
            divisors.append(MetrizedToricDivisor.canonical(P))
    if dim is None:
        raise ValueError("problem needs a dimension")
    missing = dim + 1 - len(polys) - len(divisors)
    divisors += [MetrizedToricDivisor.canonical(unit_cube(dim)) for _ in range(max(missing, 0))]
    return Problem(polys, divisors, dict(data.get("arch", {})), dict(data.get("sequence", {})))


def parse_range(text):
    """``"a..b"`` to ``(a, b)``."""
    a, sep, b = str(text).partition("..")
    if not sep:
        raise ValueError(f"expected a..b, got {text!r}")
    a, b = int(a), int(b)
    if a > b:
        raise ValueError("empty range")
    return a, b


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(obj, path=None):
    text = json.dumps(_clean(obj), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
