"""Acceptance criteria 1-8 at their stated tolerances and runtime limits.

Each test prints one ``ACCEPTANCE <k> PASS|FAIL`` line before asserting.
"""
from fractions import Fraction
import math
import time

import numpy as np
import pytest
import sympy

from toricheights.concave import (
    PAConcave,
    legendre_dual,
    mixed_integral,
    perturbation_constant,
    sup_convolution,
    uniform_perturbation_bound,
)
from toricheights.elimination import ImproperIntersection, twisted_resultant
from toricheights.heights import limit_height
from toricheights.laurent import LaurentPoly, TorsionPoint, quasi_strict_sequence
from toricheights.lattice_geometry import mixed_volume, unit_cube
from toricheights.ronkin import ronkin_arch, ronkin_dual_nonarch
from toricheights.verifier import ExperimentConfig, adelic_tail, convergence_experiment, equidistribution_demo

from conftest import mahler_line_oracle, poly, random_pa

SQ = unit_cube(2)


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {k} {'PASS' if ok else 'FAIL'}: {detail}")
    return emit


def _random_laurent(rng):
    while True:
        k = int(rng.integers(2, 7))
        pts = set()
        while len(pts) < k:
            pts.add(tuple(int(v) for v in rng.integers(-2, 3, size=2)))
        f = LaurentPoly({e: int(rng.choice([c for c in range(-5, 6) if c])) for e in pts}, 2)
        if f.newton_polytope.affine_dim == 2:
            return f


def test_1_bkk_degree(report):
    rng = np.random.default_rng(20261017)
    primes = [int(p) for p in sympy.primerange(11, 48)]
    t0 = time.perf_counter()
    matches, redraws, failures = 0, 0, []
    for i in range(25):
        f, g = _random_laurent(rng), _random_laurent(rng)
        mv = mixed_volume(f.newton_polytope, g.newton_polytope)
        while True:
            N = int(rng.choice(primes))
            t = TorsionPoint(N, [int(v) for v in rng.integers(0, N, size=2)])
            try:
                res = twisted_resultant(f, g, t)
            except ImproperIntersection:
                redraws += 1
                continue
            if res.boundary_conflict:
                redraws += 1
                continue
            break
        if res.torus_degree == mv:
            matches += 1
        else:
            failures.append((i, mv, res.torus_degree))
    wall = time.perf_counter() - t0
    ok = matches == 25 and wall < 30
    report(1, ok, f"{matches}/25 torus counts equal MV, {redraws} non-generic twists redrawn, {wall:.1f} s")
    assert not failures
    assert wall < 30


def _identities(rng, n):
    fs = [random_pa(rng, n, full=False) for _ in range(n + 1)]
    g = random_pa(rng, n, full=False)
    f = fs[0]
    checks = {}
    checks["involution"] = legendre_dual(legendre_dual(f)).equals(f)
    checks["dual of sup-convolution"] = legendre_dual(sup_convolution(f, g)).equals(legendre_dual(f) + legendre_dual(g))
    checks["symmetry"] = mixed_integral(*fs) == mixed_integral(*fs[::-1])
    checks["multilinearity"] = (mixed_integral(sup_convolution(f, g), *fs[1:])
                                == mixed_integral(f, *fs[1:]) + mixed_integral(g, *fs[1:]))
    m = tuple(int(v) for v in rng.integers(-2, 3, size=n))
    c = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
    point = PAConcave.indicator(m, c)
    checks["monomial slot"] = (mixed_integral(point, *fs[1:])
                               == c * mixed_volume(*[h.domain for h in fs[1:]]))
    return checks


@pytest.mark.slow
def test_2_convex_calculus_invariants(report):
    rng = np.random.default_rng(2)
    failures = []
    counts = {1: 17, 2: 17, 3: 16}
    t0 = time.perf_counter()
    for n, k in counts.items():
        for i in range(k):
            for name, ok in _identities(rng, n).items():
                if not ok:
                    failures.append((n, i, name))
    wall = time.perf_counter() - t0
    report(2, not failures, f"50 instances (n = 1, 2, 3: {counts[1]}, {counts[2]}, {counts[3]}), "
                            f"{len(failures)} failures, {wall:.1f} s")
    assert not failures


def test_3_mixed_integral_stability(report):
    rng = np.random.default_rng(3)
    worst, failures = 0.0, []
    for i in range(20):
        n = 1 + i % 2
        fs = [random_pa(rng, n) for _ in range(n + 1)]
        for eps in (1e-2, 1e-3):
            jittered = []
            for f in fs:
                noise = rng.uniform(-eps, eps, size=len(f.values))
                jittered.append(PAConcave.lifted(f.points, [float(v) + d for v, d in zip(f.values, noise)]))
            delta, bound, ok = uniform_perturbation_bound(fs, jittered, eps)
            worst = max(worst, delta / bound)
            if not ok:
                failures.append((i, eps, delta, bound))
    report(3, not failures, f"20 instances x 2 jitter sizes, worst |dMI| / (C eps) = {worst:.3f}")
    assert not failures
    assert perturbation_constant([PAConcave.zero(SQ)] * 3) > 0


def test_4_ronkin_consistency(report):
    t0 = time.perf_counter()
    vertex_ok = True
    for expr, p in [("1 + x/2", 2), ("6 + x/3 + 10*y + 5*x*y", 3), ("4 + 2*x + y/8", 2), ("25 + x*y + 5*y**2", 5)]:
        dim = 1 if expr == "1 + x/2" else 2
        f = poly(expr, dim=dim)
        d = ronkin_dual_nonarch(f, p)
        verts = set(f.newton_polytope.vertices)
        for m, c in f.terms:
            if m in verts:
                # log|c|_p = -ord_p(c) log p, in units of log p
                expected = -sympy.multiplicity(p, Fraction(c).numerator) + sympy.multiplicity(p, Fraction(c).denominator)
                vertex_ok &= d.function.evaluate(list(m)) == expected
    a = ronkin_arch(poly("1 + x", dim=1), [0.0], budget=2**18)
    b = ronkin_arch(poly("1 + x + y"), [0.0, 0.0], budget=2**18)
    oracle = -mahler_line_oracle()
    wall = time.perf_counter() - t0
    ok_a = abs(a.value) <= 1e-4
    ok_b = abs(b.value - oracle) <= 1e-3
    ok = vertex_ok and ok_a and ok_b and wall < 60
    report(4, ok, f"vertex values exact={vertex_ok}, rho_(1+x)(0)={a.value:.2e}, "
                  f"rho_(1+x+y)(0)-oracle={b.value - oracle:.2e}, {wall:.1f} s")
    assert vertex_ok and ok_a and ok_b
    assert wall < 60


@pytest.mark.slow
def test_5_main_theorem_desk_scale(report, pilot):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(poly("1 + x + y"), poly("1 + x + y"), first=101, last=401)
    rows, summary = convergence_experiment(cfg)
    wall = time.perf_counter() - t0
    conv = pilot["convergence"]
    dev, rhs_err = summary["tail_max_abs_dev"], summary["rhs_error"]
    degrees_ok = all(r.degree == summary["degree_prediction"] for r in rows if r.status == "ok")
    ok = dev <= conv["acceptance_threshold"] and rhs_err <= conv["rhs_error_threshold"] and wall < 600 and degrees_ok
    report(5, ok, f"max |LHS-RHS| over N={summary['tail_orders']} is {dev:.4f} (<= 0.05), "
                  f"RHS {summary['rhs']:.5f} +- {rhs_err:.5f} (<= 0.01), {summary['proper_rows']}/{len(rows)} proper rows, "
                  f"{wall:.0f} s")
    assert summary["tail_orders"] == conv["tail_orders"]
    assert degrees_ok
    assert dev <= conv["acceptance_threshold"]
    assert rhs_err <= conv["rhs_error_threshold"]
    assert wall < 600


def test_6_monomial_and_product_laws(report):
    line = poly("1 + x + y")
    mono = [limit_height([poly("3*x*y"), line], [SQ]), limit_height([line, poly("-x**2/5")], [SQ])]
    mono_ok = all(abs(r.total) <= 1e-9 for r in mono)
    f, h = poly("1 + x + y"), poly("1 + x - y")
    prod = limit_height([f * h, line], [SQ])
    parts = [limit_height([f, line], [SQ]), limit_height([h, line], [SQ])]
    gap = abs(prod.total - sum(r.total for r in parts))
    budget = prod.error + sum(r.error for r in parts)
    ok = mono_ok and gap <= budget
    report(6, ok, f"monomial inputs give {[r.total for r in mono]}, product gap {gap:.2e} <= combined error {budget:.2e}")
    assert mono_ok
    assert gap <= budget


def test_7_logarithmic_equidistribution(report, pilot):
    rows = equidistribution_demo(poly("1 + x + y"), [211, 307, 503])
    devs = {r.N: r.abs_dev for r in rows}
    lin = equidistribution_demo(poly("x - 2", dim=1), [int(p) for p in sympy.primerange(5, 102)])
    lin_devs = [r.abs_dev for r in lin]
    monotone = all(b < a for a, b in zip(lin_devs, lin_devs[1:]))
    ok = all(d <= 0.02 for d in devs.values()) and monotone
    report(7, ok, "deviations " + ", ".join(f"N={N} (s={r.s}): {devs[N]:.4f}" for N, r in zip(devs, rows))
                  + f"; x-2 deviations decrease monotonically over {len(lin)} primes ({lin_devs[0]:.3f} -> {lin_devs[-1]:.4f})")
    assert all(d <= pilot["equidistribution"]["threshold"] for d in devs.values())
    assert monotone


def test_8_adelic_tail(report, pilot):
    orders = pilot["tail"]["orders"]
    f = poly("1 + x + y")
    rows = adelic_tail(f, f, quasi_strict_sequence(orders=orders, coprime_to="s-1"), prime_bound=100)
    C = rows[0].degree
    problems = []
    for r in rows:
        if not r.ok:
            problems.append((r.N, "bound"))
        if r.value > 0 or any(c > 0 for c in r.terms.values()):
            problems.append((r.N, "positive"))
        if not all(isinstance(c, Fraction) for c in r.terms.values()):
            problems.append((r.N, "value group"))
        if -r.value > C * math.log(r.N) / sympy.totient(r.N) * (1 + 1e-12):
            problems.append((r.N, "C log N / phi(N)"))
    ok = not problems
    worst = min(rows, key=lambda r: r.value)
    report(8, ok, f"{len(rows)} rows, C = {C}, all nonpositive and within C log N / phi(N); "
                  f"most negative row N={worst.N}: {worst.value:.4f}")
    assert not problems
