"""Command line interface: ``toricheights {predict,verify,tail,equidist,degree}``."""
from __future__ import annotations

import argparse
import logging
import sys

import sympy

from .heights import degree_prediction, limit_height
from .io import dump_json, load_problem, parse_range
from .laurent import quasi_strict_sequence
from .verifier import (
    ExperimentConfig,
    adelic_tail,
    convergence_experiment,
    equidistribution_demo,
    rows_to_csv,
)


def _arch(problem, args):
    opts = dict(problem.arch_options)
    if args.budget is not None:
        opts["nodes"] = args.budget
    return opts


def _orders(args, default):
    a, b = parse_range(args.primes) if args.primes else default
    return [int(p) for p in sympy.primerange(max(a, 5), b + 1)]


def cmd_predict(args):
    prob = load_problem(args.problem)
    rep = limit_height(prob.polynomials, prob.divisors, arch_options=_arch(prob, args))
    text = dump_json(rep.to_json(), args.out)
    if args.out is None:
        print(text)
    return 0


def cmd_verify(args):
    prob = load_problem(args.problem)
    if len(prob.polynomials) != 2 or prob.dim != 2:
        raise SystemExit("verify needs two bivariate polynomials")
    a, b = parse_range(args.primes) if args.primes else (101, 401)
    cfg = ExperimentConfig(prob.polynomials[0], prob.polynomials[1], a, b,
                           exponent_rule=prob.sequence.get("rule", "spread"),
                           seed=args.seed, arch_options=_arch(prob, args))
    rows, summary = convergence_experiment(cfg)
    text = rows_to_csv(rows, args.out)
    if args.out is None:
        print(text, end="")
        print(dump_json(summary), file=sys.stderr)
    else:
        dump_json(summary, str(args.out) + ".summary.json")
    return 0


def cmd_tail(args):
    prob = load_problem(args.problem)
    f, g = prob.polynomials[:2]
    seq = quasi_strict_sequence(prob.sequence.get("rule", "spread"), orders=_orders(args, (5, 100)),
                                seed=args.seed, coprime_to="s-1")
    rows = adelic_tail(f, g, seq, args.prime_bound)
    text = rows_to_csv([r.as_row() for r in rows], args.out)
    if args.out is None:
        print(text, end="")
    return 0 if all(r.ok for r in rows) else 1


def cmd_equidist(args):
    prob = load_problem(args.problem)
    h = prob.polynomials[0]
    rows = equidistribution_demo(h, _orders(args, (101, 503)))
    text = rows_to_csv(rows, args.out)
    if args.out is None:
        print(text, end="")
    return 0


def cmd_degree(args):
    prob = load_problem(args.problem)
    divs = prob.divisors[: prob.dim - len(prob.polynomials)]
    print(degree_prediction(prob.polynomials, divs))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="toricheights", description="Heights of twisted toric intersections.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn, help_ in [
        ("predict", cmd_predict, "adelic limit-height prediction"),
        ("verify", cmd_verify, "exact cycle heights against the prediction"),
        ("tail", cmd_tail, "p-adic tail sums against their bound"),
        ("equidist", cmd_equidist, "orbit averages of log|h| against m(h)"),
        ("degree", cmd_degree, "degree prediction (mixed volume)"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--problem", required=True, help="problem JSON file or inline JSON")
        p.add_argument("--primes", help="range a..b of torsion orders")
        p.add_argument("--budget", type=int, help="quadrature nodes per fibre circle")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (stdout if omitted)")
        if name == "tail":
            p.add_argument("--prime-bound", type=int, default=100)
        p.set_defaults(func=fn)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
