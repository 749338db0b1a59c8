"""Command-line front end; every experiment is a seeded subcommand.

One JSON report per run goes to stdout (or --out); logs go to stderr.
Exit codes: 0 success, 2 invalid configuration, 3 budget exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import analysis, channel, codec, source
from .errors import BudgetError, ConfigError, FqError, InvariantError
from .field import FieldSpec, smallest_generator
from .prob import Pmf
from .reporting import ExperimentReport, aggregate_reports
from .tables import TableFunction

_DIST_HELP = "uniform | uniform-nonzero | point:K | p0,p1,..."


def parse_dist(spec: str, q: int) -> Pmf:
    """Distribution grammar shared by all subcommands."""
    spec = spec.strip()
    if spec == "uniform":
        return Pmf.uniform(q)
    if spec == "uniform-nonzero":
        return Pmf.uniform_nonzero(q)
    if spec.startswith("point:"):
        try:
            at = int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad point mass spec {spec!r}") from None
        return Pmf.point(q, at)
    try:
        probs = [float(tok) for tok in spec.split(",")]
    except ValueError:
        raise ConfigError(f"cannot parse distribution {spec!r}; use {_DIST_HELP}") from None
    if len(probs) != q:
        raise ConfigError(f"distribution has {len(probs)} entries, field has order {q}")
    if abs(sum(probs) - 1.0) > 1e-9:
        raise ConfigError(f"distribution entries sum to {sum(probs)!r}, not 1")
    total = sum(probs)
    return Pmf.of([p / total for p in probs])


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="experiment seed")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker count; must not change results")
    p.add_argument("--out", type=str, default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fqlab",
        description="Finite-field information workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field-check", help="run the exhaustive field axiom suite",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("q", type=int, help="field order (prime)")
    _add_common(p)

    p = sub.add_parser("km-bounds", help="rate bounds for the sum-product source",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("q", type=int, help="field order (prime)")
    p.add_argument("--pa", default="uniform", help=f"law of A: {_DIST_HELP}")
    p.add_argument("--pb", default="uniform-nonzero", help=f"law of B: {_DIST_HELP}")
    p.add_argument("--pc", default="uniform", help=f"law of C: {_DIST_HELP}")
    _add_common(p)

    p = sub.add_parser("km-sim", help="syndrome-coding Monte-Carlo run",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("q", type=int, help="field order (prime)")
    p.add_argument("n", type=int, help="block length")
    p.add_argument("m", type=int, help="syndrome dimension")
    p.add_argument("--variant", choices=["classical", "centralized-b", "decentralized"],
                   default="classical", help="which decoder sees the multiplier")
    p.add_argument("--pz", default="uniform", help=f"noise law (classical): {_DIST_HELP}")
    p.add_argument("--pa", default="uniform", help=f"law of A (sum-product): {_DIST_HELP}")
    p.add_argument("--pb", default="uniform-nonzero", help=f"law of B: {_DIST_HELP}")
    p.add_argument("--pc", default="uniform", help=f"law of C: {_DIST_HELP}")
    p.add_argument("--trials", type=int, default=1000, help="Monte-Carlo trials")
    p.add_argument("--cap", type=int, default=codec.DEFAULT_ENUM_CAP,
                   help="coset enumeration cap per decode")
    p.add_argument("--sweep", default=None, metavar="M1,M2,...",
                   help="run every listed syndrome dimension and emit a TSV of "
                        "(rate_bits, error_rate) rows instead of JSON")
    _add_common(p)

    p = sub.add_parser("decompose", help="split a 3-ary truth table through an intermediate value",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("table", type=str, help="truth-table file: 'k1 k2 k3 -> m' then entries")
    _add_common(p)

    p = sub.add_parser("minent", help="entropy minimization for the sum-product state channel",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("q", type=int, help="field order (prime)")
    p.add_argument("--ps1", default="uniform-nonzero", help=f"encoder state law: {_DIST_HELP}")
    p.add_argument("--ps2", default="uniform", help=f"decoder state law: {_DIST_HELP}")
    p.add_argument("--n", type=int, default=1, help="block length of the encoding table")
    p.add_argument("--method", choices=["exhaustive", "quadratic", "anneal"],
                   default="exhaustive", help="search method")
    p.add_argument("--budget", type=int, default=100000, help="annealing proposals")
    p.add_argument("--cap", type=int, default=channel.DEFAULT_SCAN_CAP,
                   help="exhaustive scan cap on q^q")
    _add_common(p)

    p = sub.add_parser("gp-eval", help="evaluate or search auxiliary designs for a two-state channel",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("q", type=int, help="field order (prime)")
    p.add_argument("--channel", choices=["sum-product", "additive"], default="sum-product",
                   help="built-in channel function")
    p.add_argument("--table", type=str, default=None,
                   help="3-ary truth-table file overriding --channel")
    p.add_argument("--ps1", default="uniform-nonzero", help=f"encoder state law: {_DIST_HELP}")
    p.add_argument("--ps2", default="uniform", help=f"decoder state law: {_DIST_HELP}")
    p.add_argument("--design", type=str, default=None,
                   help="JSON design file to evaluate instead of searching")
    p.add_argument("--u-size", type=int, default=None, help="auxiliary alphabet size (default q*q)")
    p.add_argument("--restarts", type=int, default=8, help="random search restarts")
    _add_common(p)

    p = sub.add_parser("report", help="aggregate JSON reports into one TSV table",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("rundir", type=str, help="directory of *.json reports")
    p.add_argument("--out", type=str, default=None, help="write the table here instead of stdout")
    return parser


def _write_text(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(report: ExperimentReport, out: str | None) -> None:
    _write_text(report.to_json() + "\n", out)


def _cmd_field_check(args) -> ExperimentReport:
    t0 = time.monotonic()
    field = FieldSpec(args.q)
    q = field.q
    add = field.add_table
    mul = field.mul_table
    for a in range(q):
        for b in range(q):
            if add[a, b] != add[b, a] or mul[a, b] != mul[b, a]:
                raise InvariantError("commutativity failed")
            for c in range(q):
                if add[add[a, b], c] != add[a, add[b, c]]:
                    raise InvariantError("additive associativity failed")
                if mul[mul[a, b], c] != mul[a, mul[b, c]]:
                    raise InvariantError("multiplicative associativity failed")
                if mul[a, add[b, c]] != add[mul[a, b], mul[a, c]]:
                    raise InvariantError("distributivity failed")
    inverse_checks = 0
    for a in range(1, q):
        hits = [b for b in range(q) if mul[a, b] == 1]
        inverse_checks += q
        if len(hits) != 1:
            raise InvariantError(f"{a} has {len(hits)} inverses")
    fermat_checks = 0
    for a in range(1, q):
        fermat_checks += 1
        if pow(a, q - 1, q) != 1:
            raise InvariantError(f"{a}^(q-1) != 1")
    gen = smallest_generator(field)
    results = {
        "q": q,
        "axioms_ok": True,
        "inverse_checks": inverse_checks,
        "fermat_checks": fermat_checks,
        "generator": gen,
        "cyclic_ok": True,
    }
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("field-check", {"q": args.q, "jobs": args.jobs},
                            args.seed, results, wall)


def _cmd_km_bounds(args) -> ExperimentReport:
    t0 = time.monotonic()
    field = FieldSpec(args.q)
    src = source.SumProductSource(field, parse_dist(args.pa, field.q),
                                  parse_dist(args.pb, field.q), parse_dist(args.pc, field.q))
    results = source.bounds_report(src)
    config = {"q": args.q, "pa": args.pa, "pb": args.pb, "pc": args.pc, "jobs": args.jobs}
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("km-bounds", config, args.seed, results, wall)


def _run_km_variant(args, field, m: int):
    code = codec.random_parity(field, args.n, m, args.seed)
    if args.variant == "classical":
        pz = parse_dist(args.pz, field.q)
        return code, codec.km_simulate(code, pz, args.trials, args.seed,
                                       cap=args.cap, jobs=args.jobs)
    src = source.SumProductSource(field, parse_dist(args.pa, field.q),
                                  parse_dist(args.pb, field.q),
                                  parse_dist(args.pc, field.q))
    if args.variant == "centralized-b":
        return code, codec.km_sum_product_centralized(
            code, src, args.trials, args.seed, state_mode="decoder",
            cap=args.cap, jobs=args.jobs)
    return code, codec.km_sum_product_decentralized(
        code, src, args.trials, args.seed, cap=args.cap, jobs=args.jobs)


def _km_sweep_tsv(args, field) -> str:
    try:
        ms = [int(tok) for tok in args.sweep.split(",")]
    except ValueError:
        raise ConfigError(f"bad sweep list {args.sweep!r}") from None
    if not ms or any(m < 1 for m in ms):
        raise ConfigError("sweep dimensions must be positive integers")
    lines = ["rate_bits\terror_rate"]
    for m in ms:
        _, outcome = _run_km_variant(args, field, m)
        lines.append(f"{outcome.rate_bits_per_symbol:.12g}\t{outcome.error_rate:.12g}")
    return "\n".join(lines) + "\n"


def _cmd_km_sim(args) -> ExperimentReport:
    t0 = time.monotonic()
    field = FieldSpec(args.q)
    if args.n < 1 or args.m < 1:
        raise ConfigError("n and m must be positive")
    code, outcome = _run_km_variant(args, field, args.m)
    results = {
        "q": args.q,
        "n": args.n,
        "m": args.m,
        "variant": args.variant,
        "rate_bits": code.rate_bits,
        "trials": outcome.trials,
        "block_errors": outcome.block_errors,
        "error_rate": outcome.error_rate,
        "seed": args.seed,
    }
    config = {"q": args.q, "n": args.n, "m": args.m, "variant": args.variant,
              "pz": args.pz, "pa": args.pa, "pb": args.pb, "pc": args.pc,
              "trials": args.trials, "cap": args.cap, "jobs": args.jobs}
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("km-sim", config, args.seed, results, wall)


def _cmd_decompose(args) -> ExperimentReport:
    t0 = time.monotonic()
    fn = TableFunction.read(args.table)
    if fn.arity != 3:
        raise ConfigError(f"decompose needs a 3-ary table, got arity {fn.arity}")
    res = analysis.decompose(fn)
    results = {
        "domain": list(fn.domain),
        "codomain": fn.codomain,
        "num_classes": res.partition.num_classes,
        "decomposable": res.decomposable,
        "violations": res.violations,
        "g_table": res.g.table.tolist() if res.g is not None else None,
        "ftilde_table": res.ftilde.table.tolist() if res.ftilde is not None else None,
        "g_invertible_in_first": (analysis.g_invertible_in_first(res.g)
                                  if res.g is not None else None),
        "witness": list(res.witness) if res.witness is not None else None,
    }
    if results["witness"] is not None:
        results["witness"] = [list(w) if isinstance(w, tuple) else w
                              for w in results["witness"]]
    config = {"table": args.table, "jobs": args.jobs}
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("decompose", config, args.seed, results, wall)


def _cmd_minent(args) -> ExperimentReport:
    t0 = time.monotonic()
    field = FieldSpec(args.q)
    ps1 = parse_dist(args.ps1, field.q)
    ps2 = parse_dist(args.ps2, field.q)
    ch = channel.TwoStateChannel.sum_product(field, ps1, ps2)
    best_g = None
    evaluated = None
    search_space = None
    trace = None
    if args.method == "exhaustive":
        if args.n != 1:
            raise ConfigError("the exhaustive scan is per-letter; use --n 1")
        res = channel.min_entropy_exhaustive(ch, cap=args.cap, jobs=args.jobs)
        value = res.best_entropy_bits
        best_g = res.best_g.table.tolist()
        evaluated, search_space = res.evaluated, res.search_space
        trace = [[int(c), v] for c, v in res.trace]
    elif args.method == "quadratic":
        value = channel.quadratic_entropy(ch, args.n)
        best_g = [(s * s) % field.q for s in range(field.q)]
    else:
        res = channel.min_entropy_anneal(ch, n=args.n, budget=args.budget, seed=args.seed)
        value = res.best_entropy_bits
        best_g = res.best_g.table.tolist()
        evaluated, search_space = res.evaluated, res.search_space
        trace = [[int(c), v] for c, v in res.trace]
    quad = channel.quadratic_entropy(ch, 1)
    results = {
        "q": args.q,
        "n": args.n,
        "pS1": ps1.to_json()["probs"],
        "pS2": ps2.to_json()["probs"],
        "method": args.method,
        "H_min_bits": value,
        "best_g_table": best_g,
        "quadratic_bits": quad,
        "lower_bound_bits": math.log2(field.q / 2),
        "upper_bound_bits": math.log2(field.q / (2 - 1 / field.q)),
        "capacity_lb_bits": channel.capacity_from_entropy(field.q, value),
        "corollary_cap_bits": 1.0,
        "evaluated": evaluated,
        "search_space": search_space,
        "trace": trace,
    }
    config = {"q": args.q, "ps1": args.ps1, "ps2": args.ps2, "n": args.n,
              "method": args.method, "budget": args.budget, "cap": args.cap,
              "jobs": args.jobs}
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("minent", config, args.seed, results, wall)


def _load_design(path: str, q: int) -> channel.GPDesign:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from None
    try:
        rows = np.asarray(doc["pu_given_s1"], dtype=np.float64)
        xmap = np.asarray(doc["x_of_u_s1"], dtype=np.int64)
    except KeyError as exc:
        raise ConfigError(f"{path}: missing design field {exc}") from None
    if xmap.ndim != 2 or rows.ndim != 2:
        raise ConfigError(f"{path}: design tables must be two-dimensional")
    table = TableFunction((xmap.shape[0], xmap.shape[1]), q, xmap.ravel())
    return channel.GPDesign(rows, table)


def _cmd_gp_eval(args) -> ExperimentReport:
    t0 = time.monotonic()
    field = FieldSpec(args.q)
    ps1 = parse_dist(args.ps1, field.q)
    ps2 = parse_dist(args.ps2, field.q)
    if args.table is not None:
        fn = TableFunction.read(args.table)
        ch = channel.TwoStateChannel(field, fn, ps1, ps2)
        channel_name = args.table
    elif args.channel == "sum-product":
        ch = channel.TwoStateChannel.sum_product(field, ps1, ps2)
        channel_name = "sum-product"
    else:
        ch = channel.TwoStateChannel.additive(field, ps1, ps2)
        channel_name = "additive"
    if args.design is not None:
        design = _load_design(args.design, field.q)
        value = channel.gp_objective(ch, design)
        origin = "design-file"
        u_size = design.u_size
    else:
        found = channel.gp_search(ch, u_size=args.u_size, restarts=args.restarts,
                                  seed=args.seed, jobs=args.jobs)
        design, value, origin, u_size = (found.design, found.objective_bits,
                                         found.origin, found.u_size)
    results = {
        "q": args.q,
        "channel": channel_name,
        "u_size": u_size,
        "objective_bits": value,
        "objective_is_lower_bound": True,
        "origin": origin,
        "pu_given_s1": design.pu_given_s1.tolist(),
        "x_of_u_s1": design.x_of_u_s1.as_array().tolist(),
    }
    config = {"q": args.q, "channel": channel_name, "ps1": args.ps1, "ps2": args.ps2,
              "design": args.design, "u_size": args.u_size, "restarts": args.restarts,
              "jobs": args.jobs}
    wall = int((time.monotonic() - t0) * 1000)
    return ExperimentReport("gp-eval", config, args.seed, results, wall)


def _cmd_report(args) -> None:
    text = aggregate_reports(args.rundir)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_COMMANDS = {
    "field-check": _cmd_field_check,
    "km-bounds": _cmd_km_bounds,
    "km-sim": _cmd_km_sim,
    "decompose": _cmd_decompose,
    "minent": _cmd_minent,
    "gp-eval": _cmd_gp_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "report":
            _cmd_report(args)
            return 0
        if args.command == "km-sim" and args.sweep is not None:
            _write_text(_km_sweep_tsv(args, FieldSpec(args.q)), args.out)
            return 0
        report = _COMMANDS[args.command](args)
        _emit(report, args.out)
        return 0
    except BudgetError as exc:
        print(f"fqlab: budget exceeded: {exc}", file=sys.stderr)
        return 3
    except InvariantError as exc:
        print(f"fqlab: internal invariant violated: {exc}", file=sys.stderr)
        return 4
    except ConfigError as exc:
        print(f"fqlab: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except FqError as exc:  # pragma: no cover
        print(f"fqlab: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
