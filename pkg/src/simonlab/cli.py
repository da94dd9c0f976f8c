"""Command-line front end.  Every command prints one JSON report to stdout.

Exit status: 0 on success, 1 when a verdict is FAIL, 2 on usage or cap errors.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import classical, fflinalg, instances, lemma1, polymethod, qsim, verify
from .fflinalg import EnumerationTooLarge, FpMatrix, index_to_vec
from .qsim import SimulatorCapExceeded

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic output

def _encode(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(str(x))
        return format(x, ".17g")
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(report: dict) -> str:
    """JSON with fields in insertion order and floats at 17 significant digits."""
    return _encode(report)


def _tsv(rows) -> str:
    if not rows:
        return ""
    keys = list(rows[0])
    lines = ["\t".join(keys)]
    for r in rows:
        lines.append("\t".join(_encode(r[k]).strip('"') if not isinstance(r[k], str) else r[k]
                               for k in keys))
    return "\n".join(lines)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _report(command, params, result, **extra):
    out = {"command": command, "params": params, "result": result}
    out.update(extra)
    return out


def _vec(v):
    return list(v)


# ---------------------------------------------------------------------------
# commands; each returns (report, verdict, tsv rows or None)

def cmd_count(args):
    hs = range(args.n + 1) if args.h is None else [args.h]
    if args.h is not None and not 0 <= args.h <= args.n:
        raise UsageError(f"--h must lie in 0..{args.n}")
    fflinalg.FieldSpec(args.p, args.n)
    rows = [{"h": h, "D": args.p ** h, "alpha": fflinalg.alpha(args.n, h, args.p),
             "beta": fflinalg.beta(args.n, h, args.p),
             "count_FD": fflinalg.count_FD(args.n, h, args.p)} for h in hs]
    return _report("count", {"p": args.p, "n": args.n, "h": args.h}, {"table": rows}), True, rows


def cmd_kernel(args):
    m = FpMatrix.from_json(_load_json(args.matrix))
    inst = instances.make_linear(m)
    result = {"kernel": inst.kernel.to_json(), "dim": inst.kernel_dim,
              "size": m.p ** inst.kernel_dim, "label": inst.label.value}
    return _report("kernel", {"matrix": m.to_json()}, result), True, None


def _simulate_trials(f, dist, rounds, seeds):
    return [qsim.simon_decide(f, rounds, np.random.default_rng(s), dist) for s in seeds]


def cmd_simulate(args):
    p, n = args.p, args.n
    rounds = qsim.default_rounds(n) if args.rounds is None else args.rounds
    f = instances.make_linear(fflinalg.sample_FD(n, args.kernel_dim, p, seed=args.seed))
    dist = qsim.simon_round_distribution(f, cap=args.cap)
    seeds = np.random.SeedSequence(args.seed).spawn(args.trials)
    if args.jobs > 1 and args.trials > 1:
        from concurrent.futures import ProcessPoolExecutor
        chunks = [seeds[i::args.jobs] for i in range(args.jobs)]
        with ProcessPoolExecutor(args.jobs) as pool:
            parts = list(pool.map(_simulate_trials, [f] * len(chunks), [dist] * len(chunks),
                                  [rounds] * len(chunks), chunks))
        # undo the round-robin split so output order is canonical
        runs = [None] * args.trials
        for j, part in enumerate(parts):
            for i, r in enumerate(part):
                runs[j + i * args.jobs] = r
    else:
        runs = _simulate_trials(f, dist, rounds, seeds)
    correct = sum(ans is f.label for ans, _ in runs)
    predicted = runs[0][1].predicted_success if runs else None
    result = {"matrix": f.matrix.to_json(), "label": f.label.value, "rounds": rounds,
              "trials": args.trials, "success_rate": correct / args.trials if args.trials else None,
              "predicted_success": None if predicted is None else str(predicted),
              "predicted_success_float": None if predicted is None else float(predicted),
              "transcript_sample": runs[0][1].to_json() if runs else None}
    params = {"p": p, "n": n, "kernel_dim": args.kernel_dim, "rounds": rounds,
              "trials": args.trials, "seed": args.seed}
    return _report("simulate", params, result), True, None


def cmd_round_dist(args):
    m = FpMatrix.from_json(_load_json(args.matrix))
    f = instances.make_linear(m)
    dist = qsim.simon_round_distribution(f, cap=args.cap)
    perp = fflinalg.annihilator(f.kernel)
    rows = [{"y": _vec(index_to_vec(i, m.p, m.n)), "prob": float(pr)} for i, pr in enumerate(dist)]
    support = sorted(tuple(index_to_vec(i, m.p, m.n)) for i in np.flatnonzero(dist > 1e-9))
    ok = support == sorted(perp.elements())
    result = {"distribution": rows, "h_perp": perp.to_json(), "support_matches_h_perp": ok}
    tsv = [{"y": " ".join(map(str, r["y"])), "prob": r["prob"]} for r in rows]
    return _report("round-dist", {"matrix": m.to_json()}, result), ok, tsv


def cmd_qs(args):
    s = instances.PartialFn.from_json(_load_json(args.partial))
    bound = s.span_dim()
    cons = instances.linear_consistency(s)
    result = {"consistent": cons.consistent, "bound": bound}
    tables = {}
    if args.mode in ("brute", "both"):
        tables["brute"] = polymethod.q_s_bruteforce_table(s, args.cap)
    if args.mode in ("closed", "both"):
        tables["closed"] = polymethod.q_s_closed_form_table(s, cap=args.cap)
    verdict = True
    rows = []
    for h in range(s.n + 1):
        row = {"k": h, "D": s.p ** h}
        for mode, vals in tables.items():
            row[mode] = str(vals[h])
        rows.append(row)
    result["table"] = rows
    main = tables.get("brute", tables.get("closed"))
    result["qtable"] = polymethod.QTable.from_values(s.p, s.n, main).to_json()
    poly = polymethod.interpolate([(s.p ** h, v) for h, v in enumerate(main)])
    result["polynomial"] = poly.to_json()
    result["degree"] = poly.degree
    verdict &= poly.degree <= bound
    if args.mode == "both":
        result["closed_equals_brute"] = tables["brute"] == tables["closed"]
        verdict &= result["closed_equals_brute"]
    result["pass"] = verdict
    return _report("qs", {"partial": s.to_json(), "mode": args.mode}, result), verdict, rows


def cmd_qofd(args):
    c = qsim.Circuit.from_json(_load_json(args.circuit))
    res = polymethod.q_of_D(c, cap=args.cap, jobs=args.jobs, sim_cap=args.cap)
    result = {"table": res.table.to_json(), "queries": c.query_count,
              "coefficients": res.coef, **res.degree_report()}
    rows = [{"k": pt.k, "D": pt.D, "Q": float(pt.value)} for pt in res.table.points]
    return _report("qofd", {"circuit": c.to_json()}, result), res.passed, rows


def cmd_bundled_circuit(args):
    circuits = qsim.bundled_circuits(args.p, args.n)
    if args.name not in circuits:
        raise UsageError(f"unknown circuit {args.name!r}; choose from {sorted(circuits)}")
    return circuits[args.name].to_json(), True, None


def cmd_lemma1(args):
    inst = lemma1.Lemma1Instance(args.p, args.n)
    max_degree = args.n if args.max_degree is None else args.max_degree
    if max_degree > args.n:
        raise UsageError("--max-degree must not exceed n")
    res = lemma1.min_feasible_degree(inst, max_degree)
    params = {"p": args.p, "n": args.n, "max_degree": max_degree}
    rows = [{"d": r.degree, "status": "feasible" if r.feasible else "infeasible",
             "verified": r.verify(inst)} for r in res.per_degree]
    return _report("lemma1", params, res.to_json()), res.passed, rows


def cmd_verify(args):
    checks = verify.run_suite(args.suite, args.p, args.n, args.cap, args.seed)
    ok = all(c.passed for c in checks)
    result = {"checks": [c.to_json() for c in checks], "pass": ok}
    rows = [{"name": c.name, "pass": "PASS" if c.passed else "FAIL"} for c in checks]
    params = {"suite": args.suite, "p": args.p, "n": args.n, "seed": args.seed}
    return _report("verify", params, result), ok, rows


def cmd_classical(args):
    if args.which == "basis":
        m = FpMatrix.from_json(_load_json(args.matrix))
        label, used = classical.basis_solve(m, m.p, m.n)
        return (_report("classical basis", {"matrix": m.to_json()}, {"label": label.value},
                        queries_used=used), True, None)
    n = args.n
    shift = None if args.shift is None else int(args.shift, 2)
    params = {"n": n, "shift": args.shift, "budget": args.budget, "trials": args.trials,
              "seed": args.seed}
    rng = np.random.default_rng(args.seed)
    found, used, first = 0, 0, None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for _ in range(args.trials):
            g = instances.make_general(n, shift, seed=rng)
            r = classical.collision_search(g, args.budget, seed=rng)
            found += r.found
            used += r.queries_used
            first = first or r
    result = {"first_trial": first.to_json() if first else None,
              "collision_rate": found / args.trials if args.trials else None,
              "exact_collision_probability": float(classical.birthday_collision_probability(n, args.budget))
              if shift is not None else 0.0,
              "warnings": sorted({str(w.message) for w in caught})}
    return _report("classical collision", params, result, queries_used=used), True, None


# ---------------------------------------------------------------------------

def _default_seed():
    env = os.environ.get("SIMONLAB_SEED")
    try:
        return int(env) if env is not None else 0
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="RNG seed (default: $SIMONLAB_SEED, else 0)")
    common.add_argument("--cap", type=int, default=None, help="enumeration / simulator size cap")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--tsv", action="store_true", help="print tables as TSV")

    parser = argparse.ArgumentParser(prog="simonlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="alpha / beta / |F_D| table")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--h", type=int)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("kernel", parents=[common], help="kernel and promise label of a matrix")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("simulate", parents=[common], help="Simon's algorithm on a random instance")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kernel-dim", type=int, choices=(0, 1), required=True)
    p.add_argument("--rounds", type=int)
    p.add_argument("--trials", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("round-dist", parents=[common], help="exact Fourier-sampling distribution")
    p.add_argument("--matrix", required=True)
    p.set_defaults(func=cmd_round_dist)

    p = sub.add_parser("qs", parents=[common], help="Q_s(D) table and degree check")
    p.add_argument("--partial", required=True)
    p.add_argument("--mode", choices=("brute", "closed", "both"), default="both")
    p.set_defaults(func=cmd_qs)

    p = sub.add_parser("qofd", parents=[common], help="averaged acceptance Q(D) of a circuit")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=cmd_qofd)

    p = sub.add_parser("bundled-circuit", parents=[common], help="print a bundled test circuit as JSON")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--name", required=True)
    p.set_defaults(func=cmd_bundled_circuit)

    p = sub.add_parser("lemma1", parents=[common], help="minimal feasible degree search")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--max-degree", type=int)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("verify", parents=[common], help="run a property suite")
    p.add_argument("--suite", choices=verify.SUITES, default="all")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classical", parents=[common], help="classical baselines")
    csub = p.add_subparsers(dest="which", required=True)
    b = csub.add_parser("basis", parents=[common])
    b.add_argument("--matrix", required=True)
    b.set_defaults(func=cmd_classical)
    c = csub.add_parser("collision", parents=[common])
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--shift", help="hidden shift as a bit string; omit for a bijection")
    c.add_argument("--budget", type=int, required=True)
    c.add_argument("--trials", type=int, default=1)
    c.set_defaults(func=cmd_classical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed is None:
        args.seed = _default_seed()
    try:
        report, verdict, rows = args.func(args)
    except (EnumerationTooLarge, SimulatorCapExceeded) as exc:
        print(dumps({"command": args.command, "error": str(exc),
                     "size": exc.size, "cap": exc.cap}), file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, KeyError, TypeError, instances.PromiseViolation) as exc:
        print(dumps({"command": args.command, "error": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    if args.tsv and rows is not None:
        print(_tsv(rows))
    else:
        print(dumps(report))
    return EXIT_OK if verdict else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
