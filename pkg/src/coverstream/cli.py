"""Command-line front end: ``coverstream {gen,solve,verify-edifice,bench,oracle}``."""
import argparse
import json
import sys
import time

from .baselines import DEFAULT_NODE_BUDGET, exact_cover
from .bench import ALGORITHMS, load_suite, rows_to_csv, run_solver, run_suite
from .edifice import AlgebraicEdifice, EdificeParams, make_wide, rainbow_merge, verify_edifice
from .exceptions import CoverstreamError
from .generators import (
    GENERATOR_VERSION,
    encode_mpj,
    mpj_generate,
    partial_reduction,
    sandwich_check,
    tightness_instance,
)
from .instance import as_fraction, read_instance, run_report, verify_certificate, write_instance


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, sort_keys=True, indent=2, default=str) if args.json else text
    print(out)


def _write_generated(args, inst, sidecar):
    text = write_instance(inst)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        with open(args.out + ".meta.json", "w") as fh:
            json.dump(sidecar, fh, sort_keys=True, indent=2)
            fh.write("\n")
        _emit(args, {"path": args.out, "n": inst.n, "m": inst.m, **sidecar},
              f"wrote {args.out} (n={inst.n}, m={inst.m})")
    elif args.json:
        print(json.dumps({"instance": text, "meta": sidecar}, sort_keys=True, indent=2))
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen(args):
    if args.kind == "tight":
        inst = tightness_instance(args.p, args.q)
        sidecar = {
            "generator": "tight", "version": GENERATOR_VERSION,
            "params": {"p": args.p, "q": args.q}, "seed": None, "t_sub": None,
            "guaranteed": sandwich_check(args.p, args.q), "player_of": None,
        }
        return _write_generated(args, inst, sidecar)
    base = AlgebraicEdifice(EdificeParams(args.k, args.d, args.q))
    if args.kind == "mpj":
        red = encode_mpj(base, mpj_generate(base, args.t_sub, args.seed, args.bit))
    else:
        red = partial_reduction(base, args.eps, args.seed, args.bit, args.t_sub)
    return _write_generated(args, red.instance, red.sidecar())


def cmd_solve(args):
    inst = read_instance(args.instance)
    eps = as_fraction(args.eps) if args.eps is not None else inst.epsilon
    start = time.perf_counter()
    cert, passes, peak, extra = run_solver(inst, args.alg, args.p, eps, args.budget,
                                           args.node_budget)
    wall = int((time.perf_counter() - start) * 1000)
    check = verify_certificate(inst, cert, eps)
    opt = cert.size if args.alg == "exact" and extra.get("status") == "exact" else None
    report = run_report(inst, cert, args.alg, args.p if args.alg in ("prog", "naive", "er-partial")
                        else None, passes, peak, opt, args.seed, wall_time_ms=wall,
                        valid=check.valid, quota=check.quota, reasons=list(check.reasons), **extra)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, sort_keys=True, indent=2, default=str)
            fh.write("\n")
    _emit(args, report, f"alg={args.alg} sol_size={cert.size} passes={passes} "
          f"covered={cert.covered_count}/{inst.n} valid={check.valid}")
    ok = check.valid and extra.get("status", "exact") == "exact"
    return 0 if ok else 1


def cmd_verify_edifice(args):
    edifice = AlgebraicEdifice(EdificeParams(args.k, args.d, args.q))
    if args.delta is not None:
        wide = make_wide(edifice, as_fraction(args.delta))
        edifice = rainbow_merge(wide) if args.merge else edifice
    elif args.merge:
        raise CoverstreamError("--merge needs --delta")
    rep = verify_edifice(edifice, args.mode, seed=args.seed, trials=args.trials, cap=args.cap)
    payload = rep.to_dict()
    params = ",".join(str(x) for x in rep.params)
    _emit(args, payload, f"{'pass' if rep.passed else 'FAIL'} params=({params}) "
          f"max_intersection={rep.max_intersection} bound={rep.bound}")
    return 0 if rep.passed else 1


def cmd_bench(args):
    config = load_suite(args.config)
    if args.seed is not None:
        config["seed"] = args.seed
    rows = run_suite(config)
    text = rows_to_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in rows if r["bound_ok"] is False]
    if args.json:
        print(json.dumps({"rows": len(rows), "failed": len(failed)}, sort_keys=True))
    return 0 if not failed else 1


def cmd_oracle(args):
    inst = read_instance(args.instance)
    eps = as_fraction(args.eps) if args.eps is not None else inst.epsilon
    res = exact_cover(inst, inst.quota(eps), node_budget=args.node_budget)
    payload = {"opt": res.opt_size, "witness": sorted(res.witness), "status": res.status,
               "explored_nodes": res.explored_nodes, "quota": inst.quota(eps)}
    _emit(args, payload, f"opt={res.opt_size} status={res.status} nodes={res.explored_nodes}")
    return 0 if res.exact else 1


def _globals(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=default, help="output path")
    parser.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="print machine-readable JSON")
    parser.add_argument("--seed", type=int, default=default)


def build_parser():
    parser = argparse.ArgumentParser(prog="coverstream",
                                     description="Multi-pass streaming set cover toolkit")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance and metadata sidecar")
    _globals(gen, suppress=True)
    gen.add_argument("kind", choices=["tight", "mpj", "partial"])
    gen.add_argument("--p", type=int, default=2)
    gen.add_argument("--q", type=int, default=3)
    gen.add_argument("--k", type=int, default=2)
    gen.add_argument("--d", type=int, default=0)
    gen.add_argument("--bit", type=int, choices=[0, 1], default=1)
    gen.add_argument("--t-sub", type=int, default=None)
    gen.add_argument("--eps", default="0")
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run a solver on an instance file")
    _globals(solve, suppress=True)
    solve.add_argument("instance")
    solve.add_argument("--alg", choices=ALGORITHMS, default="prog")
    solve.add_argument("--p", type=int, default=1)
    solve.add_argument("--eps", default=None)
    solve.add_argument("--budget", type=int, default=None, help="pass budget")
    solve.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    solve.set_defaults(func=cmd_solve)

    ver = sub.add_parser("verify-edifice", help="check the edifice axioms")
    _globals(ver, suppress=True)
    ver.add_argument("--k", type=int, required=True)
    ver.add_argument("--d", type=int, required=True)
    ver.add_argument("--q", type=int, required=True)
    ver.add_argument("--delta", default=None)
    ver.add_argument("--merge", action="store_true")
    ver.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    ver.add_argument("--trials", type=int, default=1000)
    ver.add_argument("--cap", type=int, default=10**5)
    ver.set_defaults(func=cmd_verify_edifice)

    bench = sub.add_parser("bench", help="run a benchmark suite to CSV")
    _globals(bench, suppress=True)
    bench.add_argument("config")
    bench.set_defaults(func=cmd_bench)

    oracle = sub.add_parser("oracle", help="exact optimum of an instance file")
    _globals(oracle, suppress=True)
    oracle.add_argument("instance")
    oracle.add_argument("--eps", default=None)
    oracle.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify-edifice" and args.seed is None:
        args.seed = 0
    if args.command == "gen" and args.seed is None:
        args.seed = 0
    try:
        return args.func(args)
    except (CoverstreamError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
