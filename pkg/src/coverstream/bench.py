"""Benchmark orchestration: run solvers over generated suites and collect CSV rows."""
import csv
import io
import json
import random
import time
from fractions import Fraction

from .baselines import DEFAULT_NODE_BUDGET, exact_cover, offline_greedy
from .edifice import AlgebraicEdifice, EdificeParams
from .generators import (
    dichotomy_check,
    encode_mpj,
    mpj_generate,
    partial_reduction,
    random_instance,
    sandwich_check,
    tightness_instance,
)
from .instance import SpaceMeter, as_fraction, certificate_from_ids, verify_certificate
from .solvers import partial_cover_solve, prog_greedy, prog_greedy_naive

__all__ = ["ALGORITHMS", "CSV_COLUMNS", "run_solver", "bound_ok", "run_suite", "rows_to_csv",
           "load_suite"]

ALGORITHMS = ("prog", "naive", "er-partial", "offline-greedy", "exact")
CSV_COLUMNS = ["instance", "alg", "p", "eps", "n", "m", "sol", "opt", "ratio", "bound_ok",
               "passes", "peak_words", "seed"]


def run_solver(instance, alg, p=1, eps=0, budget=None, node_budget=DEFAULT_NODE_BUDGET):
    """Run one algorithm on a fresh stream; returns (certificate, passes, peak words, extra)."""
    stream = instance.stream(budget)
    meter = SpaceMeter()
    extra = {}
    eps = as_fraction(eps or 0)
    if alg == "prog":
        cert = prog_greedy(stream, p, meter)
    elif alg == "naive":
        cert = prog_greedy_naive(stream, p, meter)
    elif alg == "er-partial":
        cert = partial_cover_solve(stream, p, eps, meter, extra)
    elif alg == "offline-greedy":
        list(stream.replay())
        cert = offline_greedy(instance, instance.quota(eps))
    elif alg == "exact":
        list(stream.replay())
        res = exact_cover(instance, instance.quota(eps), node_budget=node_budget)
        extra["status"] = res.status
        extra["explored_nodes"] = res.explored_nodes
        cert = certificate_from_ids(instance, res.witness)
    else:
        raise ValueError(f"unknown algorithm {alg!r}; expected one of {', '.join(ALGORITHMS)}")
    return cert, stream.passes_used, meter.peak_words, extra


def bound_ok(alg, sol, opt, n, p, eps=0):
    """Exact check of the algorithm's approximation guarantee; None when it has none."""
    if opt is None:
        return None
    eps = as_fraction(eps or 0)
    if alg == "prog":
        return sol ** (p + 1) <= n * (1 + p * opt) ** (p + 1)
    if alg == "naive":
        if p == 1:
            return sol <= n
        return sol**p <= n * (1 + (p - 1) * opt) ** p
    if alg == "er-partial":
        by_n = sol ** (p + 1) <= (8 * p + 1) ** (p + 1) * n * opt ** (p + 1)
        by_eps = eps > 0 and eps * sol**p <= (8 * p * opt) ** p
        return by_n or by_eps
    if alg == "exact":
        return sol == opt
    return None


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.6f}"
    if isinstance(x, Fraction):
        return str(x)
    return str(x)


def _row(name, alg, p, eps, inst, sol, opt, ok, passes, peak, seed):
    return {
        "instance": name, "alg": alg, "p": p, "eps": eps, "n": inst.n, "m": inst.m,
        "sol": sol, "opt": opt, "ratio": sol / opt if opt else None, "bound_ok": ok,
        "passes": passes, "peak_words": peak, "seed": seed,
    }


def _solve_rows(name, inst, algs, ps, epss, seed, opt_cache, node_budget):
    rows = []
    for eps in epss:
        eps = as_fraction(eps)
        key = inst.quota(eps)
        if key not in opt_cache:
            res = exact_cover(inst, key, node_budget=node_budget)
            opt_cache[key] = res.opt_size if res.exact else None
        opt = opt_cache[key]
        for alg in algs:
            if eps and alg in ("prog", "naive"):
                continue
            for p in (ps if alg in ("prog", "naive", "er-partial") else [None]):
                cert, passes, peak, _ = run_solver(inst, alg, p or 1, eps, node_budget=node_budget)
                report = verify_certificate(inst, cert, eps)
                ok = bound_ok(alg, cert.size, opt, inst.n, p or 1, eps) if report.valid else False
                rows.append(_row(name, alg, p, str(eps), inst, cert.size, opt, ok, passes, peak, seed))
    return rows


def run_suite(config: dict) -> list:
    """Rows for every task in ``config["tasks"]``.

    Task kinds: ``random`` (count, n, m, density, full_set_prob, algs, p,
    eps), ``tight`` (p, q), ``mpj`` (k, d, q, t_sub, seeds) and ``partial``
    (k, d, q, eps, t_sub, seeds).  Every task draws from its own
    ``random.Random`` seeded by the suite seed plus its position.
    """
    base_seed = int(config.get("seed", 0))
    node_budget = int(config.get("node_budget", DEFAULT_NODE_BUDGET))
    rows = []
    for pos, task in enumerate(config.get("tasks", [])):
        kind = task["kind"]
        seed = base_seed + pos
        if kind == "random":
            rng = random.Random(seed)
            for i in range(int(task.get("count", 10))):
                inst = random_instance(
                    rng, tuple(task.get("n", (5, 50))), tuple(task.get("m", (3, 40))),
                    tuple(task.get("density", (0.05, 0.4))), task.get("full_set_prob", 0.5),
                )
                rows += _solve_rows(f"random_{seed}_{i}", inst,
                                    task.get("algs", ["prog", "naive"]), task.get("p", [1, 2, 3]),
                                    task.get("eps", [0]), seed, {}, node_budget)
        elif kind == "tight":
            for p in task.get("p", [2, 3]):
                for q in task.get("q", [3, 4, 5]):
                    inst = tightness_instance(p, q)
                    cert, passes, peak, _ = run_solver(inst, "naive", p)
                    res = exact_cover(inst, node_budget=node_budget)
                    opt = res.opt_size if res.exact else None
                    ok = cert.size == p * (q - 1) if sandwich_check(p, q) else None
                    rows.append(_row(f"tight_{p}_{q}", "naive", p, "0", inst, cert.size, opt, ok,
                                     passes, peak, None))
        elif kind in ("mpj", "partial"):
            params = EdificeParams(task["k"], task.get("d", 0), task["q"])
            base = AlgebraicEdifice(params)
            p = params.k - 1
            for s in task.get("seeds", range(20)):
                for bit in (0, 1):
                    if kind == "mpj":
                        red = encode_mpj(base, mpj_generate(base, task.get("t_sub"), s, bit))
                        eps = "0"
                    else:
                        red = partial_reduction(base, task.get("eps", 0), s, bit, task.get("t_sub"))
                        eps = red.meta["epsilon"]
                    rep = dichotomy_check(red, node_budget)
                    rows.append(_row(f"{kind}_{params.k}_{params.d}_{params.q}_b{bit}", "exact", p,
                                     eps, red.instance, rep.opt, rep.opt, rep.consistent, 1, 0, s))
        else:
            raise ValueError(f"unknown task kind {kind!r}")
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(row[k]) for k in CSV_COLUMNS})
    return buf.getvalue()


def load_suite(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, int((time.perf_counter() - start) * 1000)
