"""Offline reference algorithms: Johnson's greedy and an exact branch-and-bound oracle."""
import math
from dataclasses import dataclass
from typing import Optional

from .instance import Certificate, Instance

__all__ = ["OracleResult", "offline_greedy", "exact_cover", "DEFAULT_NODE_BUDGET"]

DEFAULT_NODE_BUDGET = 10**7


def offline_greedy(instance: Instance, quota: Optional[int] = None) -> Certificate:
    """Repeatedly take the set with the largest contribution (earliest on ties)."""
    n = instance.n
    quota = n if quota is None else quota
    coverer = [0] * (n + 1)
    sol = set()
    covered = 0
    remaining = [set(r.elements) for r in instance.records]
    while covered < quota:
        best, best_c = None, 0
        for pos, s in enumerate(remaining):
            if len(s) > best_c:
                best, best_c = pos, len(s)
        if best is None:
            break
        rec = instance.records[best]
        taken = set(remaining[best])
        sol.add(rec.id)
        for x in taken:
            coverer[x] = rec.id
        covered += len(taken)
        for s in remaining:
            s -= taken
        remaining[best] = set()
    return Certificate.from_arrays(coverer, sol)


@dataclass
class OracleResult:
    opt_size: Optional[int]
    witness: frozenset
    explored_nodes: int
    status: str  # "exact" or "budget_exceeded"

    @property
    def exact(self) -> bool:
        return self.status == "exact"


class _Budget(Exception):
    pass


def _reduce(instance, prune):
    """Stream-ordered (id, mask) pairs without empties, duplicates and, optionally, dominated sets."""
    seen = set()
    items = []
    for rec in instance.records:
        mask = 0
        for x in rec.elements:
            mask |= 1 << (x - 1)
        if mask and mask not in seen:
            seen.add(mask)
            items.append((rec.id, mask))
    if not prune:
        return items
    by_size = sorted(items, key=lambda it: -it[1].bit_count())
    kept = []
    for sid, mask in by_size:
        if not any(mask | other == other for _, other in kept):
            kept.append((sid, mask))
    keep = {sid for sid, _ in kept}
    return [it for it in items if it[0] in keep]


def exact_cover(instance: Instance, quota: Optional[int] = None,
                node_budget: int = DEFAULT_NODE_BUDGET, prune: bool = True) -> OracleResult:
    """Minimum number of sets covering at least ``quota`` elements (default: all).

    Depth-first branch-and-bound.  Each node branches on the uncovered element
    contained in the fewest sets, trying larger-contribution sets first; when
    the quota leaves slack, one extra branch gives the element up.  Nodes are
    cut at ``⌈remaining quota / max contribution⌉``.
    """
    n = instance.n
    quota = n if quota is None else quota
    if not 0 <= quota <= n:
        raise ValueError(f"quota must lie in [0, {n}]")
    if quota == 0:
        return OracleResult(0, frozenset(), 0, "exact")
    items = _reduce(instance, prune)
    ids = [sid for sid, _ in items]
    masks = [mask for _, mask in items]
    containing = [[] for _ in range(n)]
    for k, mask in enumerate(masks):
        for b in range(n):
            if mask >> b & 1:
                containing[b].append(k)
    order = sorted(range(n), key=lambda b: len(containing[b]))
    slack = n - quota
    full = (1 << n) - 1

    # incumbent from greedy
    from_greedy = offline_greedy(instance, quota)
    best_size = len(from_greedy.sol) if from_greedy.covered_count >= quota else math.inf
    best = [best_size, list(from_greedy.sol)]
    nodes = 0
    chosen = []

    def dfs(covered, abandoned, n_abandoned):
        nonlocal nodes
        nodes += 1
        if nodes > node_budget:
            raise _Budget
        cov = covered.bit_count()
        if cov >= quota:
            if len(chosen) < best[0]:
                best[0] = len(chosen)
                best[1] = [ids[k] for k in chosen]
            return
        if len(chosen) + 1 >= best[0]:
            return
        avail = full & ~covered & ~abandoned
        maxc = max((m & avail).bit_count() for m in masks) if masks else 0
        need = quota - cov
        if maxc == 0:
            return
        if len(chosen) + -(-need // maxc) >= best[0]:
            return
        x = next(b for b in order if avail >> b & 1)
        cands = sorted(containing[x], key=lambda k: -(masks[k] & avail).bit_count())
        for k in cands:
            chosen.append(k)
            dfs(covered | masks[k], abandoned, n_abandoned)
            chosen.pop()
        if n_abandoned < slack:
            dfs(covered, abandoned | (1 << x), n_abandoned + 1)

    status = "exact"
    try:
        dfs(0, 0, 0)
    except _Budget:
        status = "budget_exceeded"
    size = best[0] if best[0] != math.inf else None
    return OracleResult(size, frozenset(best[1]) if size is not None else frozenset(), nodes, status)
