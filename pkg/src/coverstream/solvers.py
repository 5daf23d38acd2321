"""Semi-streaming set-cover algorithms.

Progressive greedy runs geometrically decreasing contribution thresholds
``n**(num/den)``, one per pass; the folded variant saves a pass by building a
threshold-1 backup solution during its last pass.  The partial cover
solver is an unweighted reconstruction of the Emek-Rosén one-pass scheme:
elements sit at power-of-two levels and keep their first set as a backup,
and the threshold is chosen after the stream ends.  It is iterated over
the uncovered remainder.

All thresholds are compared exactly in integers; nothing here touches
floating point.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exceptions import InfeasibleSlackError
from .instance import Certificate, MeteredStream, SpaceMeter, as_fraction, coverage_quota

__all__ = [
    "PassStats",
    "ErState",
    "threshold_ge",
    "threshold_floor",
    "greedy_pass",
    "prog_greedy_naive",
    "prog_greedy",
    "er_pass",
    "partial_select",
    "partial_cover_solve",
]


def threshold_ge(c: int, n: int, num: int, den: int) -> bool:
    """Decide ``c >= n**(num/den)`` exactly."""
    return c**den >= n**num


def threshold_floor(n: int, num: int, den: int) -> int:
    """Smallest integer c with ``threshold_ge(c, n, num, den)``."""
    lo, hi = 0, 1
    while not threshold_ge(hi, n, num, den):
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if threshold_ge(mid, n, num, den):
            hi = mid
        else:
            lo = mid + 1
    return lo


@dataclass
class PassStats:
    num: int
    den: int
    added: int
    max_contrib: int
    uncovered_at_start: int
    added_ids: tuple = ()


def _meter(meter):
    return meter if meter is not None else SpaceMeter()


def greedy_pass(stream: MeteredStream, num: int, den: int, sol: set, coverer: list,
                meter: Optional[SpaceMeter] = None, extra=None) -> PassStats:
    """One pass accepting every set whose contribution reaches ``n**(num/den)``.

    ``coverer`` is indexed by element (slot 0 unused).  ``extra``, when
    given, is a callable run on every record during the same traversal; the
    folded solver uses it to drive its backup pass.
    """
    meter = _meter(meter)
    n = stream.n
    uncovered = sum(1 for x in range(1, n + 1) if coverer[x] == 0)
    added = []
    max_contrib = 0
    for rec in stream.replay():
        new = [x for x in rec.elements if coverer[x] == 0]
        c = len(new)
        max_contrib = max(max_contrib, c)
        # c > 0 only matters for n == 0, where every threshold is 0
        if c > 0 and threshold_ge(c, n, num, den):
            sol.add(rec.id)
            meter.charge(1)
            added.append(rec.id)
            for x in new:
                coverer[x] = rec.id
        if extra is not None:
            extra(rec)
    return PassStats(num, den, len(added), max_contrib, uncovered, tuple(added))


def prog_greedy_naive(stream: MeteredStream, p: int, meter: Optional[SpaceMeter] = None,
                      stats: Optional[list] = None) -> Certificate:
    """p passes with thresholds ``n**(1 - j/p)``, j = 1..p."""
    if p < 1:
        raise ValueError("p must be >= 1")
    meter = _meter(meter)
    n = stream.n
    coverer = [0] * (n + 1)
    meter.charge(n)
    sol = set()
    for j in range(1, p + 1):
        st = greedy_pass(stream, p - j, p, sol, coverer, meter)
        if stats is not None:
            stats.append(st)
    return Certificate.from_arrays(coverer, sol)


def prog_greedy(stream: MeteredStream, p: int, meter: Optional[SpaceMeter] = None,
                stats: Optional[list] = None) -> Certificate:
    """p-pass folded progressive greedy; same output as the naive version with p + 1 passes."""
    if p < 1:
        raise ValueError("p must be >= 1")
    meter = _meter(meter)
    n = stream.n
    den = p + 1
    coverer = [0] * (n + 1)
    backup = [0] * (n + 1)
    meter.charge(2 * n)
    sol, alt = set(), set()
    for j in range(1, p):
        st = greedy_pass(stream, den - j, den, sol, coverer, meter)
        if stats is not None:
            stats.append(st)

    def backup_step(rec):
        new = [x for x in rec.elements if backup[x] == 0]
        if new:
            alt.add(rec.id)
            meter.charge(1)
            for x in new:
                backup[x] = rec.id

    st = greedy_pass(stream, 1, den, sol, coverer, meter, extra=backup_step)
    if stats is not None:
        stats.append(st)
    for x in range(1, n + 1):
        if coverer[x] == 0 and backup[x]:
            if backup[x] not in sol:
                sol.add(backup[x])
                meter.charge(1)
            coverer[x] = backup[x]
    return Certificate.from_arrays(coverer, sol)


# --- partial cover -------------------------------------------------------

@dataclass
class ErState:
    """Per-element levels, owners and first-set backups after one pass.

    Arrays are indexed by element, slot 0 unused; ``level[x] is None`` means
    no T-set has claimed x.  ``active`` lists the elements the pass worked on.
    """

    n: int
    level: list
    owner: list
    backup: list
    tset_sizes: dict = field(default_factory=dict)
    active: tuple = ()


class _ErBuilder:
    """Incremental level-rule state so several passes can share one traversal."""

    def __init__(self, n, active, meter):
        self.n = n
        self.active = tuple(active)
        self.is_active = [False] * (n + 1)
        for x in self.active:
            self.is_active[x] = True
        self.level = [None] * (n + 1)
        self.owner = [0] * (n + 1)
        self.backup = [0] * (n + 1)
        self.sizes = {}
        self.meter = meter
        self.words = 4 * n
        meter.charge(self.words)

    def feed(self, rec):
        level = self.level
        elems = [x for x in rec.elements if self.is_active[x]]
        if not elems:
            return
        for x in elems:
            if self.backup[x] == 0:
                self.backup[x] = rec.id
        # eligibility only widens as i grows, so the first hit scanning down
        # is the largest feasible level
        for i in range(len(elems).bit_length() - 1, -1, -1):
            t = [x for x in elems if level[x] is None or level[x] < i]
            if len(t) >= 1 << i:
                for x in t:
                    level[x] = i
                    self.owner[x] = rec.id
                self.sizes[rec.id] = len(t)
                self.meter.charge(2)
                self.words += 2
                break

    def finish(self) -> "ErState":
        return ErState(self.n, self.level, self.owner, self.backup, self.sizes, self.active)


def er_pass(stream: MeteredStream, meter: Optional[SpaceMeter] = None,
            active=None) -> ErState:
    """One pass of the level rule, restricted to ``active`` elements (default: all).

    An arriving set claims the largest ``T_i = {x in S : level[x] < i or
    unclaimed}`` with ``|T_i| >= 2**i`` and lifts those elements to level i.
    Independently each element remembers the first set containing it.
    """
    meter = _meter(meter)
    if active is None:
        active = range(1, stream.n + 1)
    builder = _ErBuilder(stream.n, active, meter)
    for rec in stream.replay():
        builder.feed(rec)
    return builder.finish()


def _select_at(state: ErState, i: int, quota: int):
    """Candidate certificate for threshold 2**i; returns (sol, coverer) or None."""
    sol = set()
    cov = dict()
    low = []
    for x in state.active:
        lv = state.level[x]
        if lv is not None and lv >= i:
            cov[x] = state.owner[x]
            sol.add(state.owner[x])
        else:
            low.append(x)
    covered = len(cov)
    if covered < quota:
        # free coverage first: chosen owners and backups already in sol
        rest = []
        for x in low:
            for cand in (state.owner[x], state.backup[x]):
                if cand and cand in sol:
                    cov[x] = cand
                    covered += 1
                    break
            else:
                rest.append(x)
        for x in rest:
            if covered >= quota:
                break
            b = state.backup[x]
            if b:
                cov[x] = b
                sol.add(b)
                covered += 1
        if covered < quota:
            return None
    return sol, cov


def partial_select(state: ErState, epsilon=0, quota: Optional[int] = None) -> Certificate:
    """Post-stream threshold choice.

    For each threshold ``2**i`` the elements at level >= i are certified by
    their T-set owner, and lower-level elements are covered from backups in
    ascending element order only as far as the quota demands.  The cheapest
    candidate wins; ties go to the larger threshold.  ``quota`` (count of
    active elements that must end covered) overrides ``epsilon``.
    """
    if quota is None:
        quota = coverage_quota(len(state.active), epsilon)
    top = max((lv for lv in state.level[1:] if lv is not None), default=-1)
    best = None
    for i in range(top + 1, -1, -1):
        cand = _select_at(state, i, quota)
        if cand is not None and (best is None or len(cand[0]) < len(best[0])):
            best = cand
    if best is None:
        raise InfeasibleSlackError(
            f"cannot cover {quota} of {len(state.active)} elements even with every backup"
        )
    sol, cov = best
    coverer = [0] * (state.n + 1)
    for x, sid in cov.items():
        coverer[x] = sid
    return Certificate.from_arrays(coverer, sol)


def _allowed_uncovered(r: int, rate: Fraction, root: int) -> int:
    """Largest integer u with ``u <= rate**(1/root) * r``, i.e. ``u**root <= rate * r**root``."""
    bound = rate * r**root
    lo, hi = 0, r
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid**root <= bound:
            lo = mid
        else:
            hi = mid - 1
    return lo


@dataclass
class _Scheme:
    name: str
    coverer: list
    sol: set
    last: Optional[ErState] = None


def partial_cover_solve(stream: MeteredStream, p: int, epsilon=0,
                        meter: Optional[SpaceMeter] = None, stats: Optional[dict] = None) -> Certificate:
    """p-pass partial cover: two residual schemes run side by side, smaller result wins.

    Scheme ``a`` leaves at most an ``eps**(1/p)`` fraction of the remainder
    uncovered per pass; scheme ``b`` leaves at most ``n**(-1/(p+1))`` of it
    and finishes by covering every leftover from its backups.  Both share
    each traversal of the stream, so exactly p passes are used.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    eps = as_fraction(epsilon or 0)
    if not 0 <= eps <= 1:
        raise ValueError("epsilon must lie in [0, 1]")
    meter = _meter(meter)
    n = stream.n
    target = coverage_quota(n, eps)
    schemes = [_Scheme("a", [0] * (n + 1), set()), _Scheme("b", [0] * (n + 1), set())]
    meter.charge(2 * n)
    # per-pass uncovered allowance u on a remainder of r: u**root <= rate * r**root
    rates = (eps, Fraction(1, max(n, 1)))
    roots = (p, p + 1)

    for j in range(1, p + 1):
        builders = [
            _ErBuilder(n, [x for x in range(1, n + 1) if s.coverer[x] == 0], meter)
            for s in schemes
        ]
        for rec in stream.replay():
            for bld in builders:
                bld.feed(rec)
        for s, bld, rate, root in zip(schemes, builders, rates, roots):
            state = bld.finish()
            r = len(state.active)
            allowed = _allowed_uncovered(r, rate, root)
            coverable = sum(1 for x in state.active if state.backup[x])
            cert = partial_select(state, quota=min(r - allowed, coverable))
            for x, cid in enumerate(cert.coverer, start=1):
                if cid and s.coverer[x] == 0:
                    s.coverer[x] = cid
            for sid in cert.sol - s.sol:
                s.sol.add(sid)
                meter.charge(1)
            if j < p:
                meter.release(bld.words)
            s.last = state

    b = schemes[1]
    for x in range(1, n + 1):
        if b.coverer[x] == 0 and b.last.backup[x]:
            b.coverer[x] = b.last.backup[x]
            if b.coverer[x] not in b.sol:
                b.sol.add(b.coverer[x])
                meter.charge(1)

    done = []
    for s in schemes:
        covered = sum(1 for x in range(1, n + 1) if s.coverer[x])
        if covered >= target:
            done.append(s)
    if not done:
        raise InfeasibleSlackError(f"neither scheme reached coverage {target} of {n}")
    best = min(done, key=lambda s: len(s.sol))
    if stats is not None:
        stats["scheme"] = best.name
        stats["sizes"] = {s.name: len(s.sol) for s in schemes}
    return Certificate.from_arrays(best.coverer, best.sol)
