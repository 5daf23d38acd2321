"""Adversarial instance factories.

* :func:`tightness_instance` - streams on which naive progressive greedy
  returns ``p(q-1)`` sets although one set covers everything.
* :func:`mpj_generate` / :func:`encode_mpj` - pointer-jumping inputs on an
  edifice and their encoding as set-cover instances, one group of sets per
  player, streamed player by player.
* :func:`partial_reduction` - the same encoding over a rainbow-merged
  edifice, read as a partial-cover instance.
"""
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .baselines import DEFAULT_NODE_BUDGET, exact_cover
from .edifice import (
    Edifice,
    MergedEdifice,
    edifice_from_descriptor,
    make_wide,
    mask_to_points,
    rainbow_merge,
)
from .exceptions import ArityTooLargeError, OracleBudgetExceeded, ParamViolation
from .instance import Instance, SetRecord, as_fraction, coverage_quota

__all__ = [
    "GENERATOR_VERSION",
    "tightness_instance",
    "tightness_element",
    "sandwich_check",
    "MpjInput",
    "ReductionInstance",
    "DichotomyReport",
    "mpj_generate",
    "encode_mpj",
    "dichotomy_check",
    "partial_delta",
    "partial_reduction",
    "random_instance",
]

GENERATOR_VERSION = "1"


# --- tightness family ----------------------------------------------------------

def tightness_element(point, q: int) -> int:
    """Element id of a tuple in ``[q]^p``: mixed-radix rank, first coordinate most significant, plus one.

    The excluded corner ``(q, ..., q)`` has the largest rank, so skipping it
    keeps ids contiguous.
    """
    rank = 0
    for c in point:
        rank = rank * q + (c - 1)
    return rank + 1


def tightness_instance(p: int, q: int) -> Instance:
    """``[q]^p`` minus its top corner; stream ``σ_p, ..., σ_1`` then the whole universe.

    ``σ_j`` holds ``S^y_j = {x : x_1 = ... = x_{j-1} = q, x_j = y}`` for
    ``y = 1..q-1`` in ascending order.
    """
    if p < 2:
        raise ParamViolation(f"tightness family needs p >= 2, got {p}")
    if q < 2:
        raise ParamViolation(f"tightness family needs q >= 2, got {q}")
    n = q**p - 1
    sets = []
    for j in range(p, 0, -1):
        width = p - j
        for y in range(1, q):
            prefix = (q,) * (j - 1) + (y,)
            elems = []
            for rank in range(q**width):
                suffix = []
                for _ in range(width):
                    rank, c = divmod(rank, q)
                    suffix.append(c + 1)
                elems.append(tightness_element(prefix + tuple(reversed(suffix)), q))
            sets.append(sorted(elems))
    sets.append(list(range(1, n + 1)))
    return Instance.from_sets(n, sets)


def sandwich_check(p: int, q: int) -> bool:
    """Whether ``q^(p-j) - 1 < n^(1-j/p) <= q^(p-j)`` for every pass j, with ``n = q^p - 1``.

    Raised to the p-th power, so the comparison is exact.
    """
    if p < 2 or q < 2:
        raise ParamViolation("sandwich check needs p >= 2 and q >= 2")
    n = q**p - 1
    return all(
        (q ** (p - j) - 1) ** p < n ** (p - j) <= q ** ((p - j) * p) for j in range(1, p + 1)
    )


# --- pointer jumping -----------------------------------------------------------

@dataclass
class MpjInput:
    """Pointer-jumping input on a ``k``-level tree capped at ``arity`` children per vertex.

    ``pointers`` maps every internal path to a child index; ``leaf_bits``
    maps every leaf path to 0 or 1.
    """

    k: int
    arity: int
    pointers: dict
    leaf_bits: dict
    target_value: int
    seed: Optional[int] = None

    def path(self) -> list:
        """Vertices on the pointer chain, root first."""
        out = [()]
        for _ in range(self.k - 1):
            v = out[-1]
            out.append(v + (self.pointers[v],))
        return out

    def leaf(self) -> tuple:
        return self.path()[-1]

    @property
    def value(self) -> int:
        return self.leaf_bits[self.leaf()]


def _resolve(edifice):
    if isinstance(edifice, Edifice):
        return edifice
    return edifice_from_descriptor(edifice)


def mpj_generate(edifice, t_sub: Optional[int] = None, seed: int = 0,
                 target_value: int = 1) -> MpjInput:
    """Seeded pointers and leaf bits on the ``t_sub``-ary prefix subtree.

    Internal vertices are visited level by level in lexicographic order,
    then leaves; the leaf the pointers reach gets ``target_value``.
    """
    edifice = _resolve(edifice)
    t = edifice.arity if t_sub is None else t_sub
    if t > edifice.arity:
        raise ArityTooLargeError(f"t_sub = {t} exceeds the edifice arity {edifice.arity}")
    if t < 1:
        raise ParamViolation("t_sub must be >= 1")
    if target_value not in (0, 1):
        raise ParamViolation("target value must be 0 or 1")
    rng = random.Random(seed)
    pointers = {}
    for depth in range(edifice.k - 1):
        for path in edifice.paths(depth, t):
            pointers[path] = rng.randrange(t)
    leaf_bits = {path: rng.getrandbits(1) for path in edifice.paths(edifice.k - 1, t)}
    mpj = MpjInput(edifice.k, t, pointers, leaf_bits, target_value, seed)
    mpj.leaf_bits[mpj.leaf()] = target_value
    return mpj


@dataclass
class ReductionInstance:
    instance: Instance
    player_of: dict
    mpj: MpjInput
    meta: dict = field(default_factory=dict)
    q1: int = 0
    q0: Fraction = Fraction(0)
    quota: int = 0
    path_set_ids: tuple = ()

    @property
    def q0_bound(self) -> int:
        return math.ceil(self.q0)

    def sidecar(self) -> dict:
        return {
            "generator": self.meta.get("generator"),
            "version": GENERATOR_VERSION,
            "params": self.meta.get("edifice"),
            "seed": self.mpj.seed,
            "t_sub": self.mpj.arity,
            "player_of": {str(k): v for k, v in sorted(self.player_of.items())},
            "mpj_value": self.mpj.value,
            "q1": self.q1,
            "q0": str(self.q0),
            "quota": self.quota,
            "path_set_ids": list(self.path_set_ids),
            **{k: v for k, v in self.meta.items() if k not in ("generator", "edifice")},
        }


def _encode(edifice: Edifice, mpj: MpjInput):
    """Sets in stream order as (player, mask) plus the ids along the pointer chain."""
    k, t = edifice.k, mpj.arity
    entries = []
    leaf_id = None
    v1 = mpj.leaf()
    for z in edifice.paths(k - 1, t):
        if mpj.leaf_bits[z]:
            entries.append((1, edifice.variety_mask(z)))
            if z == v1:
                leaf_id = len(entries)
    for x in range(edifice.n):
        entries.append((1, 1 << x))
    chain = set(mpj.path()[:-1])
    chain_ids = []
    for level in range(2, k + 1):
        for u in edifice.paths(k - level, t):
            v = u + (mpj.pointers[u],)
            entries.append((level, edifice.variety_mask(u) & ~edifice.variety_mask(v)))
            if u in chain:
                chain_ids.append(len(entries))
    path_ids = tuple(chain_ids) + ((leaf_id,) if leaf_id is not None else ())
    return entries, path_ids


def encode_mpj(edifice, mpj: MpjInput, epsilon=None) -> ReductionInstance:
    """Pointer at u to v becomes ``X_u minus X_v`` (player = level of u); each 1-bit leaf z
    becomes ``X_z`` and every singleton is added, both for player 1."""
    edifice = _resolve(edifice)
    if mpj.k != edifice.k or mpj.arity > edifice.arity:
        raise ParamViolation("MPJ input does not fit the edifice")
    entries, path_ids = _encode(edifice, mpj)
    records = tuple(
        SetRecord(i, mask_to_points(mask)) for i, (_, mask) in enumerate(entries, start=1)
    )
    player_of = {i: player for i, (player, _) in enumerate(entries, start=1)}
    inst = Instance(edifice.n, records, epsilon)
    p = edifice.k - 1
    red = ReductionInstance(
        inst, player_of, mpj,
        meta={"generator": "mpj", "edifice": edifice.descriptor()},
        q1=p + 1,
        q0=Fraction(edifice.leaf_bound, edifice.intersection_bound),
        quota=edifice.n,
        path_set_ids=path_ids,
    )
    return red


@dataclass
class DichotomyReport:
    mpj_value: int
    opt: int
    q1: int
    q0: Fraction
    q0_bound: int
    quota: int
    consistent: bool
    explored_nodes: int = 0

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["q0"] = str(self.q0)
        return d


def dichotomy_check(reduction: ReductionInstance,
                    oracle_budget: int = DEFAULT_NODE_BUDGET) -> DichotomyReport:
    """Confirm the small/large optimum gap with the exact oracle.

    A 1-bit input must admit a total cover of at most ``q1`` sets; a 0-bit
    input must force at least ``⌈q0⌉`` sets at the reduction's quota.
    """
    value = reduction.mpj.value
    quota = reduction.instance.n if value == 1 else reduction.quota
    res = exact_cover(reduction.instance, quota, node_budget=oracle_budget)
    if not res.exact:
        raise OracleBudgetExceeded(
            f"oracle gave up after {res.explored_nodes} nodes (budget {oracle_budget})"
        )
    if value == 1:
        ok = res.opt_size <= reduction.q1
    else:
        ok = res.opt_size >= reduction.q0_bound
    return DichotomyReport(value, res.opt_size, reduction.q1, reduction.q0,
                           reduction.q0_bound, quota, ok, res.explored_nodes)


def partial_delta(p: int, q: int, epsilon) -> Fraction:
    """``δ = ⌈δ̃ q⌉ / q`` with ``δ̃ = (2ε)^(1/p)``, rounded exactly."""
    eps = as_fraction(epsilon)
    target = 2 * eps * q**p  # need the least integer c with c**p >= (2 eps)^... * q**p
    c = 0
    while c**p < target:
        c += 1
    return Fraction(c, q)


def partial_reduction(edifice, epsilon, seed: int = 0, target_value: int = 1,
                      t_sub: Optional[int] = None) -> ReductionInstance:
    """Pointer-jumping encoding over a rainbow-merged edifice, as a partial-cover instance.

    ``edifice`` is the base algebraic edifice (or an already merged one).
    Epsilon is raised to ``n^(-p/(p+1)) = q^(-p)`` when smaller; the
    requested and effective values are both kept in ``meta``.  With
    ``epsilon == 0`` this is plain :func:`encode_mpj` on the base edifice.
    """
    edifice = _resolve(edifice)
    requested = as_fraction(epsilon)
    if requested == 0:
        mpj = mpj_generate(edifice, t_sub, seed, target_value)
        red = encode_mpj(edifice, mpj, epsilon=Fraction(0))
        red.meta.update(generator="partial", epsilon_requested="0", epsilon="0")
        return red
    if isinstance(edifice, MergedEdifice):
        merged = edifice
        base = edifice.base
        delta = edifice.wide.delta
        eff = requested
    else:
        base = edifice
        p = base.k - 1
        floor_eps = Fraction(1, base.q**p)
        eff = max(requested, floor_eps)
        if eff > Fraction(1, 2):
            raise ParamViolation(f"epsilon must be at most 1/2, got {eff}")
        delta = partial_delta(p, base.q, eff)
        merged = rainbow_merge(make_wide(base, delta))
    mpj = mpj_generate(merged, t_sub, seed, target_value)
    red = encode_mpj(merged, mpj, epsilon=eff)
    n = merged.n
    leaf_size = merged.variety_mask(mpj.leaf()).bit_count()
    red.q0 = Fraction(leaf_size) - eff * n
    red.q0 /= merged.d
    red.quota = coverage_quota(n, eff)
    red.meta.update(
        generator="partial",
        epsilon_requested=str(requested),
        epsilon=str(eff),
        clamped=eff != requested,
        delta=str(delta),
        merged_params=list(merged.params),
    )
    return red


# --- random benchmark instances --------------------------------------------------

def random_instance(rng: random.Random, n_range=(5, 50), m_range=(3, 40),
                    density_range=(0.05, 0.4), full_set_prob=0.5) -> Instance:
    """Random total-cover instance.

    Each set takes each element independently with a sampled density;
    uncovered elements are then dropped into random sets, and with
    probability ``full_set_prob`` one set is replaced by the whole universe.
    """
    n = rng.randint(*n_range)
    m = rng.randint(*m_range)
    density = rng.uniform(*density_range)
    sets = [{x for x in range(1, n + 1) if rng.random() < density} for _ in range(m)]
    covered = set().union(*sets)
    for x in range(1, n + 1):
        if x not in covered:
            sets[rng.randrange(m)].add(x)
    if rng.random() < full_set_prob:
        sets[rng.randrange(m)] = set(range(1, n + 1))
    sets = [s for s in sets if s]
    return Instance.from_sets(n, sets)
