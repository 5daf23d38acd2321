"""Algebraic edifices over GF(q)^k.

A vertex is addressed by its path from the root: entry ``r`` is the index
of the equation labelling the edge that leaves level ``k - r``, which is an
equation of rank ``k - 1 - r``.  Nothing is materialized; varieties are
computed on demand (and cached) as bitmasks over the universe, bit
``id - 1`` standing for element ``id``.

Points ``(x, y_1, ..., y_{k-1})`` map to element ids through
:func:`point_encode`.
"""
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional

from .exceptions import (
    CapExceededError,
    DegenerateWidthError,
    IndexOutOfRangeError,
    ParamViolation,
)
from .finitefield import Field, Poly, field_from_order, field_new, poly_eval, prime_power
from .instance import as_fraction

__all__ = [
    "EdificeParams",
    "EdificialEq",
    "eq_count",
    "index_to_eq",
    "eq_to_index",
    "point_encode",
    "point_decode",
    "Edifice",
    "AlgebraicEdifice",
    "WideEdifice",
    "MergedEdifice",
    "VerificationReport",
    "variety_points",
    "verify_edifice",
    "similarity_classes",
    "make_wide",
    "rainbow_merge",
    "wideness_issues",
    "edifice_from_descriptor",
    "mask_to_points",
    "DEFAULT_VERTEX_CAP",
]

DEFAULT_VERTEX_CAP = 10**5


@dataclass(frozen=True)
class EdificeParams:
    k: int
    d: int
    q: int

    def __post_init__(self):
        if self.k < 1:
            raise ParamViolation(f"k must be >= 1, got {self.k}")
        if self.d < 0:
            raise ParamViolation(f"d must be >= 0, got {self.d}")
        if prime_power(self.q) is None:
            raise ParamViolation(f"q = {self.q} is not a prime power")
        if self.q < self.d + self.k:
            raise ParamViolation(f"need q >= d + k, got q={self.q}, d+k={self.d + self.k}")

    @property
    def t(self) -> int:
        return self.q ** (self.d + self.k - 1) * (self.q - 1)

    @property
    def n(self) -> int:
        return self.q**self.k


def eq_count(k: int, d: int, q: int) -> int:
    """Number of distinct edificial equations of each rank."""
    return EdificeParams(k, d, q).t


@dataclass(frozen=True)
class EdificialEq:
    """``y_rank = a_1 y_1 + ... + a_{rank-1} y_{rank-1} + a_rank * f(x)``.

    ``ell`` holds ``a_1..a_rank``; ``f`` holds the non-leading coefficients
    ``c_0..c_{deg-1}`` of the monic polynomial f.
    """

    rank: int
    ell: tuple
    f: tuple

    @property
    def poly(self) -> Poly:
        return Poly(self.f + (1,))


def _check_rank(params, rank):
    if not 1 <= rank <= params.k - 1:
        raise ParamViolation(f"rank must lie in [1, {params.k - 1}], got {rank}")


def index_to_eq(params: EdificeParams, rank: int, idx: int) -> EdificialEq:
    """Mixed-radix decoding: ``a_rank - 1`` is the top digit, then
    ``a_{rank-1}..a_1``, then ``c_high..c_0`` with ``c_0`` least significant."""
    _check_rank(params, rank)
    q = params.q
    if not 0 <= idx < params.t:
        raise IndexOutOfRangeError(f"equation index {idx} outside [0, {params.t})")
    nf = params.d + params.k - rank
    f = []
    for _ in range(nf):
        idx, c = divmod(idx, q)
        f.append(c)
    ell_low = []
    for _ in range(rank - 1):
        idx, a = divmod(idx, q)
        ell_low.append(a)
    return EdificialEq(rank, tuple(ell_low) + (idx + 1,), tuple(f))


def eq_to_index(params: EdificeParams, eq: EdificialEq) -> int:
    _check_rank(params, eq.rank)
    q = params.q
    if len(eq.ell) != eq.rank or len(eq.f) != params.d + params.k - eq.rank:
        raise ParamViolation("equation shape does not match params")
    if eq.ell[-1] == 0:
        raise ParamViolation("leading linear coefficient must be nonzero")
    idx = eq.ell[-1] - 1
    for a in reversed(eq.ell[:-1]):
        idx = idx * q + a
    for c in reversed(eq.f):
        idx = idx * q + c
    return idx


def point_encode(field: Field, point) -> int:
    q = field.q
    ident = 0
    for c in reversed(point):
        ident = ident * q + c
    return ident + 1


def point_decode(field: Field, ident: int, k: int) -> tuple:
    q = field.q
    v = ident - 1
    out = []
    for _ in range(k):
        v, c = divmod(v, q)
        out.append(c)
    return tuple(out)


def mask_to_points(mask: int) -> tuple:
    out = []
    b = 0
    while mask:
        if mask & 1:
            out.append(b + 1)
        mask >>= 1
        b += 1
    return tuple(out)


class Edifice:
    """Common path-addressed interface used by the verifier and the reductions.

    Subclasses define ``k``, ``arity``, ``n``, ``leaf_bound`` (minimum leaf
    size), ``intersection_bound`` and ``_variety_mask``.
    """

    k: int
    arity: int
    n: int
    leaf_bound: int
    intersection_bound: int

    def level(self, path) -> int:
        return self.k - len(path)

    def is_leaf(self, path) -> bool:
        return len(path) == self.k - 1

    def variety_mask(self, path) -> int:
        return self._cached_mask(tuple(path))

    def variety(self, path) -> tuple:
        return mask_to_points(self.variety_mask(path))

    def vertex_count(self, arity=None) -> int:
        t = self.arity if arity is None else arity
        return sum(t**i for i in range(self.k))

    def paths(self, depth: int, arity=None):
        t = self.arity if arity is None else arity
        return product(range(t), repeat=depth)

    def label_issues(self) -> list:
        return []

    def descriptor(self) -> dict:
        raise NotImplementedError


class AlgebraicEdifice(Edifice):
    """The (k, d, q, q^(d+k)(1 - 1/q))-edifice cut out by edificial equations."""

    def __init__(self, params: EdificeParams, field: Optional[Field] = None):
        self.params = params
        self.field = field or field_from_order(params.q)
        if self.field.q != params.q:
            raise ParamViolation("field order does not match q")
        self.k = params.k
        self.d = params.d
        self.q = params.q
        self.arity = params.t
        self.n = params.n
        self.leaf_bound = params.q
        self.intersection_bound = params.d + params.k - 1
        self._cached_mask = lru_cache(maxsize=None)(self._variety_mask)
        self._fvals = lru_cache(maxsize=None)(self._f_values)

    def __repr__(self):
        return f"AlgebraicEdifice(k={self.k}, d={self.d}, q={self.q})"

    def equation(self, rank: int, idx: int) -> EdificialEq:
        return index_to_eq(self.params, rank, idx)

    def _f_values(self, rank, idx):
        eq = self.equation(rank, idx)
        return tuple(poly_eval(self.field, eq.poly, x) for x in range(self.q))

    def path_equations(self, path):
        """Equations along the path, as ``{rank: EdificialEq}``."""
        return {self.k - 1 - r: self.equation(self.k - 1 - r, idx) for r, idx in enumerate(path)}

    def points(self, path):
        """Points of the variety as coordinate tuples, computed directly."""
        F = self.field
        k, q = self.k, self.q
        j = k - len(path)
        fixed = sorted((
            (self.k - 1 - r, self.equation(self.k - 1 - r, idx), self._fvals(self.k - 1 - r, idx))
            for r, idx in enumerate(path)
        ), key=lambda item: item[0])
        out = []
        for free in product(range(q), repeat=j):
            coords = list(free) + [0] * (k - j)  # coords[0] = x, coords[i] = y_i
            x = coords[0]
            for rank, eq, fv in fixed:
                acc = F.mul(eq.ell[-1], fv[x])
                for s in range(1, rank):
                    if eq.ell[s - 1]:
                        acc = F.add(acc, F.mul(eq.ell[s - 1], coords[s]))
                coords[rank] = acc
            out.append(tuple(coords))
        return out

    def _variety_mask(self, path):
        mask = 0
        for pt in self.points(path):
            mask |= 1 << (point_encode(self.field, pt) - 1)
        return mask

    def label_issues(self) -> list:
        issues = []
        for rank in range(1, self.k):
            seen = set()
            # only the label table matters; it is shared by every vertex of the level
            for idx in range(self.arity):
                eq = self.equation(rank, idx)
                if eq.ell[-1] == 0:
                    issues.append(f"rank {rank} label {idx}: zero leading linear coefficient")
                if len(eq.f) != self.d + self.k - rank:
                    issues.append(f"rank {rank} label {idx}: wrong degree")
                key = (eq.ell, eq.f)
                if key in seen:
                    issues.append(f"rank {rank} label {idx}: duplicate label")
                seen.add(key)
                if len(issues) > 20:
                    return issues
        return issues

    def determined_coefficients(self, path):
        """Coefficients of each fixed ``y_i`` as a linear form in ``f_{k-1}(x), ..., f_{k-i}(x)``.

        Obtained by composing the linear forms along a leaf-to-root chain;
        only defined for leaves.  Maps rank i to a tuple of length i.
        """
        if not self.is_leaf(path):
            raise ParamViolation("determined forms exist for leaves only")
        F = self.field
        eqs = self.path_equations(path)
        forms = {}
        for i in range(1, self.k):
            eq = eqs[i]
            coeffs = [0] * i
            for s in range(1, i):
                for r, c in enumerate(forms[s]):
                    coeffs[r] = F.add(coeffs[r], F.mul(eq.ell[s - 1], c))
            coeffs[i - 1] = F.add(coeffs[i - 1], eq.ell[-1])
            forms[i] = tuple(coeffs)
        return forms

    def descriptor(self) -> dict:
        desc = {"k": self.k, "d": self.d, "q": self.q}
        desc.update(self.field.descriptor())
        return desc


def variety_points(edifice: Edifice, path=()) -> tuple:
    """Sorted element ids of the variety at ``path``."""
    return edifice.variety(tuple(path))


# --- wideness and merging ---------------------------------------------------

def similarity_classes(edifice: AlgebraicEdifice, path=()) -> list:
    """Partition of the child indices of a non-leaf vertex into similarity classes.

    Two labels are similar when they share the linear form and their
    polynomials differ by a constant, i.e. everything but ``c_0`` agrees.
    """
    path = tuple(path)
    if edifice.is_leaf(path):
        raise ParamViolation("leaves have no children")
    return _classes_for_rank(edifice, edifice.level(path) - 1)


def _classes_for_rank(edifice, rank):
    groups = {}
    for idx in range(edifice.arity):
        eq = edifice.equation(rank, idx)
        groups.setdefault((eq.ell, eq.f[1:]), []).append(idx)
    return sorted(groups.values())


class WideEdifice:
    """Groups of pairwise-disjoint children, identical at every vertex of a level.

    ``groups[rank]`` lists the b-element child groups for edges labelled by
    rank-``rank`` equations.
    """

    def __init__(self, base: AlgebraicEdifice, delta, b: int, t_prime: int, groups: dict):
        self.base = base
        self.delta = delta
        self.b = b
        self.t_prime = t_prime
        self.groups = groups

    def class_map(self, path=()):
        rank = self.base.level(tuple(path)) - 1
        return self.groups[rank]

    def descriptor(self) -> dict:
        desc = self.base.descriptor()
        desc.update({"delta": str(self.delta), "b": self.b, "t_prime": self.t_prime})
        return desc


def make_wide(edifice: AlgebraicEdifice, delta) -> WideEdifice:
    """Split every similarity class into ``⌊1/δ⌋`` groups of ``⌊δq⌋`` consecutive children.

    Children left over at the top of each class are dropped.
    """
    delta = as_fraction(delta)
    if not 0 < delta <= 1:
        raise ParamViolation(f"delta must lie in (0, 1], got {delta}")
    q = edifice.q
    b = int(delta * q)  # floor for positive rationals
    if b == 0:
        raise DegenerateWidthError(f"delta = {delta} gives width floor(delta q) = 0")
    per_class = int(1 / delta)
    groups = {}
    for rank in range(1, edifice.k):
        out = []
        for cls in _classes_for_rank(edifice, rank):
            for g in range(per_class):
                out.append(tuple(cls[g * b:(g + 1) * b]))
        groups[rank] = out
    t_prime = per_class * (edifice.arity // q)
    return WideEdifice(edifice, delta, b, t_prime, groups)


class MergedEdifice(Edifice):
    """Rainbow merge of a wide edifice.

    A vertex is a rainbow (sequence of group colours); its supervariety is the
    disjoint union of the varieties of all base vertices whose edge colours
    spell that rainbow.  Parameters are ``(k, b^k (d+k-1), b^(k-1) q, t')``.
    """

    def __init__(self, wide: WideEdifice):
        base = wide.base
        self.wide = wide
        self.base = base
        self.k = base.k
        self.b = wide.b
        self.d = wide.b**base.k * (base.d + base.k - 1)
        self.q = wide.b ** (base.k - 1) * base.q
        self.arity = wide.t_prime
        self.n = base.n
        self.leaf_bound = self.q
        self.intersection_bound = self.d + self.k - 1
        self._cached_mask = lru_cache(maxsize=None)(self._variety_mask)

    def __repr__(self):
        return f"MergedEdifice(k={self.k}, d={self.d}, q={self.q}, t={self.arity})"

    @property
    def params(self):
        return (self.k, self.d, self.q, self.arity)

    def constituents(self, rainbow):
        """Base-edifice paths merged into the supervertex ``rainbow``."""
        choices = []
        for r, colour in enumerate(rainbow):
            rank = self.k - 1 - r
            choices.append(self.wide.groups[rank][colour])
        return list(product(*choices))

    def _variety_mask(self, rainbow):
        mask = 0
        for path in self.constituents(rainbow):
            mask |= self.base.variety_mask(path)
        return mask

    def descriptor(self) -> dict:
        return self.wide.descriptor()


def rainbow_merge(wide: WideEdifice) -> MergedEdifice:
    return MergedEdifice(wide)


def wideness_issues(wide: WideEdifice, cap: int = DEFAULT_VERTEX_CAP) -> list:
    """Check W1-W3 at every non-leaf vertex of the base tree.

    W1 pairwise-disjoint groups, W2 each of size b, W3 pairwise-disjoint
    varieties within a group.
    """
    base = wide.base
    issues = []
    if len(wide.groups.get(base.k - 1, ())) != wide.t_prime and base.k > 1:
        issues.append(f"expected {wide.t_prime} groups, got {len(wide.groups[base.k - 1])}")
    for rank, groups in wide.groups.items():
        flat = [c for g in groups for c in g]
        if len(flat) != len(set(flat)):
            issues.append(f"W1: groups overlap at rank {rank}")
        issues.extend(
            f"W2: group {g} at rank {rank} has size {len(g)} != {wide.b}"
            for g in groups if len(g) != wide.b
        )
    internal = sum(base.arity**i for i in range(base.k - 1))
    if internal > cap:
        raise CapExceededError(f"{internal} internal vertices exceed the cap of {cap}")
    for depth in range(base.k - 1):
        for path in base.paths(depth):
            for g in wide.class_map(path):
                acc = 0
                for c in g:
                    m = base.variety_mask(path + (c,))
                    if acc & m:
                        issues.append(f"W3: group {g} under {path} is not pairwise disjoint")
                        break
                    acc |= m
    return issues


def edifice_from_descriptor(desc: dict) -> Edifice:
    params = EdificeParams(desc["k"], desc["d"], desc["q"])
    fld = None
    if "p_char" in desc:
        fld = field_new(desc["p_char"], desc.get("ext_degree", 1))
    base = AlgebraicEdifice(params, fld)
    if desc.get("delta") is not None:
        return MergedEdifice(make_wide(base, Fraction(desc["delta"])))
    return base


# --- verification --------------------------------------------------------------

@dataclass
class VerificationReport:
    mode: str
    vertices_checked: int
    pairs_checked: int
    max_intersection: int
    bound: int
    passed: bool
    axioms: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    params: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "vertices_checked": self.vertices_checked,
            "pairs_checked": self.pairs_checked,
            "max_intersection": self.max_intersection,
            "bound": self.bound,
            "pass": self.passed,
            "axioms": self.axioms,
            "failures": self.failures[:20],
            "params": list(self.params) if self.params else None,
        }


def _edifice_params(edifice):
    if isinstance(edifice, MergedEdifice):
        return edifice.params
    return (edifice.k, edifice.d, edifice.q, edifice.arity)


def verify_edifice(edifice: Edifice, mode: str = "exhaustive", seed: int = 0,
                   trials: int = 1000, cap: int = DEFAULT_VERTEX_CAP,
                   arity: Optional[int] = None) -> VerificationReport:
    """Check axioms E1-E6 on ``edifice``.

    ``arity`` restricts the check to the subtree on the first ``arity``
    children of every vertex (any such subtree is again an edifice).
    Exhaustive mode refuses trees with more than ``cap`` vertices.
    """
    t = edifice.arity if arity is None else arity
    k = edifice.k
    full = (1 << edifice.n) - 1
    failures = []
    axioms = {}

    issues = edifice.label_issues()
    axioms["E1"] = not issues and t <= edifice.arity
    failures.extend(issues)
    axioms["E2"] = k >= 1

    if mode == "exhaustive":
        total = edifice.vertex_count(t)
        if total > cap:
            raise CapExceededError(f"{total} vertices exceed the exhaustive cap of {cap}")
        vertices = [p for depth in range(k) for p in edifice.paths(depth, t)]
        leaves = list(edifice.paths(k - 1, t))
        pair_iter = (
            (z, v) for z in leaves for v in vertices if not _is_ancestor_or_self(v, z)
        )
        nest_iter = (v for v in vertices if v)
    elif mode == "sampled":
        rng = random.Random(seed)
        sampled = []
        for _ in range(trials if k > 1 else 0):
            z = tuple(rng.randrange(t) for _ in range(k - 1))
            while True:
                depth = rng.randrange(k)
                v = tuple(rng.randrange(t) for _ in range(depth))
                if not _is_ancestor_or_self(v, z) or t == 1:
                    break
            sampled.append((z, v))
        pair_list = [pv for pv in sampled if not _is_ancestor_or_self(pv[1], pv[0])]
        touched = set()
        for z, v in pair_list:
            touched.update(z[:i] for i in range(len(z) + 1))
            touched.update(v[:i] for i in range(len(v) + 1))
        vertices = sorted(touched, key=lambda p: (len(p), p))
        leaves = sorted({z for z, _ in pair_list})
        pair_iter = iter(pair_list)
        nest_iter = (v for v in vertices if v)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    root_ok = edifice.variety_mask(()) == full
    if not root_ok:
        failures.append("E4: root variety is not the whole universe")
    nest_ok = True
    for v in nest_iter:
        child, parent = edifice.variety_mask(v), edifice.variety_mask(v[:-1])
        if child & ~parent:
            nest_ok = False
            failures.append(f"E4: variety at {v} not inside its parent")
    axioms["E3"] = True
    axioms["E4"] = root_ok and nest_ok

    leaf_ok = True
    for z in leaves:
        size = edifice.variety_mask(z).bit_count()
        if size < edifice.leaf_bound:
            leaf_ok = False
            failures.append(f"E5: leaf {z} has {size} < {edifice.leaf_bound} points")
    axioms["E5"] = leaf_ok

    bound = edifice.intersection_bound
    worst = 0
    pairs = 0
    for z, v in pair_iter:
        pairs += 1
        c = (edifice.variety_mask(z) & edifice.variety_mask(v)).bit_count()
        if c > worst:
            worst = c
        if c > bound:
            failures.append(f"E6: |X_{z} & X_{v}| = {c} > {bound}")
    axioms["E6"] = worst <= bound

    passed = all(axioms.values())
    return VerificationReport(mode, len(vertices), pairs, worst, bound, passed,
                              axioms, failures, _edifice_params(edifice))


def _is_ancestor_or_self(v, z):
    return len(v) <= len(z) and z[:len(v)] == v
