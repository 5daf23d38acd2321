"""Set-cover instances, metered streams, certificates and the on-disk formats."""
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .exceptions import (
    DuplicateIdError,
    ElementOutOfRangeError,
    InstanceError,
    InstanceSyntaxError,
    NotACoverError,
    PassBudgetExceeded,
)

__all__ = [
    "SetRecord",
    "Instance",
    "MeteredStream",
    "SpaceMeter",
    "Certificate",
    "CertificateReport",
    "as_fraction",
    "coverage_quota",
    "parse_instance",
    "write_instance",
    "read_instance",
    "verify_certificate",
    "certificate_from_ids",
    "run_report",
]

HEADER = "coverstream v1"


def as_fraction(x) -> Fraction:
    """Exact rational view of an epsilon given as str, float, int or Fraction.

    Floats go through their repr so that ``0.1`` means one tenth.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def coverage_quota(n: int, epsilon=0) -> int:
    """⌈(1 − ε)·n⌉, computed exactly."""
    eps = as_fraction(epsilon or 0)
    if not 0 <= eps <= 1:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return math.ceil((1 - eps) * n)


@dataclass(frozen=True)
class SetRecord:
    id: int
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class Instance:
    """Universe ``{1..n}`` plus an ordered multiset of id-tagged sets.

    The record order is the stream order.  Construction validates the
    instance; without ``epsilon`` the union of the records must be the whole
    universe.
    """

    n: int
    records: tuple
    epsilon: Optional[Fraction] = None

    def __post_init__(self):
        records = tuple(
            r if isinstance(r, SetRecord) else SetRecord(*r) for r in self.records
        )
        object.__setattr__(self, "records", records)
        if self.epsilon is not None:
            eps = as_fraction(self.epsilon)
            if not 0 <= eps <= 1:
                raise InstanceError(f"epsilon must lie in [0, 1], got {self.epsilon}")
            object.__setattr__(self, "epsilon", eps)
        if self.n < 0:
            raise InstanceError("universe size must be non-negative")
        seen = set()
        covered = set()
        for rec in records:
            if not isinstance(rec.id, int) or rec.id <= 0:
                raise InstanceError(f"set id must be a positive integer, got {rec.id!r}")
            if rec.id in seen:
                raise DuplicateIdError(f"duplicate set id {rec.id}")
            seen.add(rec.id)
            prev = 0
            for x in rec.elements:
                if not 1 <= x <= self.n:
                    raise ElementOutOfRangeError(
                        f"set {rec.id} holds element {x} outside [1, {self.n}]"
                    )
                if x <= prev:
                    raise InstanceError(
                        f"set {rec.id} elements must be strictly ascending"
                    )
                prev = x
            covered.update(rec.elements)
        if self.epsilon is None and len(covered) != self.n:
            missing = min(set(range(1, self.n + 1)) - covered)
            raise NotACoverError(f"element {missing} is not covered by any set")

    @classmethod
    def from_sets(cls, n, sets: Iterable, ids=None, epsilon=None):
        """Build from plain iterables of elements; ids default to 1..m."""
        sets = [tuple(sorted(set(s))) for s in sets]
        ids = list(ids) if ids is not None else list(range(1, len(sets) + 1))
        return cls(n, tuple(SetRecord(i, s) for i, s in zip(ids, sets)), epsilon)

    @property
    def m(self) -> int:
        return len(self.records)

    def ids(self):
        return [r.id for r in self.records]

    def by_id(self) -> dict:
        return {r.id: r for r in self.records}

    def quota(self, epsilon=None) -> int:
        eps = self.epsilon if epsilon is None else epsilon
        return coverage_quota(self.n, eps or 0)

    def stream(self, budget: Optional[int] = None) -> "MeteredStream":
        return MeteredStream(self, budget)


def _format_eps(eps: Fraction) -> str:
    den = eps.denominator
    k = 0
    while den % 2 == 0:
        den //= 2
        k += 1
    j = 0
    while den % 5 == 0:
        den //= 5
        j += 1
    if den != 1:
        return f"{eps.numerator}/{eps.denominator}"
    digits = max(k, j)
    scaled = eps * 10**digits
    s = str(scaled.numerator)
    if digits == 0:
        return s
    s = s.rjust(digits + 1, "0")
    return f"{s[:-digits]}.{s[-digits:]}"


def write_instance(instance: Instance) -> str:
    lines = [HEADER]
    head = f"n {instance.n} m {instance.m}"
    if instance.epsilon is not None:
        head += f" eps {_format_eps(instance.epsilon)}"
    lines.append(head)
    for rec in instance.records:
        lines.append(" ".join(map(str, (rec.id, len(rec.elements), *rec.elements))))
    return "\n".join(lines) + "\n"


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise InstanceSyntaxError(lineno, f"expected integer {what}, got {tok!r}") from None


def parse_instance(text: str) -> Instance:
    """Parse the v1 text format.

    Comment lines (``#``) and blank lines are skipped.  Parameter and
    validation errors carry the offending line number where one exists.
    """
    body = [
        (i, ln.strip())
        for i, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not body or body[0][1] != HEADER:
        line = body[0][0] if body else 1
        raise InstanceSyntaxError(line, f"expected header {HEADER!r}")
    if len(body) < 2:
        raise InstanceSyntaxError(body[0][0], "missing 'n <n> m <m>' line")
    lineno, head = body[1]
    toks = head.split()
    if len(toks) not in (4, 6) or toks[0] != "n" or toks[2] != "m":
        raise InstanceSyntaxError(lineno, "expected 'n <n> m <m> [eps <decimal>]'")
    n = _int(toks[1], lineno, "n")
    m = _int(toks[3], lineno, "m")
    eps = None
    if len(toks) == 6:
        if toks[4] != "eps":
            raise InstanceSyntaxError(lineno, f"unknown header key {toks[4]!r}")
        try:
            eps = Fraction(toks[5])
        except (ValueError, ZeroDivisionError):
            raise InstanceSyntaxError(lineno, f"bad epsilon {toks[5]!r}") from None
    rows = body[2:]
    if len(rows) != m:
        where = rows[m][0] if len(rows) > m else (rows[-1][0] if rows else lineno)
        raise InstanceSyntaxError(where, f"header declares {m} sets, found {len(rows)}")
    records = []
    for lineno, row in rows:
        toks = row.split()
        if len(toks) < 2:
            raise InstanceSyntaxError(lineno, "expected '<id> <c> <e1> ... <ec>'")
        sid = _int(toks[0], lineno, "set id")
        c = _int(toks[1], lineno, "element count")
        elems = [_int(t, lineno, "element") for t in toks[2:]]
        if len(elems) != c:
            raise InstanceSyntaxError(lineno, f"count {c} but {len(elems)} elements listed")
        if len(set(elems)) != len(elems):
            raise InstanceSyntaxError(lineno, "duplicate element within a set")
        for x in elems:
            if not 1 <= x <= n:
                raise ElementOutOfRangeError(f"line {lineno}: element {x} outside [1, {n}]")
        records.append(SetRecord(sid, tuple(sorted(elems))))
    return Instance(n, tuple(records), eps)


def read_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


class MeteredStream:
    """Replayable cursor over an instance's records that counts passes.

    ``passes_used`` goes up by one every time a traversal starts, i.e. when
    the cursor wraps back to the first record.  An optional budget turns the
    count into a hard limit.
    """

    def __init__(self, instance: Instance, budget: Optional[int] = None):
        self.source = instance
        self.budget = budget
        self.passes_used = 0
        self.cursor = 0

    @property
    def n(self):
        return self.source.n

    def replay(self):
        if self.budget is not None and self.passes_used >= self.budget:
            raise PassBudgetExceeded(f"pass budget of {self.budget} exhausted")
        self.passes_used += 1
        records = self.source.records
        for self.cursor in range(len(records)):
            yield records[self.cursor]
        self.cursor = 0


class SpaceMeter:
    """Counts machine words of auxiliary solver state (one id or element = one word)."""

    def __init__(self):
        self.current_words = 0
        self.peak_words = 0

    def charge(self, words: int = 1):
        self.current_words += words
        if self.current_words > self.peak_words:
            self.peak_words = self.current_words

    def release(self, words: int = 1):
        if words > self.current_words:
            raise ValueError("released more words than were charged")
        self.current_words -= words

    def __repr__(self):
        return f"SpaceMeter(current={self.current_words}, peak={self.peak_words})"


@dataclass(frozen=True)
class Certificate:
    """Solver output: per-element covering set id (0 = uncovered) and the solution ids.

    ``coverer[x - 1]`` belongs to element ``x``.
    """

    coverer: tuple
    sol: frozenset

    def __post_init__(self):
        object.__setattr__(self, "coverer", tuple(self.coverer))
        object.__setattr__(self, "sol", frozenset(self.sol))

    def coverer_of(self, x: int) -> int:
        return self.coverer[x - 1]

    @property
    def covered_count(self) -> int:
        return sum(1 for c in self.coverer if c)

    @property
    def size(self) -> int:
        return len(self.sol)

    @classmethod
    def from_arrays(cls, coverer_1based, sol):
        """Build from a solver's slot-0-unused coverer list."""
        return cls(tuple(coverer_1based[1:]), frozenset(sol))


@dataclass
class CertificateReport:
    valid: bool
    covered_count: int
    quota: int
    reasons: list = field(default_factory=list)


def verify_certificate(instance: Instance, cert: Certificate, epsilon=None) -> CertificateReport:
    """Check a certificate against the instance in one scan.

    ``epsilon`` defaults to the instance's own slack (0 for total cover).
    """
    eps = instance.epsilon if epsilon is None else epsilon
    quota = coverage_quota(instance.n, eps or 0)
    reasons = []
    if len(cert.coverer) != instance.n:
        return CertificateReport(False, 0, quota, ["DimensionMismatch"])
    members = {r.id: set(r.elements) for r in instance.records}
    used = set()
    covered = 0
    for x, cid in enumerate(cert.coverer, start=1):
        if cid == 0:
            continue
        if cid not in cert.sol:
            reasons.append(f"DanglingCoverer(x={x}, id={cid})")
        elif cid not in members:
            reasons.append(f"UnknownId(id={cid})")
        elif x not in members[cid]:
            reasons.append(f"WrongCoverer(x={x}, id={cid})")
        else:
            covered += 1
        used.add(cid)
    for sid in sorted(cert.sol - used):
        reasons.append(f"UnusedSolutionId(id={sid})")
    if covered < quota:
        reasons.append(f"InsufficientCoverage(covered={covered}, quota={quota})")
    return CertificateReport(not reasons, covered, quota, reasons)


def certificate_from_ids(instance: Instance, ids) -> Certificate:
    """Certificate for an offline solution: each element goes to the first chosen set in stream order."""
    ids = set(ids)
    coverer = [0] * (instance.n + 1)
    for rec in instance.records:
        if rec.id in ids:
            for x in rec.elements:
                if not coverer[x]:
                    coverer[x] = rec.id
    used = {c for c in coverer if c}
    return Certificate.from_arrays(coverer, used)


def run_report(instance: Instance, cert: Certificate, alg: str, p=None, passes=0,
               peak_aux_words=0, opt=None, seed=None, **extra) -> dict:
    """Report dict following the certificate/report JSON schema."""
    sol_size = len(cert.sol)
    ratio = sol_size / opt if opt else None
    report = {
        "n": instance.n,
        "m": instance.m,
        "alg": alg,
        "p": p,
        "passes": passes,
        "peak_aux_words": peak_aux_words,
        "sol_size": sol_size,
        "sol_ids": sorted(cert.sol),
        "covered": cert.covered_count,
        "opt": opt,
        "ratio": ratio,
        "seed": seed,
    }
    report.update(extra)
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=str)
