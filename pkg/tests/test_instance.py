from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coverstream.exceptions import (
    DuplicateIdError,
    ElementOutOfRangeError,
    InstanceSyntaxError,
    NotACoverError,
    PassBudgetExceeded,
)
from coverstream.generators import tightness_instance
from coverstream.instance import (
    Certificate,
    Instance,
    SpaceMeter,
    coverage_quota,
    parse_instance,
    read_instance,
    run_report,
    verify_certificate,
    write_instance,
)
from coverstream.solvers import prog_greedy_naive

SMALL = "coverstream v1\nn 3 m 2\n7 2 1 2\n9 2 2 3\n"


def test_parse_small_instance():
    inst = parse_instance(SMALL)
    assert inst.n == 3 and inst.m == 2
    assert [(r.id, r.elements) for r in inst.records] == [(7, (1, 2)), (9, (2, 3))]


def test_comments_and_blank_lines_skipped():
    text = "# made by hand\ncoverstream v1\n\nn 3 m 2\n# rows\n7 2 1 2\n9 2 2 3\n"
    assert parse_instance(text) == parse_instance(SMALL)


def test_element_out_of_range():
    with pytest.raises(ElementOutOfRangeError):
        parse_instance("coverstream v1\nn 3 m 1\n1 3 1 2 4\n")


def test_not_a_cover_without_epsilon():
    with pytest.raises(NotACoverError):
        parse_instance("coverstream v1\nn 2 m 1\n1 1 1\n")
    # the same rows are fine for a partial instance
    inst = parse_instance("coverstream v1\nn 2 m 1 eps 0.5\n1 1 1\n")
    assert inst.epsilon == Fraction(1, 2)


def test_duplicate_id_and_duplicate_element():
    with pytest.raises(DuplicateIdError):
        parse_instance("coverstream v1\nn 2 m 2\n1 1 1\n1 1 2\n")
    with pytest.raises(InstanceSyntaxError):
        parse_instance("coverstream v1\nn 2 m 1\n1 3 1 2 2\n")


def test_syntax_error_carries_line():
    with pytest.raises(InstanceSyntaxError) as err:
        parse_instance("coverstream v1\nn 3 m 2\n7 2 1 2\n9 x 2 3\n")
    assert err.value.line == 4


def test_roundtrip_preserves_stream_order():
    inst = Instance.from_sets(4, [[3, 4], [1, 2], [2, 1, 4]], ids=[10, 2, 5])
    text = write_instance(inst)
    assert text.splitlines()[2:] == ["10 2 3 4", "2 2 1 2", "5 3 1 2 4"]
    assert parse_instance(text) == inst


def test_epsilon_serialization():
    for eps, token in [(Fraction(1, 4), "0.25"), (Fraction(1, 8), "0.125"), (Fraction(1, 3), "1/3")]:
        inst = Instance.from_sets(3, [[1, 2]], epsilon=eps)
        text = write_instance(inst)
        assert text.splitlines()[1].endswith(f"eps {token}")
        assert parse_instance(text).epsilon == eps


def test_read_instance(tmp_path):
    path = tmp_path / "i.txt"
    path.write_text(SMALL)
    assert read_instance(path).m == 2


def test_stream_counts_passes_and_replays_identically():
    inst = parse_instance(SMALL)
    s = inst.stream(budget=2)
    first = [r.id for r in s.replay()]
    second = [r.id for r in s.replay()]
    assert first == second == [7, 9]
    assert s.passes_used == 2
    with pytest.raises(PassBudgetExceeded):
        list(s.replay())


def test_space_meter_peak():
    m = SpaceMeter()
    m.charge(5)
    m.release(3)
    m.charge(1)
    assert m.current_words == 3 and m.peak_words == 5


def test_certificate_of_naive_on_tightness_instance():
    inst = tightness_instance(2, 3)
    cert = prog_greedy_naive(inst.stream(), 2)
    rep = verify_certificate(inst, cert)
    assert rep.valid and rep.covered_count == 8


def test_dangling_coverer_rejected():
    inst = parse_instance(SMALL)
    cert = Certificate((7, 7, 9), frozenset({7}))
    rep = verify_certificate(inst, cert)
    assert not rep.valid and any(r.startswith("DanglingCoverer") for r in rep.reasons)


def test_other_failure_reasons():
    inst = parse_instance(SMALL)
    assert "DimensionMismatch" in verify_certificate(inst, Certificate((7,), frozenset({7}))).reasons
    rep = verify_certificate(inst, Certificate((9, 7, 9), frozenset({7, 9})))
    assert any(r.startswith("WrongCoverer") for r in rep.reasons)
    rep = verify_certificate(inst, Certificate((7, 7, 0), frozenset({7, 9})))
    assert any(r.startswith("UnusedSolutionId") for r in rep.reasons)
    assert any(r.startswith("InsufficientCoverage") for r in rep.reasons)


def test_partial_coverage_quota():
    inst = Instance.from_sets(4, [[1, 2, 3], [4]])
    cert = Certificate((1, 1, 1, 0), frozenset({1}))
    rep = verify_certificate(inst, cert, Fraction(1, 4))
    assert rep.valid and rep.quota == 3 and rep.covered_count == 3


def test_coverage_quota_is_exact():
    assert coverage_quota(4, 0.25) == 3
    assert coverage_quota(10, Fraction(1, 3)) == 7
    assert coverage_quota(10, 0.1) == 9  # ceil of exactly 9, no float drift
    assert coverage_quota(7, 0) == 7


def test_report_keys():
    inst = tightness_instance(2, 3)
    cert = prog_greedy_naive(inst.stream(), 2)
    rep = run_report(inst, cert, "naive", 2, 2, 10, opt=1, seed=None)
    assert set(rep) == {"n", "m", "alg", "p", "passes", "peak_aux_words", "sol_size", "sol_ids",
                        "covered", "opt", "ratio", "seed"}
    assert rep["ratio"] == 4.0


sets_strategy = st.integers(1, 12).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.sets(st.integers(1, n), min_size=1), min_size=1, max_size=8),
    )
)


@settings(max_examples=80, deadline=None)
@given(sets_strategy, st.booleans())
def test_roundtrip_property(ns, with_eps):
    n, sets = ns
    covered = set().union(*sets)
    if len(covered) < n and not with_eps:
        sets = sets + [set(range(1, n + 1)) - covered]
    eps = Fraction(1, 3) if with_eps else None
    inst = Instance.from_sets(n, [sorted(s) for s in sets], epsilon=eps)
    assert parse_instance(write_instance(inst)) == inst
