import math

from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import brute_force_opt, cover_instances
from coverstream.baselines import exact_cover, offline_greedy
from coverstream.generators import tightness_instance
from coverstream.instance import Instance, certificate_from_ids, verify_certificate

TRIANGLE = Instance.from_sets(3, [[1, 2], [2, 3], [1, 3]])


def test_greedy_examples():
    dom = Instance.from_sets(4, [[1, 2, 3, 4], [1, 2], [3, 4]])
    assert offline_greedy(dom).sol == {1}
    singles = Instance.from_sets(5, [[x] for x in range(1, 6)])
    assert offline_greedy(singles).size == 5
    tri = offline_greedy(TRIANGLE)
    assert tri.sol == {1, 2}  # first set, then the earliest remaining tie


def test_exact_examples():
    assert exact_cover(TRIANGLE, 3).opt_size == 2
    assert exact_cover(tightness_instance(2, 3)).opt_size == 1
    zero = exact_cover(TRIANGLE, 0)
    assert zero.opt_size == 0 and zero.witness == frozenset() and zero.exact


def test_budget_flag_not_exception():
    res = exact_cover(tightness_instance(3, 4), node_budget=0)
    assert res.status == "budget_exceeded" and not res.exact


@settings(max_examples=120, deadline=None)
@given(cover_instances(max_n=10, max_m=8), st.data())
def test_exact_matches_brute_force(inst, data):
    quota = data.draw(st.integers(0, inst.n))
    res = exact_cover(inst, quota)
    assert res.exact
    assert res.opt_size == brute_force_opt(inst, quota)
    cert = certificate_from_ids(inst, res.witness)
    assert cert.covered_count >= quota and len(res.witness) == res.opt_size


@settings(max_examples=120, deadline=None)
@given(cover_instances(max_n=12, max_m=9), st.data())
def test_pruning_never_changes_opt(inst, data):
    quota = data.draw(st.integers(0, inst.n))
    assert exact_cover(inst, quota, prune=True).opt_size == exact_cover(inst, quota, prune=False).opt_size


@settings(max_examples=120, deadline=None)
@given(cover_instances(max_n=12, max_m=9))
def test_greedy_log_bound(inst):
    opt = exact_cover(inst).opt_size
    cert = offline_greedy(inst)
    assert verify_certificate(inst, cert).valid
    assert cert.size <= (math.log(inst.n) + 1) * opt
