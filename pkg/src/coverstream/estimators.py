"""Estimator-style wrappers around the streaming solvers.

``fit`` takes an :class:`~coverstream.instance.Instance` (or anything
:func:`check_instance` accepts), runs one solver over a fresh metered
stream, and stores the certificate and the meter readings on the estimator.
"""
import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .baselines import DEFAULT_NODE_BUDGET, exact_cover, offline_greedy
from .exceptions import InstanceError
from .instance import Certificate, Instance, SpaceMeter, certificate_from_ids, parse_instance
from .solvers import partial_cover_solve, prog_greedy, prog_greedy_naive

__all__ = [
    "check_instance",
    "ProgressiveGreedy",
    "NaiveProgressiveGreedy",
    "PartialCover",
    "OfflineGreedy",
    "ExactCover",
]


def check_instance(X) -> Instance:
    """Coerce ``X`` to an Instance.

    Accepts an Instance, v1-format text, or ``(n, sets)`` with ``sets`` a
    sequence of element collections.
    """
    if isinstance(X, Instance):
        return X
    if isinstance(X, str):
        return parse_instance(X)
    if isinstance(X, tuple) and len(X) == 2:
        n, sets = X
        return Instance.from_sets(int(n), [sorted(s) for s in sets])
    raise InstanceError(f"cannot interpret {type(X).__name__} as a set-cover instance")


class _StreamEstimator(ClusterMixin, BaseEstimator):
    """Shared fit bookkeeping; subclasses implement ``_solve(instance, stream, meter)``."""

    def fit(self, X, y=None):
        instance = check_instance(X)
        stream = instance.stream(getattr(self, "budget", None))
        meter = SpaceMeter()
        self.pass_stats_ = []
        cert = self._solve(instance, stream, meter)
        self.certificate_ = cert
        self.solution_ = frozenset(cert.sol)
        self.coverer_ = np.asarray(cert.coverer, dtype=np.int64)
        self.labels_ = self.coverer_
        self.n_passes_ = stream.passes_used
        self.peak_words_ = meter.peak_words
        self.n_elements_ = instance.n
        return self

    def fit_predict(self, X, y=None):
        """Coverer id per element (element x at position x - 1; 0 = uncovered)."""
        return self.fit(X).labels_

    @property
    def solution_size_(self):
        check_is_fitted(self, "certificate_")
        return len(self.solution_)


class ProgressiveGreedy(_StreamEstimator):
    """Folded progressive greedy in ``p`` passes."""

    def __init__(self, p=1, budget=None):
        self.p = p
        self.budget = budget

    def _solve(self, instance, stream, meter):
        return prog_greedy(stream, self.p, meter, self.pass_stats_)


class NaiveProgressiveGreedy(_StreamEstimator):
    """Progressive greedy with one threshold per pass."""

    def __init__(self, p=1, budget=None):
        self.p = p
        self.budget = budget

    def _solve(self, instance, stream, meter):
        return prog_greedy_naive(stream, self.p, meter, self.pass_stats_)


class PartialCover(_StreamEstimator):
    """p-pass partial cover leaving at most ``epsilon * n`` elements uncovered."""

    def __init__(self, p=1, epsilon=0.0, budget=None):
        self.p = p
        self.epsilon = epsilon
        self.budget = budget

    def _solve(self, instance, stream, meter):
        stats = {}
        cert = partial_cover_solve(stream, self.p, self.epsilon, meter, stats)
        self.scheme_ = stats.get("scheme")
        self.scheme_sizes_ = stats.get("sizes")
        return cert


class OfflineGreedy(_StreamEstimator):
    def __init__(self, epsilon=0.0):
        self.epsilon = epsilon

    def _solve(self, instance, stream, meter):
        list(stream.replay())
        return offline_greedy(instance, instance.quota(self.epsilon))


class ExactCover(_StreamEstimator):
    """Branch-and-bound optimum; ``status_`` tells whether it is proven."""

    def __init__(self, epsilon=0.0, node_budget=DEFAULT_NODE_BUDGET):
        self.epsilon = epsilon
        self.node_budget = node_budget

    def _solve(self, instance, stream, meter):
        list(stream.replay())
        res = exact_cover(instance, instance.quota(self.epsilon), node_budget=self.node_budget)
        self.status_ = res.status
        self.opt_size_ = res.opt_size
        self.explored_nodes_ = res.explored_nodes
        if res.opt_size is None:
            return Certificate.from_arrays([0] * (instance.n + 1), set())
        return certificate_from_ids(instance, res.witness)
