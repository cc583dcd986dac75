"""Estimators of original-graph degrees and triangle counts from an edge sample.

Two layers:

* functions taking a :class:`~edgerecon.sampling.SampledGraph` and returning
  :class:`SequenceEstimate` / :class:`TotalTriangleEstimate`;
* scikit-learn compatible estimators (``fit``/``predict``/``get_params``)
  that work on plain arrays of observed counts, so they compose with
  pipelines and ``clone``.

Only observed items are estimated: nodes removed by sampling and dropped
edges get no estimate.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_counts, check_probability
from .exceptions import EstimationError, ParameterError
from .likelihood import posterior_mean
from .priors import (
    DiscretePrior,
    link_cascade_prior,
    minimisation_prior,
    poisson_triangle_prior,
)


@dataclass(frozen=True, eq=False)
class SequenceEstimate:
    """Per-item estimates in sample order.

    ``kind`` is ``"degree"`` (items are sample nodes) or ``"edge_triangles"``
    (items are sample edges); ``observed`` holds the sampled values.
    """

    kind: str
    method: str
    observed: np.ndarray
    estimates: np.ndarray

    def __len__(self):
        return len(self.estimates)


@dataclass(frozen=True)
class TotalTriangleEstimate:
    value: float
    method: str


def _check_sample_p(s):
    return check_probability(s.p)


def _item_label(s, kind, index):
    g = s.graph
    if kind == "degree":
        return f"node {g.labels[index]!r}"
    i, j = g.edges[index]
    return f"edge ({g.labels[i]!r}, {g.labels[j]!r})"


def _posterior_or_raise(observed, prior, q, describe):
    means = posterior_mean(observed, prior.values, prior.probs, q)
    bad = np.flatnonzero(np.isnan(means))
    if bad.size:
        i = int(bad[0])
        raise EstimationError(
            f"prior {prior!r} gives zero posterior mass to {describe(i)} (observed {observed[i]})"
        )
    return means


# method of moments --------------------------------------------------------


def mme_degree(s):
    """k_hat_i = k'_i / p for every sampled node."""
    p = _check_sample_p(s)
    k_obs = s.degrees
    return SequenceEstimate("degree", "mme", k_obs, k_obs / p)


def mme_edge_triangles(s):
    """T_hat_l = T'_l / p^2 for every retained edge (conditioned on the edge surviving)."""
    p = _check_sample_p(s)
    t_obs = s.edge_triangles
    return SequenceEstimate("edge_triangles", "mme", t_obs, t_obs / p**2)


def mme_total_triangles(s):
    """T_hat = T' / p^3."""
    p = _check_sample_p(s)
    return TotalTriangleEstimate(s.triangle_count / p**3, "mme")


# Bayes posterior means ----------------------------------------------------


def bayes_degree(s, prior):
    """Posterior mean degree of each sampled node under ``prior``.

    E[k | k'] is proportional to sum_k k C(k, k') (1-p)^k pi(k) over prior
    support k >= k'.
    """
    p = _check_sample_p(s)
    k_obs = s.degrees
    means = _posterior_or_raise(k_obs, prior, p, lambda i: _item_label(s, "degree", i))
    return SequenceEstimate("degree", "bayes", k_obs, means)


def bayes_edge_triangles(s, prior):
    """Posterior mean triangle count of each retained edge; retention of a triangle is p^2."""
    p = _check_sample_p(s)
    t_obs = s.edge_triangles
    means = _posterior_or_raise(t_obs, prior, p * p, lambda i: _item_label(s, "edge", i))
    return SequenceEstimate("edge_triangles", "bayes", t_obs, means)


def bayes_total_triangles(s, prior):
    """T_hat = (1 / 3p) * sum of per-edge posterior means over retained edges."""
    p = _check_sample_p(s)
    if s.n_edges == 0:
        return TotalTriangleEstimate(0.0, "bayes")
    per_edge = bayes_edge_triangles(s, prior).estimates
    return TotalTriangleEstimate(float(per_edge.sum()) / (3.0 * p), "bayes")


def bianconi_triangle_estimate(degree_hist, mean_degree=None):
    """Triangle count of an uncorrelated network with the given degree histogram.

    ``T_hat = (1/6) * (sum_k k (k-1) P(k) / k_mean)^3`` where P(k) is the
    fraction of nodes with degree k. ``degree_hist`` is either an array
    indexed by degree or a ``{degree: count}`` mapping. Only sensible when
    links form independently; included as a baseline.
    """
    if isinstance(degree_hist, dict):
        ks = np.array(list(degree_hist.keys()), dtype=float)
        counts = np.array(list(degree_hist.values()), dtype=float)
    else:
        counts = np.asarray(degree_hist, dtype=float)
        ks = np.arange(len(counts), dtype=float)
    n = counts.sum()
    if n <= 0:
        raise ParameterError("degree histogram is empty")
    frac = counts / n
    if mean_degree is None:
        mean_degree = float(ks @ frac)
    if mean_degree <= 0:
        raise ParameterError("mean degree must be positive")
    ratio = float((ks * (ks - 1.0)) @ frac) / mean_degree
    return ratio**3 / 6.0


# scikit-learn estimators --------------------------------------------------


class _CountEstimator(RegressorMixin, BaseEstimator):
    """Shared plumbing: X is a 1-D (or single-column) array of observed counts.

    ``score`` is the negative RMSE against true counts ``y``, so larger is
    better as scikit-learn model selection expects.
    """

    _retention_power = 1

    def _retention(self):
        return check_probability(self.p) ** self._retention_power

    def fit(self, X, y=None):
        check_probability(self.p)
        check_counts(X)
        self.is_fitted_ = True
        return self

    def score(self, X, y, sample_weight=None):
        from .harness import rmse

        return -rmse(y, self.predict(X))

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.one_d_array = True
        tags.input_tags.two_d_array = False
        return tags


class MMEDegreeEstimator(_CountEstimator):
    """Scale-up degree estimator k' / p.

    Parameters
    ----------
    p : float
        Edge sampling probability.
    """

    def __init__(self, p=0.5):
        self.p = p

    def predict(self, X):
        check_is_fitted(self)
        return check_counts(X) / check_probability(self.p)


class MMETriangleEstimator(_CountEstimator):
    """Scale-up per-edge triangle estimator T'_l / p^2."""

    def __init__(self, p=0.5):
        self.p = p

    def predict(self, X):
        check_is_fitted(self)
        return check_counts(X) / check_probability(self.p) ** 2

    def total(self, X):
        """Scale-up total T'/p^3 from the per-edge counts of all retained edges."""
        return check_counts(X).sum() / 3.0 / check_probability(self.p) ** 3


class _BayesEstimator(_CountEstimator):
    def _resolve_prior(self, X):
        raise NotImplementedError

    def fit(self, X, y=None):
        """Build ``prior_`` from the observed counts of the whole sample."""
        check_probability(self.p)
        X = check_counts(X)
        prior = self._resolve_prior(X)
        if not isinstance(prior, DiscretePrior):
            raise ParameterError(f"prior must resolve to a DiscretePrior, got {type(prior).__name__}")
        self.prior_ = prior
        return self

    def predict(self, X):
        check_is_fitted(self, "prior_")
        X = check_counts(X)
        means = posterior_mean(X, self.prior_.values, self.prior_.probs, self._retention())
        bad = np.flatnonzero(np.isnan(means))
        if bad.size:
            raise EstimationError(
                f"prior {self.prior_!r} gives zero posterior mass to item {int(bad[0])} "
                f"(observed {X[bad[0]]})"
            )
        return means


class BayesDegreeEstimator(_BayesEstimator):
    """Posterior-mean degree estimator.

    Parameters
    ----------
    p : float
        Edge sampling probability.
    prior : {"min", "cascade"} or DiscretePrior
        ``"min"`` fits the minimisation prior, ``"cascade"`` the link cascade
        prior (needs ``n_original``); a :class:`DiscretePrior` is used as is
        (e.g. the true prior of a reference graph).
    n_original : int, optional
        Node count of the original graph, for the cascade prior.
    iterations : int
        Proposals for the minimisation search.
    random_state : int, Generator or None

    Attributes
    ----------
    prior_ : DiscretePrior
    sequence_ : DegreeSequenceEstimate or None
        The fitted kappa sequence for the ``"min"``/``"cascade"`` priors.
    """

    def __init__(self, p=0.5, prior="min", n_original=None, iterations=15000, random_state=None):
        self.p = p
        self.prior = prior
        self.n_original = n_original
        self.iterations = iterations
        self.random_state = random_state

    def _resolve_prior(self, X):
        self.sequence_ = None
        if isinstance(self.prior, DiscretePrior):
            return self.prior
        if self.prior == "min":
            self.sequence_, prior = minimisation_prior(
                X, p=self.p, iterations=self.iterations, seed=self.random_state
            )
            return prior
        if self.prior == "cascade":
            if self.n_original is None:
                raise ParameterError("the cascade prior needs n_original")
            self.sequence_, prior = link_cascade_prior(
                X, self.n_original, p=self.p, seed=self.random_state
            )
            return prior
        raise ParameterError(f"unknown degree prior {self.prior!r}")


class BayesTriangleEstimator(_BayesEstimator):
    """Posterior-mean per-edge triangle estimator.

    ``fit`` expects the sampled triangle counts T'_l of *all* retained edges,
    since the Poisson prior's rate is the scale-up triangles-per-link.

    Parameters
    ----------
    p : float
    prior : {"poisson"} or DiscretePrior
    edge_count : {"estimated", "sampled"}
        Denominator of the Poisson rate, see :func:`~edgerecon.priors.poisson_rate`.
    """

    _retention_power = 2

    def __init__(self, p=0.5, prior="poisson", edge_count="estimated"):
        self.p = p
        self.prior = prior
        self.edge_count = edge_count

    def _resolve_prior(self, X):
        if isinstance(self.prior, DiscretePrior):
            return self.prior
        if self.prior == "poisson":
            return poisson_triangle_prior(X, p=self.p, edge_count=self.edge_count)
        raise ParameterError(f"unknown triangle prior {self.prior!r}")

    def total(self, X):
        """(1 / 3p) * sum of posterior means over the retained edges in ``X``."""
        X = check_counts(X)
        if X.size == 0:
            return 0.0
        return float(self.predict(X).sum()) / (3.0 * check_probability(self.p))
