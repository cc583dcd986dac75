"""Prior construction for the Bayes estimators.

Degree priors
    * true prior: empirical degree pmf of the original graph (oracle baseline);
    * minimisation prior: stochastic local search for an integer degree
      sequence kappa with sum(kappa) = floor(2M'/p) minimising
      sum((p*kappa_i - k'_i)^2);
    * link cascade prior: kappa padded with zero-degree placeholders up to a
      known node count, then units trickled down to the placeholders.

Triangle priors
    * true prior: empirical per-edge triangle pmf of the original graph;
    * Poisson prior centred on the scale-up estimate of triangles per link.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from ._validation import as_generator, check_nonneg_int, check_probability, floor_ratio
from .exceptions import ParameterError, PriorConstructionError

PMF_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscretePrior:
    """Finite-support pmf over non-negative integers.

    ``values`` is strictly increasing; ``probs`` sums to one within 1e-12.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.int64)
        w = np.asarray(self.probs, dtype=float)
        if v.ndim != 1 or v.shape != w.shape or v.size == 0:
            raise ParameterError("prior needs matching, non-empty 1-D values and probs")
        if np.any(v < 0) or np.any(np.diff(v) <= 0):
            raise ParameterError("prior values must be non-negative and strictly increasing")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ParameterError("prior probabilities must be finite and non-negative")
        if abs(w.sum() - 1.0) > PMF_TOL:
            raise ParameterError(f"prior probabilities sum to {w.sum()!r}, not 1")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", w)

    @classmethod
    def from_weights(cls, values, weights):
        """Normalise non-negative weights; duplicate values are merged."""
        v = np.asarray(values, dtype=np.int64).ravel()
        w = np.asarray(weights, dtype=float).ravel()
        uniq, inv = np.unique(v, return_inverse=True)
        merged = np.bincount(inv, weights=w, minlength=len(uniq))
        total = merged.sum()
        if not total > 0:
            raise ParameterError("prior weights must have positive total")
        return cls(uniq, merged / total)

    @classmethod
    def empirical(cls, samples):
        """Proportion of ``samples`` taking each value."""
        s = np.asarray(samples, dtype=np.int64).ravel()
        if s.size == 0:
            raise ParameterError("cannot build an empirical prior from no samples")
        uniq, counts = np.unique(s, return_counts=True)
        return cls(uniq, counts / counts.sum())

    @classmethod
    def point_mass(cls, value):
        return cls(np.array([value]), np.array([1.0]))

    @property
    def support_max(self):
        return int(self.values[-1])

    @property
    def mean(self):
        return float(self.values @ self.probs)

    def pmf(self, x):
        """Probability of each ``x`` (0 off the support)."""
        x = np.asarray(x, dtype=np.int64)
        pos = np.clip(np.searchsorted(self.values, x), 0, len(self.values) - 1)
        out = np.where(self.values[pos] == x, self.probs[pos], 0.0)
        return out if out.ndim else float(out)

    def as_dict(self):
        return {int(v): float(w) for v, w in zip(self.values, self.probs)}

    def write_csv(self, fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["value", "probability"])
        for v, w in zip(self.values, self.probs):
            writer.writerow([int(v), repr(float(w))])

    @classmethod
    def read_csv(cls, fh):
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or {"value", "probability"} - set(reader.fieldnames):
            raise ParameterError("prior CSV needs a 'value,probability' header")
        rows = [(int(r["value"]), float(r["probability"])) for r in reader]
        if not rows:
            raise ParameterError("prior CSV has no rows")
        v, w = zip(*rows)
        return cls.from_weights(v, w)

    def __repr__(self):
        return f"DiscretePrior(support=[{self.values[0]}..{self.support_max}], n={len(self.values)})"


@dataclass(frozen=True, eq=False)
class DegreeSequenceEstimate:
    """Integer degree sequence kappa built from a sample.

    ``observed`` holds k' aligned with ``kappa`` (0 for cascade placeholders).
    ``history`` rows are ``(objective, total)`` measured after balancing and
    then after each accepted step; ``n_steps`` counts the accepted moves
    (minimisation) or unit transfers (cascade).
    """

    kappa: np.ndarray
    observed: np.ndarray
    p: float
    history: np.ndarray = field(repr=False)
    n_steps: int = 0

    @property
    def total(self):
        return int(self.kappa.sum())

    @property
    def objective(self):
        return l2_error(self.kappa, self.observed, self.p)

    def prior(self):
        return DiscretePrior.empirical(self.kappa)


def l2_error(kappa, observed, p):
    """sum_i (p * kappa_i - k'_i)^2."""
    r = p * np.asarray(kappa, dtype=float) - np.asarray(observed, dtype=float)
    return float(r @ r)


def _observed_degrees(sample_or_degrees):
    degs = getattr(sample_or_degrees, "degrees", sample_or_degrees)
    return np.asarray(degs, dtype=np.int64)


def target_degree_total(observed, p):
    """floor(2M'/p) with M' = sum(k')/2."""
    return floor_ratio(int(np.sum(observed)), p)


def balanced_degree_sequence(observed, p, rng):
    """kappa_i = floor(k'_i / p), then random +-1 steps until sum = floor(2M'/p).

    Increments go to nodes drawn uniformly at random; decrements (which
    floor rounding makes unnecessary in practice) are drawn uniformly among
    nodes still above their observed degree.
    """
    observed = np.asarray(observed, dtype=np.int64)
    target = target_degree_total(observed, p)
    if target < observed.sum():
        raise PriorConstructionError(
            f"degree total {target} is below the observed total {observed.sum()}"
        )
    kappa = floor_ratio(observed, p).astype(np.int64)
    kappa = np.maximum(kappa, observed)
    n = len(kappa)
    deficit = target - int(kappa.sum())
    if deficit > 0:
        if n == 0:
            raise PriorConstructionError("no nodes to carry the degree total")
        np.add.at(kappa, rng.integers(n, size=deficit), 1)
    while deficit < 0:
        slack = np.flatnonzero(kappa > observed)
        i = slack[rng.integers(len(slack))]
        kappa[i] -= 1
        deficit += 1
    return kappa


def minimisation_prior(sample, p=None, iterations=15000, seed=None):
    """Degree prior from a least-squares fit of an integer degree sequence.

    Starting from the balanced sequence, ``iterations`` transfers are proposed:
    one uniformly chosen node gains a unit and another loses one (never going
    below its observed degree). A proposal is kept only if it strictly lowers
    ``sum((p*kappa - k')^2)``, so the objective never increases and the total
    stays at floor(2M'/p).

    ``sample`` is a :class:`~edgerecon.sampling.SampledGraph` or an array of
    observed degrees (then ``p`` is required).

    Returns
    -------
    (DegreeSequenceEstimate, DiscretePrior)
    """
    observed = _observed_degrees(sample)
    p = check_probability(sample.p if p is None else p)
    iterations = check_nonneg_int(iterations, "iterations")
    if observed.size == 0:
        raise PriorConstructionError("empty sample: no degrees to fit")
    rng = as_generator(seed)
    kappa = balanced_degree_sequence(observed, p, rng)
    total = int(kappa.sum())

    resid = p * kappa - observed
    objective = float(resid @ resid)
    history = [(objective, total)]
    n = len(kappa)
    if n > 1 and iterations:
        ups = rng.integers(n, size=iterations)
        downs = rng.integers(n, size=iterations)
        two_p = 2.0 * p
        p2 = p * p
        for i, j in zip(ups.tolist(), downs.tolist()):
            if i == j or kappa[j] <= observed[j]:
                continue
            # change of (p*k_i - k'_i)^2 for k_i + 1 plus (p*k_j - k'_j)^2 for k_j - 1
            delta = two_p * (resid[i] - resid[j]) + 2.0 * p2
            if delta < 0.0:
                kappa[i] += 1
                kappa[j] -= 1
                resid[i] += p
                resid[j] -= p
                objective += delta
                history.append((objective, int(kappa.sum())))
    est = DegreeSequenceEstimate(
        kappa, observed, p, np.asarray(history, dtype=float), n_steps=len(history) - 1
    )
    return est, est.prior()


def link_cascade_prior(sample, n_original, p=None, seed=None, trace=False):
    """Degree prior that spreads the estimated links over ``n_original`` nodes.

    The balanced sequence is padded with ``n_original - N'`` zero-degree
    placeholders and stably sorted by decreasing kappa. Then, repeatedly, the
    first zero in that list takes one unit from the entry directly before it,
    until no zero is left. The list order is fixed after the initial sort, so
    a node drained to zero becomes the next zero and the deficit travels up
    the list to the nearest node with a unit to spare. The total is conserved
    and every transfer moves a unit one position down, so the loop ends after
    at most ``(n_original - 1) * total`` transfers.

    With ``trace=True`` the degree total is re-measured after every transfer
    and recorded in ``history`` (O(n) per step; meant for checking).

    Returns
    -------
    (DegreeSequenceEstimate, DiscretePrior)
        ``kappa`` is aligned as [sample nodes..., placeholders...].
    """
    observed = _observed_degrees(sample)
    p = check_probability(sample.p if p is None else p)
    n_original = check_nonneg_int(n_original, "n_original")
    n_sample = len(observed)
    if n_original < n_sample:
        raise ParameterError(f"n_original={n_original} is smaller than the sample's {n_sample} nodes")
    if n_original == 0:
        raise PriorConstructionError("no nodes to build a prior over")
    target = target_degree_total(observed, p)
    if target < n_original:
        raise PriorConstructionError(
            f"degree total {target} cannot give each of {n_original} nodes degree >= 1"
        )
    rng = as_generator(seed)
    base = balanced_degree_sequence(observed, p, rng) if n_sample else np.empty(0, np.int64)
    kappa = np.concatenate([base, np.zeros(n_original - n_sample, dtype=np.int64)])
    total = int(kappa.sum())

    order = np.argsort(-kappa, kind="stable")
    vals = kappa[order]
    zeros = np.flatnonzero(vals == 0)
    totals = [total]
    steps = 0
    if zeros.size:
        if zeros[0] == 0:
            raise PriorConstructionError("all estimated degrees are zero")
        for frontier in zeros:
            z = frontier
            while True:
                vals[z - 1] -= 1
                vals[z] += 1
                steps += 1
                if trace:
                    totals.append(int(vals.sum()))
                if vals[z - 1] > 0:
                    break
                z -= 1
                if z == 0:
                    raise PriorConstructionError("cascade ran out of links to move")
    kappa[order] = vals
    obs_full = np.concatenate([observed, np.zeros(n_original - n_sample, dtype=np.int64)])
    if not trace:
        totals.append(int(kappa.sum()))
    objective = l2_error(kappa, obs_full, p)
    history = np.column_stack([np.full(len(totals), objective), totals]).astype(float)
    est = DegreeSequenceEstimate(kappa, obs_full, p, history, n_steps=steps)
    return est, est.prior()


def true_prior_degree(g):
    """Proportion of nodes of each degree in the original graph."""
    if g.n_nodes == 0:
        raise ParameterError("true degree prior needs a non-empty graph")
    return DiscretePrior.empirical(g.degrees)


def true_prior_triangles(g):
    """Proportion of edges with each triangle count in the original graph."""
    if g.n_edges == 0:
        raise ParameterError("true triangle prior needs a graph with edges")
    return DiscretePrior.empirical(g.triangles.edge_counts)


def poisson_rate(edge_triangles_obs, p, edge_count="estimated"):
    """lambda = 3 * T_hat / M for the Poisson triangle prior.

    ``T_hat = T'/p^3`` is the scale-up total. With ``edge_count="estimated"``
    (default) M is the scale-up edge count M'/p, making lambda the scale-up
    estimate of the mean triangles per original link; this is what makes
    the Bayes total coincide with the scale-up total. ``"sampled"`` divides
    by M' itself.
    """
    t_obs = np.asarray(edge_triangles_obs, dtype=np.int64)
    m_obs = len(t_obs)
    if m_obs == 0:
        raise PriorConstructionError("Poisson prior needs at least one sampled edge")
    t_total_hat = t_obs.sum() / 3.0 / p**3
    if edge_count == "estimated":
        return 3.0 * t_total_hat * p / m_obs
    if edge_count == "sampled":
        return 3.0 * t_total_hat / m_obs
    raise ParameterError(f"edge_count must be 'estimated' or 'sampled', got {edge_count!r}")


def poisson_truncation(lam, max_observed):
    """Support end for the truncated Poisson prior.

    Far enough past both the prior mean and the largest observation that
    the dropped tail (< 1e-10) and the posterior's shift above an observation
    are both negligible.
    """
    spread = math.ceil(lam + 10.0 * math.sqrt(lam + 1.0))
    return int(max(spread, max_observed + spread))


def poisson_triangle_prior(sample, p=None, edge_count="estimated"):
    """Truncated, renormalised Po(lambda) prior for per-edge triangle counts."""
    t_obs = getattr(sample, "edge_triangles", sample)
    t_obs = np.asarray(t_obs, dtype=np.int64)
    p = check_probability(sample.p if p is None else p)
    lam = poisson_rate(t_obs, p, edge_count)
    if lam == 0.0:
        return DiscretePrior.point_mass(0)
    t_max = poisson_truncation(lam, int(t_obs.max()))
    support = np.arange(t_max + 1)
    return DiscretePrior.from_weights(support, poisson.pmf(support, lam))
