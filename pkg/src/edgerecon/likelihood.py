"""Sampling likelihoods and the posterior-mean kernel, evaluated in log space.

Naive ``(1 - p) ** k`` and binomial coefficients lose precision (or overflow)
for large supports, so everything here goes through ``gammaln`` and only
exponentiates normalised log-weights.
"""

import numpy as np
from scipy.special import gammaln, xlogy

from ._validation import check_probability
from .exceptions import ParameterError


def _log_binom_unchecked(k, n, q):
    k = np.asarray(k, dtype=float)
    n = np.asarray(n, dtype=float)
    log_coef = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    return log_coef + xlogy(k, q) + xlogy(n - k, 1.0 - q)


def log_binomial_pmf(k, n, q):
    """Natural log of ``C(n, k) q^k (1-q)^(n-k)``; ``-inf`` where the pmf is 0.

    Broadcasts over array arguments. Raises :class:`ParameterError` when
    ``k > n``, ``k < 0`` or ``q`` is outside [0, 1].
    """
    q = check_probability(q, name="q", allow_zero=True)
    k_arr = np.asarray(k)
    n_arr = np.asarray(n)
    if np.any(k_arr < 0) or np.any(k_arr > n_arr):
        raise ParameterError("log_binomial_pmf needs 0 <= k <= n")
    out = _log_binom_unchecked(k_arr, n_arr, q)
    return out if out.ndim else float(out)


def _masked_pmf(k_obs, k, q):
    k_obs = np.asarray(k_obs)
    k = np.asarray(k)
    if np.any(k_obs < 0) or np.any(k < 0):
        raise ParameterError("counts must be non-negative")
    valid = k_obs <= k
    safe_k = np.where(valid, k, k_obs)
    out = np.where(valid, np.exp(_log_binom_unchecked(k_obs, safe_k, q)), 0.0)
    return out if out.ndim else float(out)


def degree_likelihood(k_obs, k, p):
    """P(k' = k_obs | k): binomial thinning of a degree. Zero when ``k_obs > k``."""
    p = check_probability(p)
    return _masked_pmf(k_obs, k, p)


def triangle_likelihood_retained(t_obs, t, p):
    """P(T'_l = t_obs | T_l = t, edge retained): Binomial(t, p^2)."""
    p = check_probability(p)
    return _masked_pmf(t_obs, t, p * p)


def triangle_likelihood_total(t_obs, t, p):
    """P(T'_l = t_obs | T_l = t) with the edge's own survival marginalised out.

    ``p * Binomial(t, p^2)(t_obs) + (1 - p) * [t_obs == 0]``, since a dropped
    edge carries zero sampled triangles.
    """
    p = check_probability(p)
    retained = np.asarray(_masked_pmf(t_obs, t, p * p))
    out = p * retained + np.where(np.asarray(t_obs) == 0, 1.0 - p, 0.0)
    return out if out.ndim else float(out)


def posterior_mean(observed, support, pmf, q):
    """Posterior means E[X | X' = x'] under binomial thinning with retention ``q``.

    Parameters
    ----------
    observed : array of int
        Observed thinned counts x'.
    support, pmf : arrays
        Prior support values and their probabilities.
    q : float
        Retention probability of each unit: ``p`` for degrees, ``p**2`` for
        triangles on a retained edge.

    Returns
    -------
    ndarray of float
        One mean per observation; ``nan`` where the prior gives the observation
        zero posterior mass (no support value >= x' with positive weight).
    """
    observed = np.asarray(observed, dtype=np.int64)
    support = np.asarray(support, dtype=np.int64)
    pmf = np.asarray(pmf, dtype=float)
    out = np.full(observed.shape, np.nan)
    if observed.size == 0:
        return out
    keep = pmf > 0
    support, pmf = support[keep], pmf[keep]
    log_prior = np.log(pmf)

    uniq, inverse = np.unique(observed, return_inverse=True)
    means = np.full(len(uniq), np.nan)
    xs = support.astype(float)
    # blocks of distinct observations keep the (obs x support) matrix bounded
    block = max(1, 4_000_000 // max(1, len(support)))
    for start in range(0, len(uniq), block):
        u = uniq[start:start + block, None]
        valid = support[None, :] >= u
        n = np.where(valid, support[None, :], u)
        logw = _log_binom_unchecked(u, n, q) + log_prior[None, :]
        logw = np.where(valid, logw, -np.inf)
        top = logw.max(axis=1)
        ok = np.isfinite(top)
        w = np.exp(logw[ok] - top[ok, None])
        means[start:start + block][ok] = (w @ xs) / w.sum(axis=1)
    out[...] = means[inverse.reshape(observed.shape)]
    return out
