"""Input validation helpers shared by the estimators and procedures."""

import math
import numbers

import numpy as np
from sklearn.utils import check_array, check_random_state

from .exceptions import ParameterError


def check_probability(p, name="p", allow_zero=False):
    """Return ``p`` as a float, raising if it is outside (0, 1] (or [0, 1])."""
    if isinstance(p, bool) or not isinstance(p, numbers.Real):
        raise ParameterError(f"{name} must be a real number, got {p!r}")
    p = float(p)
    low_ok = p >= 0.0 if allow_zero else p > 0.0
    if not (low_ok and p <= 1.0) or math.isnan(p):
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        raise ParameterError(f"{name} must lie in {interval}, got {p}")
    return p


def check_counts(X, name="X"):
    """Coerce observed counts to a 1-D int64 array of non-negative values.

    Accepts a 1-D sequence or a single-column 2-D array, the latter being what
    scikit-learn pipelines hand to ``fit``/``predict``.
    """
    arr = check_array(
        X, ensure_2d=False, dtype=None, ensure_all_finite=True, ensure_min_samples=0
    )
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ParameterError(f"{name} must have exactly one column, got {arr.shape[1]}")
        arr = arr[:, 0]
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ParameterError(f"{name} must contain integer counts")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 0:
        raise ParameterError(f"{name} must be non-negative")
    return arr


def check_nonneg_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < 0:
        raise ParameterError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)


def as_generator(seed):
    """Return a ``numpy.random.Generator`` for an int, SeedSequence, Generator or None.

    Legacy ``RandomState`` objects (what sklearn's ``random_state`` convention
    produces) are bridged by drawing a seed from them.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None or isinstance(seed, (numbers.Integral, np.random.SeedSequence)):
        return np.random.default_rng(seed)
    rs = check_random_state(seed)
    return np.random.default_rng(rs.randint(np.iinfo(np.int32).max))


def floor_ratio(numerator, p):
    """``floor(numerator / p)`` that is robust to ``p`` being a decimal like 0.1.

    ``20 / 0.1`` evaluates to 199.99999999999997 in binary floating point; the
    quotient is snapped to the nearest integer when within 1e-9 relative.
    """
    q = np.asarray(numerator, dtype=float) / p
    r = np.rint(q)
    near = np.abs(q - r) <= 1e-9 * np.maximum(1.0, np.abs(q))
    out = np.where(near, r, np.floor(q)).astype(np.int64)
    return out if out.ndim else int(out)
