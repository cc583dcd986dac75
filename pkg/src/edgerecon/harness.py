"""Experiment driver: sample over a grid of p, estimate, score, write CSVs.

A run is fully determined by its :class:`ExperimentConfig`. Replicate ``r``
at rate ``p`` of dataset ``tag`` draws from the stream seeded by
``(seed, tag, p, r)``, so any subset of the grid can be rerun, in any order
or in parallel, and produce the same rows.
"""

import csv
import logging
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import estimators as est
from .exceptions import AlignmentError, EstimationError, ParameterError, PriorConstructionError
from .graph import generate_ba, generate_er, read_edge_list
from .priors import (
    link_cascade_prior,
    minimisation_prior,
    poisson_triangle_prior,
    true_prior_degree,
    true_prior_triangles,
)
from .sampling import edge_sample, replicate_seed

log = logging.getLogger(__name__)

DEFAULT_P_GRID = tuple(round(0.1 * i, 1) for i in range(1, 10))
DEGREE_ESTIMATORS = ("mme", "min", "bayes_true", "bayes_min", "bayes_cascade")
TRIANGLE_ESTIMATORS = ("mme", "bayes_true", "bayes_poisson")
RESULT_FIELDS = ("dataset", "p", "replicate", "experiment", "estimator", "metric", "value", "error")
SUMMARY_FIELDS = ("dataset", "p", "experiment", "estimator", "metric", "mean", "sd", "n")
SCATTER_FIELDS = ("experiment", "estimator", "item", "true", "estimate")


# scoring ------------------------------------------------------------------


def rmse(truth, estimate):
    """sqrt(mean((truth - estimate)^2)); 0.0 for empty input."""
    t = np.asarray(truth, dtype=float)
    e = np.asarray(estimate, dtype=float)
    if t.shape != e.shape:
        raise AlignmentError(f"truth has shape {t.shape} but estimate has {e.shape}")
    if t.size == 0:
        return 0.0
    return float(np.sqrt(np.mean((t - e) ** 2)))


def true_degrees(parent, s):
    """Original degrees of the sampled nodes, in sample order."""
    return parent.degrees[s.parent_node_of]


def true_edge_triangles(parent, s):
    """Original triangle counts of the retained edges, in sample order."""
    return parent.triangles.edge_counts[s.parent_edge_of]


def _estimates_of(estimate):
    return getattr(estimate, "estimates", estimate)


def rmse_degree(truth, estimate):
    """Degree RMSE over the sampled nodes, normalised by N'."""
    return rmse(truth, _estimates_of(estimate))


def rmse_edge_triangles(truth, estimate):
    """Per-edge triangle RMSE over retained edges, normalised by M'."""
    return rmse(truth, _estimates_of(estimate))


def scatter_export(truth, estimate, path, item_ids=None):
    """Write ``item,true,estimate`` rows for plotting estimate against truth."""
    t = np.asarray(truth)
    e = np.asarray(_estimates_of(estimate), dtype=float)
    if t.shape != e.shape:
        raise AlignmentError(f"truth has shape {t.shape} but estimate has {e.shape}")
    ids = range(len(t)) if item_ids is None else item_ids
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["item", "true", "estimate"])
        for i, a, b in zip(ids, t.tolist(), e.tolist()):
            w.writerow([i, a, repr(float(b))])


# configuration ------------------------------------------------------------


def _split_list(value):
    return tuple(v.strip() for v in value.replace(";", ",").split(",") if v.strip())


@dataclass
class ExperimentConfig:
    """Settings for one experiment run.

    The flat ``key = value`` config file uses the field names below; lists
    are comma separated. ``generator`` is ``"er N M"`` or ``"ba N m"``, and
    ``graph`` a path to an edge list (exactly one of the two).
    """

    dataset: str = "graph"
    graph: str = None
    generator: str = None
    graph_seed: int = 0
    p_grid: tuple = DEFAULT_P_GRID
    replicates: int = 10
    experiments: tuple = ("degree", "triangle")
    degree_estimators: tuple = DEGREE_ESTIMATORS
    triangle_estimators: tuple = TRIANGLE_ESTIMATORS
    iterations: int = 15000
    n_original: int = None
    seed: int = 0
    output_dir: str = "results"
    scatter: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        self.p_grid = tuple(float(p) for p in self.p_grid)
        if not self.p_grid or any(not 0.0 < p <= 1.0 for p in self.p_grid):
            raise ParameterError(f"p_grid values must lie in (0, 1], got {self.p_grid}")
        if int(self.replicates) < 1:
            raise ParameterError("replicates must be >= 1")
        self.replicates = int(self.replicates)
        if (self.graph is None) == (self.generator is None):
            raise ParameterError("set exactly one of 'graph' and 'generator'")
        for name in self.experiments:
            if name not in ("degree", "triangle"):
                raise ParameterError(f"unknown experiment {name!r}")
        for name in self.degree_estimators:
            if name not in DEGREE_ESTIMATORS:
                raise ParameterError(f"unknown degree estimator {name!r}")
        for name in self.triangle_estimators:
            if name not in TRIANGLE_ESTIMATORS:
                raise ParameterError(f"unknown triangle estimator {name!r}")

    @classmethod
    def from_mapping(cls, mapping):
        kinds = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in mapping.items():
            if key not in kinds:
                raise ParameterError(f"unknown config key {key!r}")
            default = kinds[key].default
            if isinstance(default, tuple):
                value = _split_list(raw)
            elif isinstance(default, bool):
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            elif isinstance(default, int) or key == "n_original":
                value = int(raw)
            else:
                value = raw.strip()
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        mapping = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
                mapping[key.strip()] = value.strip()
        return cls.from_mapping(mapping)

    def load_graph(self):
        if self.graph is not None:
            return read_edge_list(self.graph)
        parts = self.generator.split()
        if len(parts) != 3 or parts[0] not in ("er", "ba"):
            raise ParameterError(f"generator must be 'er N M' or 'ba N m', got {self.generator!r}")
        n, m = int(parts[1]), int(parts[2])
        if parts[0] == "er":
            return generate_er(n, m, seed=self.graph_seed)
        return generate_ba(n, m, seed=self.graph_seed)


@dataclass
class ExperimentResult:
    """Rows of (dataset, p, replicate, experiment, estimator, metric, value, error)."""

    rows: list = field(default_factory=list)
    scatter: dict = field(default_factory=dict)

    @property
    def n_errors(self):
        return sum(1 for r in self.rows if r[-1])

    def values(self, experiment, estimator, metric, p=None):
        return np.array([
            r[6] for r in self.rows
            if r[3] == experiment and r[4] == estimator and r[5] == metric and (p is None or r[1] == p)
        ])

    def summary(self):
        groups = {}
        for row in self.rows:
            dataset, p, _, experiment, estimator, metric, value, error = row
            if error:
                continue
            groups.setdefault((dataset, p, experiment, estimator, metric), []).append(value)
        out = []
        for key, vals in groups.items():
            arr = np.asarray(vals, dtype=float)
            sd = float(arr.std(ddof=1)) if len(arr) > 1 else 0.0
            out.append((*key, float(arr.mean()), sd, len(arr)))
        return out

    def extend(self, other):
        self.rows.extend(other.rows)
        self.scatter.update(other.scatter)

    def write(self, output_dir):
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_rows(out / "results.csv", RESULT_FIELDS, self.rows)
        _write_rows(out / "summary.csv", SUMMARY_FIELDS, self.summary())
        for p, rows in sorted(self.scatter.items()):
            _write_rows(out / f"scatter_{p:g}.csv", SCATTER_FIELDS, rows)


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else "nan"
    return v


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


# one replicate --------------------------------------------------------------

_RECOVERABLE = (PriorConstructionError, EstimationError, ParameterError)


def _degree_estimates(name, s, parent, cfg, rng_seed):
    if name == "mme":
        return est.mme_degree(s).estimates
    if name in ("min", "bayes_min"):
        seq, prior = minimisation_prior(s, iterations=cfg.iterations, seed=rng_seed)
        if name == "min":
            return seq.kappa.astype(float)
        return est.bayes_degree(s, prior).estimates
    if name == "bayes_true":
        return est.bayes_degree(s, true_prior_degree(parent)).estimates
    if name == "bayes_cascade":
        n_orig = cfg.n_original if cfg.n_original is not None else parent.n_nodes
        _, prior = link_cascade_prior(s, n_orig, seed=rng_seed)
        return est.bayes_degree(s, prior).estimates
    raise ParameterError(name)


def _triangle_estimates(name, s, parent):
    if name == "mme":
        return est.mme_edge_triangles(s).estimates, est.mme_total_triangles(s).value
    prior = true_prior_triangles(parent) if name == "bayes_true" else poisson_triangle_prior(s)
    per_edge = est.bayes_edge_triangles(s, prior).estimates
    total = float(per_edge.sum()) / (3.0 * s.p) if len(per_edge) else 0.0
    return per_edge, total


def run_replicate(parent, cfg, p, r, experiments=None):
    """All requested estimators on one sample; returns an :class:`ExperimentResult`."""
    experiments = cfg.experiments if experiments is None else experiments
    ss = replicate_seed(cfg.seed, cfg.dataset, float(p), r)
    sample_seed, prior_seed = ss.spawn(2)
    s = edge_sample(parent, p, np.random.default_rng(sample_seed))
    res = ExperimentResult()
    scatter_rows = []

    def emit(experiment, estimator, metric, value, error=""):
        res.rows.append((cfg.dataset, float(p), r, experiment, estimator, metric, value, error))

    if "degree" in experiments:
        truth = true_degrees(parent, s)
        for name in cfg.degree_estimators:
            try:
                k_hat = _degree_estimates(name, s, parent, cfg, np.random.default_rng(prior_seed))
            except _RECOVERABLE as exc:
                log.warning("p=%s rep=%s degree/%s failed: %s", p, r, name, exc)
                emit("degree", name, "rmse", float("nan"), f"{type(exc).__name__}: {exc}")
                continue
            emit("degree", name, "rmse", rmse_degree(truth, k_hat))
            if cfg.scatter and r == 0:
                scatter_rows += [("degree", name, s.graph.labels[i], int(t), float(e))
                                 for i, (t, e) in enumerate(zip(truth, k_hat))]

    if "triangle" in experiments:
        truth = true_edge_triangles(parent, s)
        true_total = parent.triangles.total
        for name in cfg.triangle_estimators:
            try:
                t_hat, total = _triangle_estimates(name, s, parent)
            except _RECOVERABLE as exc:
                log.warning("p=%s rep=%s triangle/%s failed: %s", p, r, name, exc)
                err = f"{type(exc).__name__}: {exc}"
                for metric in ("rmse", "total", "total_sq_error"):
                    emit("triangle", name, metric, float("nan"), err)
                continue
            emit("triangle", name, "rmse", rmse_edge_triangles(truth, t_hat))
            emit("triangle", name, "total", float(total))
            emit("triangle", name, "total_sq_error", float((total - true_total) ** 2))
            if cfg.scatter and r == 0:
                lab = s.graph.labels
                scatter_rows += [("triangle", name, f"{lab[a]} {lab[b]}", int(t), float(e))
                                 for (a, b), t, e in zip(s.graph.edges, truth, t_hat)]
    if scatter_rows:
        res.scatter[float(p)] = scatter_rows
    return res


def run_experiment(cfg, parent=None, experiments=None):
    """Run every (p, replicate) in canonical order and collect the rows."""
    parent = cfg.load_graph() if parent is None else parent
    jobs = [(p, r) for p in cfg.p_grid for r in range(cfg.replicates)]
    if cfg.n_jobs == 1:
        parts = [run_replicate(parent, cfg, p, r, experiments) for p, r in jobs]
    else:
        from joblib import Parallel, delayed

        parts = Parallel(n_jobs=cfg.n_jobs)(
            delayed(run_replicate)(parent, cfg, p, r, experiments) for p, r in jobs
        )
    result = ExperimentResult()
    for part in parts:
        result.extend(part)
    return result


def run_degree_experiment(cfg, parent=None):
    return run_experiment(cfg, parent, experiments=("degree",))


def run_triangle_experiment(cfg, parent=None):
    return run_experiment(cfg, parent, experiments=("triangle",))
