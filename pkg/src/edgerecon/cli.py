"""Command line interface: ``edgerecon {stats,sample,estimate,prior,theory,experiment}``."""

import argparse
import csv
import logging
import sys

import numpy as np

from . import estimators as est
from .exceptions import CapacityError, GraphParseError, ParameterError, PriorConstructionError
from .graph import format_edge_list, graph_stats, read_comment_fields, read_edge_list
from .harness import ExperimentConfig, run_experiment
from .priors import (
    DiscretePrior,
    link_cascade_prior,
    minimisation_prior,
    poisson_triangle_prior,
    true_prior_degree,
    true_prior_triangles,
)
from .sampling import SampledGraph, edge_sample, removed_node_counts
from .theory import MomentReport, closed_form_report


def _writer(out=None):
    return csv.writer(out or sys.stdout, lineterminator="\n")


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def _load_sample(path, p):
    """Read a sampled edge list; ``p`` falls back to its ``# p=`` header line."""
    g = read_edge_list(path)
    if p is None:
        header = read_comment_fields(path)
        if "p" not in header:
            raise ParameterError(f"{path} has no '# p=' header; pass --p")
        p = float(header["p"])
    n = g.n_nodes
    return SampledGraph(g, p, np.arange(n), np.arange(g.n_edges), 0)


def cmd_stats(args):
    stats = graph_stats(read_edge_list(args.file))
    w = _writer()
    w.writerow(stats.FIELDS)
    w.writerow([_fmt(v) for v in stats.as_row()])


def cmd_sample(args):
    g = read_edge_list(args.file)
    s = edge_sample(g, args.p, args.seed)
    text = format_edge_list(s.graph, header=[f"p={args.p!r} removed_nodes={s.removed_node_count}"])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _quantity_for(args):
    if args.quantity:
        return args.quantity
    kind = args.prior.split(":", 1)[0] if args.prior else None
    if kind == "poisson":
        return "triangles"
    return "degree"


def _resolve_prior(prior_spec, s, quantity, args):
    kind, _, arg = prior_spec.partition(":")
    if kind == "true":
        if not arg:
            raise ParameterError("use --prior true:<reference edge list>")
        ref = read_edge_list(arg)
        return true_prior_degree(ref) if quantity == "degree" else true_prior_triangles(ref)
    if kind == "csv":
        with open(arg, encoding="utf-8") as fh:
            return DiscretePrior.read_csv(fh)
    if kind == "poisson":
        if quantity != "triangles":
            raise ParameterError("the Poisson prior is a triangle prior")
        return poisson_triangle_prior(s)
    if quantity != "degree":
        raise ParameterError(f"the {kind!r} prior is a degree prior")
    if kind == "min":
        return minimisation_prior(s, iterations=args.iterations, seed=args.seed)[1]
    if kind == "cascade":
        if args.n_original is None:
            raise ParameterError("the cascade prior needs --n-original")
        return link_cascade_prior(s, args.n_original, seed=args.seed)[1]
    raise ParameterError(f"unknown prior {prior_spec!r}")


def cmd_estimate(args):
    s = _load_sample(args.file, args.p)
    quantity = _quantity_for(args)
    if args.method == "bayes":
        if not args.prior:
            raise ParameterError("--method bayes needs --prior")
        prior = _resolve_prior(args.prior, s, quantity, args)
    g = s.graph
    w = _writer()
    w.writerow(["item_id", "observed", "estimate"])
    if quantity == "degree":
        res = est.mme_degree(s) if args.method == "mme" else est.bayes_degree(s, prior)
        ids = g.labels
    else:
        res = est.mme_edge_triangles(s) if args.method == "mme" else est.bayes_edge_triangles(s, prior)
        ids = [f"{g.labels[i]} {g.labels[j]}" for i, j in g.edges]
        total = (est.mme_total_triangles(s) if args.method == "mme"
                 else est.bayes_total_triangles(s, prior)).value
        print(f"total_triangles={total!r}", file=sys.stderr)
    for item, o, e in zip(ids, res.observed.tolist(), res.estimates.tolist()):
        w.writerow([item, o, repr(float(e))])


def cmd_prior(args):
    s = _load_sample(args.file, args.p)
    if args.method == "true":
        if not args.reference:
            raise ParameterError("--method true needs --reference")
        prior_spec = f"true:{args.reference}"
        quantity = args.quantity or "degree"
    else:
        prior_spec = args.method
        quantity = "triangles" if args.method == "poisson" else "degree"
    prior = _resolve_prior(prior_spec, s, quantity, args)
    prior.write_csv(sys.stdout)


def cmd_theory(args):
    g = read_edge_list(args.file)
    reports = [closed_form_report(g, args.p, "N0"), closed_form_report(g, args.p, "T_total")]
    if args.replicates:
        n0 = removed_node_counts(g, args.p, args.replicates, seed=args.seed)
        r0 = reports[0]
        reports[0] = MomentReport(r0.quantity, r0.mean, r0.variance,
                                  float(n0.mean()), float(n0.var(ddof=1)) if len(n0) > 1 else 0.0,
                                  args.replicates)
    w = _writer()
    w.writerow(MomentReport.FIELDS)
    for rep in reports:
        w.writerow([_fmt(v) for v in rep.as_row()])


def cmd_experiment(args):
    cfg = ExperimentConfig.from_file(args.config)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    result = run_experiment(cfg)
    result.write(cfg.output_dir)
    if result.n_errors:
        print(f"{result.n_errors} rows failed; see the 'error' column of results.csv", file=sys.stderr)
        return 2
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="edgerecon",
        description="Edge-sample graphs and reconstruct degree and triangle statistics.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="summary statistics of an edge list as one CSV row")
    p.add_argument("file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("sample", help="uniformly edge-sample a graph")
    p.add_argument("file")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("estimate", help="per-item estimates for a sampled edge list")
    p.add_argument("file")
    p.add_argument("--p", type=float, help="sampling rate (default: the file's '# p=' header)")
    p.add_argument("--method", choices=("mme", "bayes"), required=True)
    p.add_argument("--prior", help="true:<edge list> | csv:<prior file> | min | cascade | poisson")
    p.add_argument("--quantity", choices=("degree", "triangles"))
    p.add_argument("--n-original", type=int)
    p.add_argument("--iterations", type=int, default=15000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("prior", help="build a prior and print it as value,probability")
    p.add_argument("file")
    p.add_argument("--p", type=float)
    p.add_argument("--method", choices=("min", "cascade", "poisson", "true"), required=True)
    p.add_argument("--quantity", choices=("degree", "triangles"), help="for --method true")
    p.add_argument("--n-original", type=int)
    p.add_argument("--iterations", type=int, default=15000)
    p.add_argument("--reference", help="original edge list, for --method true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_prior)

    p = sub.add_parser("theory", help="closed-form moments of N'_0 and T'")
    p.add_argument("file")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--replicates", type=int, default=0, help="also simulate N'_0 this many times")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("experiment", help="run a p-grid experiment from a key = value config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (ParameterError, GraphParseError, PriorConstructionError, CapacityError,
            ArithmeticError, OSError) as exc:
        print(f"edgerecon: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
