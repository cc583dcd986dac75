"""Reconstruct degree and triangle statistics of a graph from a uniform edge sample."""

from .estimators import (
    BayesDegreeEstimator,
    BayesTriangleEstimator,
    MMEDegreeEstimator,
    MMETriangleEstimator,
    SequenceEstimate,
    TotalTriangleEstimate,
    bayes_degree,
    bayes_edge_triangles,
    bayes_total_triangles,
    bianconi_triangle_estimate,
    mme_degree,
    mme_edge_triangles,
    mme_total_triangles,
)
from .exceptions import (
    AlignmentError,
    CapacityError,
    EstimationError,
    GraphParseError,
    ParameterError,
    PriorConstructionError,
)
from .graph import (
    Graph,
    SummaryStats,
    TriangleSequence,
    build_graph,
    edge_triangle_counts,
    generate_ba,
    generate_er,
    graph_stats,
    read_edge_list,
    write_edge_list,
)
from .priors import (
    DegreeSequenceEstimate,
    DiscretePrior,
    link_cascade_prior,
    minimisation_prior,
    poisson_triangle_prior,
    true_prior_degree,
    true_prior_triangles,
)
from .sampling import SampledGraph, edge_sample

__version__ = "0.1.0"
