"""Uniform edge sampling (incident subgraph sampling)."""

import zlib
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import as_generator, check_probability
from .graph import Graph, _readonly


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """An edge sample G' of a parent graph together with the sampling rate.

    ``graph`` holds only nodes with at least one retained edge. Sample node
    ``s`` is parent node ``parent_node_of[s]``; sample edge ``e`` is parent
    edge ``parent_edge_of[e]``. Both maps are increasing, so the sample keeps
    the parent's canonical edge order.
    """

    graph: Graph
    p: float
    parent_node_of: np.ndarray
    parent_edge_of: np.ndarray
    removed_node_count: int

    @property
    def n_nodes(self):
        return self.graph.n_nodes

    @property
    def n_edges(self):
        return self.graph.n_edges

    @property
    def degrees(self):
        return self.graph.degrees

    @cached_property
    def edge_triangles(self):
        """Per-edge triangle counts T'_l within the sample."""
        return self.graph.triangles.edge_counts

    @property
    def triangle_count(self):
        return self.graph.triangles.total


def edge_sample(g, p, seed=None):
    """Keep each edge of ``g`` independently with probability ``p``.

    One uniform draw is made per parent edge in canonical order, so a given
    seed always yields the same sample. Nodes left without edges disappear
    from the sample and are tallied in ``removed_node_count``.
    """
    p = check_probability(p)
    rng = as_generator(seed)
    keep = rng.random(g.n_edges) < p
    return restrict_to_edges(g, np.flatnonzero(keep), p)


def restrict_to_edges(g, edge_index, p):
    """Build the :class:`SampledGraph` induced by a set of retained parent edges."""
    edge_index = np.asarray(edge_index, dtype=np.int64)
    kept = g.edges[edge_index]
    nodes = np.unique(kept) if len(kept) else np.empty(0, dtype=np.int64)
    # parent -> sample id; monotone because ``nodes`` is sorted
    remap = np.full(g.n_nodes, -1, dtype=np.int64)
    remap[nodes] = np.arange(len(nodes))
    sample_edges = remap[kept]
    labels = tuple(g.labels[i] for i in nodes)
    sub = Graph(len(nodes), _readonly(sample_edges.reshape(-1, 2)), labels)
    return SampledGraph(
        graph=sub,
        p=float(p),
        parent_node_of=_readonly(nodes),
        parent_edge_of=_readonly(edge_index),
        removed_node_count=int(g.n_nodes - len(nodes)),
    )


def replicate_seed(master_seed, *key):
    """Derive an independent ``SeedSequence`` from a master seed and a key.

    Keys may mix ints, floats (sampling rates) and strings (dataset tags);
    the stream for one key never depends on which other keys were drawn.
    """
    words = []
    for k in key:
        if isinstance(k, str):
            words.append(zlib.crc32(k.encode("utf-8")))
        elif isinstance(k, float):
            words.append(int(round(k * 1_000_000)))
        else:
            words.append(int(k))
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(words))


def sample_replicates(g, p, n_replicates, seed=0, tag=""):
    """Yield ``n_replicates`` samples, replicate ``r`` seeded by (seed, tag, p, r)."""
    for r in range(n_replicates):
        yield edge_sample(g, p, replicate_seed(seed, tag, float(p), r))


def removed_node_counts(g, p, n_replicates, seed=0, tag=""):
    """N'_0 for each replicate without materialising the samples.

    Uses the same per-replicate streams and draw order as
    :func:`sample_replicates`, so counts agree with the full samples.
    """
    p = check_probability(p)
    src, dst = g.edges[:, 0], g.edges[:, 1]
    out = np.empty(n_replicates, dtype=np.int64)
    for r in range(n_replicates):
        rng = np.random.default_rng(replicate_seed(seed, tag, float(p), r))
        keep = rng.random(g.n_edges) < p
        deg = np.bincount(src[keep], minlength=g.n_nodes) + np.bincount(dst[keep], minlength=g.n_nodes)
        out[r] = int(np.count_nonzero(deg == 0))
    return out
