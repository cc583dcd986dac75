"""Undirected simple graphs: storage, generators, exact statistics and edge-list I/O.

Internal node ids are contiguous ``0..N-1``. Edges are stored once each as
``(i, j)`` with ``i < j`` in lexicographic order; that order is the canonical
edge order every other module indexes by.
"""

import gzip
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from ._validation import as_generator
from .exceptions import CapacityError, GraphParseError, ParameterError

COMMENT_PREFIXES = ("#", "%")


def _readonly(arr):
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    Use :func:`build_graph` (labels) or :meth:`Graph.from_edges` (internal
    ids) rather than calling the constructor directly.
    """

    n_nodes: int
    edges: np.ndarray
    labels: tuple

    @classmethod
    def from_edges(cls, n_nodes, edges, labels=None):
        """Build from integer endpoint pairs, dropping self-loops and duplicates."""
        n_nodes = int(n_nodes)
        if n_nodes < 0:
            raise ParameterError("n_nodes must be non-negative")
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n_nodes):
            raise ParameterError("edge endpoint outside [0, n_nodes)")
        e = np.sort(e, axis=1)
        e = e[e[:, 0] != e[:, 1]]
        if len(e):
            e = np.unique(e, axis=0)
        if labels is None:
            labels = tuple(str(i) for i in range(n_nodes))
        else:
            labels = tuple(str(x) for x in labels)
            if len(labels) != n_nodes:
                raise ParameterError("labels must have one entry per node")
        return cls(n_nodes, _readonly(e), labels)

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def adjacency(self):
        """Symmetric CSR adjacency matrix with sorted column indices."""
        n = self.n_nodes
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        data = np.ones(len(rows), dtype=np.int64)
        a = sp.csr_matrix((data, (rows, cols)), shape=(n, n))
        a.sort_indices()
        return a

    @cached_property
    def degrees(self):
        deg = np.bincount(self.edges.ravel(), minlength=self.n_nodes)
        return _readonly(deg.astype(np.int64))

    def neighbors(self, i):
        a = self.adjacency
        return a.indices[a.indptr[i]:a.indptr[i + 1]]

    @cached_property
    def label_index(self):
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def triangles(self):
        return edge_triangle_counts(self)

    def edge_set(self):
        """Edges as a set of frozensets of labels; handy for comparisons."""
        lab = self.labels
        return {frozenset((lab[i], lab[j])) for i, j in self.edges}

    def __repr__(self):
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def build_graph(edge_pairs, nodes=None):
    """Intern label pairs into a :class:`Graph`.

    Self-loops are dropped and duplicate (or reversed) pairs collapse to one
    edge. Nodes only exist through edges unless ``nodes`` lists extra labels.
    Labels are kept as strings; numeric-looking labels are not reinterpreted.
    """
    index = {}
    order = []

    def intern(label):
        label = str(label)
        idx = index.get(label)
        if idx is None:
            idx = index[label] = len(order)
            order.append(label)
        return idx

    if nodes is not None:
        for lab in nodes:
            intern(lab)
    pairs = []
    for n, pair in enumerate(edge_pairs):
        try:
            a, b = pair
        except (TypeError, ValueError):
            raise GraphParseError(f"expected a pair of labels, got {pair!r}", line=n + 1) from None
        if str(a) == str(b):
            # keep the node alive only if it was declared explicitly
            continue
        pairs.append((intern(a), intern(b)))
    return Graph.from_edges(len(order), pairs, labels=order)


# generators ---------------------------------------------------------------


def _pair_from_index(r, n):
    """Map linear indices over the strict upper triangle (row-major) to (i, j)."""
    r = np.asarray(r, dtype=np.int64)
    total = n * (n - 1) // 2
    # rows counted from the bottom: r' = total - 1 - r lies in row n-2-i
    rr = total - 1 - r
    b = np.floor((np.sqrt(8.0 * rr + 1.0) - 1.0) / 2.0).astype(np.int64)
    # guard float error on the triangular root
    b = np.where(b * (b + 1) // 2 > rr, b - 1, b)
    b = np.where((b + 1) * (b + 2) // 2 <= rr, b + 1, b)
    i = n - 2 - b
    row_start = i * n - i * (i + 1) // 2
    j = r - row_start + i + 1
    return i, j


def generate_er(n, m, seed=None):
    """Erdős–Rényi G(n, m): ``m`` distinct edges chosen uniformly without replacement."""
    n, m = int(n), int(m)
    if n < 0 or m < 0:
        raise ParameterError("n and m must be non-negative")
    capacity = n * (n - 1) // 2
    if m > capacity:
        raise CapacityError(f"G({n}, m) holds at most {capacity} edges, asked for {m}")
    rng = as_generator(seed)
    idx = np.sort(rng.choice(capacity, size=m, replace=False)) if m else np.empty(0, np.int64)
    i, j = _pair_from_index(idx, n)
    return Graph.from_edges(n, np.column_stack([i, j]))


def generate_ba(n, m_attach, seed=None, seed_graph="star"):
    """Barabási–Albert preferential attachment.

    The seed graph has ``m_attach + 1`` nodes: a star by default, which gives
    exactly ``m_attach * (n - m_attach)`` edges (9900 at n=1000, m=10), or a
    complete graph with ``seed_graph="complete"``. Each later node attaches to
    ``m_attach`` distinct existing nodes drawn proportionally to degree.
    """
    n, m = int(n), int(m_attach)
    if m < 1 or n <= m:
        raise ParameterError(f"need m_attach >= 1 and n > m_attach, got n={n}, m_attach={m}")
    if seed_graph == "star":
        seed_edges = [(0, k) for k in range(1, m + 1)]
    elif seed_graph == "complete":
        seed_edges = [(a, b) for a in range(m + 1) for b in range(a + 1, m + 1)]
    else:
        raise ParameterError(f"unknown seed_graph {seed_graph!r}")
    rng = as_generator(seed)

    n_new = n - m - 1
    n_edges = len(seed_edges) + n_new * m
    # endpoint multiset: each node appears once per incident edge
    pool = np.empty(2 * n_edges, dtype=np.int64)
    pool[: 2 * len(seed_edges)] = np.asarray(seed_edges, dtype=np.int64).ravel()
    filled = 2 * len(seed_edges)
    edges = np.empty((n_edges, 2), dtype=np.int64)
    edges[: len(seed_edges)] = seed_edges
    e = len(seed_edges)
    for v in range(m + 1, n):
        targets = []
        chosen = set()
        while len(targets) < m:
            t = int(pool[rng.integers(filled)])
            if t not in chosen:
                chosen.add(t)
                targets.append(t)
        edges[e:e + m, 0] = targets
        edges[e:e + m, 1] = v
        e += m
        pool[filled:filled + m] = targets
        pool[filled + m:filled + 2 * m] = v
        filled += 2 * m
    return Graph.from_edges(n, edges)


def complete_graph(n):
    return Graph.from_edges(n, [(a, b) for a in range(n) for b in range(a + 1, n)])


def path_graph(n):
    return Graph.from_edges(n, [(a, a + 1) for a in range(n - 1)])


def star_graph(n_leaves):
    """Star with hub 0 and ``n_leaves`` leaves."""
    return Graph.from_edges(n_leaves + 1, [(0, k) for k in range(1, n_leaves + 1)])


def cycle_graph(n):
    return Graph.from_edges(n, [(a, (a + 1) % n) for a in range(n)])


# triangles ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TriangleSequence:
    """Per-edge triangle counts aligned with ``Graph.edges``."""

    edge_counts: np.ndarray
    edges: np.ndarray
    n_nodes: int

    @property
    def total(self):
        s = int(self.edge_counts.sum())
        assert s % 3 == 0, "per-edge triangle counts must sum to a multiple of 3"
        return s // 3

    @cached_property
    def node_counts(self):
        """Triangles through each node, from 2*T_i = sum of T_l over incident edges."""
        acc = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(acc, self.edges[:, 0], self.edge_counts)
        np.add.at(acc, self.edges[:, 1], self.edge_counts)
        return _readonly(acc // 2)


def edge_triangle_counts(g, chunk_size=1 << 16):
    """Count, for each edge (i, j), the triangles containing it: |N(i) ∩ N(j)|.

    Rows of the sorted CSR adjacency are intersected pairwise (an elementwise
    product of the two sparse rows), in chunks to bound memory.
    """
    a = g.adjacency
    i, j = g.edges[:, 0], g.edges[:, 1]
    counts = np.empty(len(i), dtype=np.int64)
    for start in range(0, len(i), chunk_size):
        stop = start + chunk_size
        common = a[i[start:stop]].multiply(a[j[start:stop]])
        counts[start:stop] = np.asarray(common.sum(axis=1)).ravel()
    return TriangleSequence(_readonly(counts), g.edges, g.n_nodes)


# summary statistics -------------------------------------------------------


@dataclass(frozen=True)
class SummaryStats:
    n_nodes: int
    n_edges: int
    max_degree: int
    assortativity: float
    assortativity_degenerate: bool
    triangles: int
    mean_clustering: float
    mean_edge_triangles: float

    FIELDS = ("N", "M", "k_max", "rho", "rho_degenerate", "T", "C_mean", "T_l_mean")

    def as_row(self):
        return (
            self.n_nodes,
            self.n_edges,
            self.max_degree,
            self.assortativity,
            int(self.assortativity_degenerate),
            self.triangles,
            self.mean_clustering,
            self.mean_edge_triangles,
        )


def degree_assortativity(g):
    """Pearson correlation of endpoint degrees over the 2M ordered edge ends.

    Returns ``(rho, degenerate)``; ``degenerate`` is True (and rho 0.0) when
    the endpoint degrees have zero variance, e.g. on regular graphs.
    """
    if g.n_edges == 0:
        return 0.0, True
    deg = g.degrees.astype(float)
    x = np.concatenate([deg[g.edges[:, 0]], deg[g.edges[:, 1]]])
    y = np.concatenate([deg[g.edges[:, 1]], deg[g.edges[:, 0]]])
    xc = x - x.mean()
    var = float(np.dot(xc, xc))
    if var <= 1e-12 * max(1.0, float(np.dot(x, x))):
        return 0.0, True
    rho = float(np.dot(xc, y - y.mean()) / var)
    return max(-1.0, min(1.0, rho)), False


def local_clustering(g, triangles=None):
    """Local clustering 2*T_i / (k_i (k_i - 1)); nodes with k < 2 get 0."""
    tri = triangles if triangles is not None else g.triangles
    k = g.degrees.astype(float)
    pairs = k * (k - 1)
    out = np.zeros(g.n_nodes)
    ok = pairs > 0
    out[ok] = 2.0 * tri.node_counts[ok] / pairs[ok]
    return out


def graph_stats(g):
    tri = g.triangles
    rho, degenerate = degree_assortativity(g)
    total = tri.total
    return SummaryStats(
        n_nodes=g.n_nodes,
        n_edges=g.n_edges,
        max_degree=int(g.degrees.max()) if g.n_nodes else 0,
        assortativity=rho,
        assortativity_degenerate=degenerate,
        triangles=total,
        mean_clustering=float(local_clustering(g, tri).mean()) if g.n_nodes else 0.0,
        mean_edge_triangles=3.0 * total / g.n_edges if g.n_edges else 0.0,
    )


def degree_histogram(g):
    """``N_k`` as an array indexed by degree k."""
    return np.bincount(g.degrees, minlength=1)


# edge-list I/O ------------------------------------------------------------


def _open_text(path, mode):
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, mode + "t", encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def parse_edge_lines(lines, path=None):
    """Yield label pairs from edge-list lines.

    Blank lines and lines starting with ``#`` or ``%`` are skipped. Columns
    beyond the first two (weights, timestamps) are ignored.
    """
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(COMMENT_PREFIXES):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphParseError(f"expected two labels, got {line!r}", line=lineno, path=path)
        yield parts[0], parts[1]


def read_edge_list(path):
    try:
        with _open_text(path, "r") as fh:
            return build_graph(parse_edge_lines(fh, path=path))
    except OSError as exc:
        raise GraphParseError(f"cannot read edge list: {exc}", path=path) from exc


def read_comment_fields(path):
    """Collect ``key=value`` tokens from leading comment lines of an edge list."""
    fields = {}
    with _open_text(path, "r") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if not line.startswith(COMMENT_PREFIXES):
                break
            for token in line.lstrip("#%").split():
                key, sep, value = token.partition("=")
                if sep:
                    fields[key] = value
    return fields


def format_edge_list(g, header=None):
    lines = []
    if header:
        lines.extend(f"# {h}" for h in header)
    lab = g.labels
    lines.extend(f"{lab[i]} {lab[j]}" for i, j in g.edges)
    return "\n".join(lines) + ("\n" if lines else "")


def write_edge_list(g, path, header=None):
    """Write one ``label label`` line per edge, with optional ``#`` header lines."""
    with _open_text(path, "w") as fh:
        fh.write(format_edge_list(g, header))

