"""Compressed sparse row storage for weighted undirected graphs."""
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sps
from loguru import logger

from src.exceptions import EmptyGraphError, GraphFormatError
from src.models import DegreeStats


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Immutable weighted undirected graph.

    Each non-self edge {i, j} is stored once in the adjacency range of i and
    once in that of j; a self loop (i, i) is stored once, in i's range, and
    counts twice toward k_i.
    """
    num_vertices: int
    num_edges: int
    adjacency_offsets: np.ndarray
    neighbors: np.ndarray
    weights: np.ndarray
    weighted_degrees: np.ndarray
    total_weight: float
    merged_duplicates: int = field(default=0, compare=False)

    @classmethod
    def from_edges(cls, num_vertices: int, src, dst, weights=None) -> "Graph":
        """
        Builds a graph from undirected edge records. Records naming the same
        unordered pair are merged by summing their weights.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if weights is None:
            w = np.ones(src.shape[0], dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64).ravel()
            if w.shape != src.shape:
                raise ValueError("weights must match the number of edges")
        n = int(num_vertices)
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise GraphFormatError(f"vertex id out of range 0..{n - 1}")
        if w.size and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise GraphFormatError("non-positive weight")

        lo = np.minimum(src, dst)
        hi = np.maximum(src, dst)
        keys, inverse = np.unique(lo * n + hi, return_inverse=True)
        merged = int(src.size - keys.size)
        merged_w = np.bincount(inverse.ravel(), weights=w, minlength=keys.size) if keys.size else w[:0]
        u = keys // n if n else keys
        v = keys % n if n else keys

        off_diag = u != v
        rows = np.concatenate([u, v[off_diag]])
        cols = np.concatenate([v, u[off_diag]])
        vals = np.concatenate([merged_w, merged_w[off_diag]])

        adj = sps.csr_matrix((vals, (rows, cols)), shape=(n, n))
        adj.sum_duplicates()
        adj.sort_indices()
        if merged:
            logger.warning(f"Merged {merged} duplicate edge records")
        return cls.from_csr(adj, num_edges=int(keys.size), merged_duplicates=merged)

    @classmethod
    def from_csr(cls, adj: sps.csr_matrix, num_edges: int | None = None, merged_duplicates: int = 0) -> "Graph":
        """Wraps a symmetric CSR matrix whose diagonal holds self-loop weights."""
        adj = sps.csr_matrix(adj)
        adj.sort_indices()
        n = adj.shape[0]
        offsets = adj.indptr.astype(np.int64)
        neighbors = adj.indices.astype(np.int64)
        weights = adj.data.astype(np.float64)

        owner = np.repeat(np.arange(n, dtype=np.int64), np.diff(offsets))
        is_loop = neighbors == owner
        # a self loop counts twice toward k_i
        degrees = np.bincount(owner, weights=np.where(is_loop, 2.0 * weights, weights), minlength=n)
        if num_edges is None:
            num_edges = int((neighbors.size + np.count_nonzero(is_loop)) // 2)
        return cls(
            num_vertices=n,
            num_edges=num_edges,
            adjacency_offsets=offsets,
            neighbors=neighbors,
            weights=weights,
            weighted_degrees=degrees.astype(np.float64),
            total_weight=float(degrees.sum() / 2.0),
            merged_duplicates=merged_duplicates,
        )

    # --- accessors -------------------------------------------------------

    def neighbors_of(self, i: int) -> np.ndarray:
        return self.neighbors[self.adjacency_offsets[i]:self.adjacency_offsets[i + 1]]

    def weights_of(self, i: int) -> np.ndarray:
        return self.weights[self.adjacency_offsets[i]:self.adjacency_offsets[i + 1]]

    def edge_weight(self, i: int, j: int) -> float:
        """ω(i, j), or 0 when the pair is not an edge."""
        nbrs = self.neighbors_of(i)
        pos = np.searchsorted(nbrs, j)
        if pos < nbrs.size and nbrs[pos] == j:
            return float(self.weights_of(i)[pos])
        return 0.0

    @cached_property
    def degrees(self) -> np.ndarray:
        """Unweighted degree; a self loop counts once."""
        return np.diff(self.adjacency_offsets)

    @cached_property
    def self_loops(self) -> np.ndarray:
        """Stored self-loop weight per vertex (0 where absent)."""
        owner = np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees)
        mask = self.neighbors == owner
        loops = np.zeros(self.num_vertices, dtype=np.float64)
        loops[owner[mask]] = self.weights[mask]
        return loops

    def to_csr(self) -> sps.csr_matrix:
        n = self.num_vertices
        return sps.csr_matrix((self.weights, self.neighbors, self.adjacency_offsets), shape=(n, n))

    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once, as (u, v, w) with u <= v, sorted."""
        owner = np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees)
        keep = owner <= self.neighbors
        return owner[keep], self.neighbors[keep], self.weights[keep]

    def same_as(self, other: "Graph") -> bool:
        return (
            self.num_vertices == other.num_vertices
            and self.num_edges == other.num_edges
            and self.total_weight == other.total_weight
            and np.array_equal(self.adjacency_offsets, other.adjacency_offsets)
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.num_vertices}, M={self.num_edges}, m={self.total_weight:g})"


def degree_stats(g: Graph) -> DegreeStats:
    """Max, mean and relative standard deviation of unweighted degrees."""
    if g.num_edges == 0:
        raise EmptyGraphError("no edges")
    deg = g.degrees.astype(np.float64)
    mean = float(deg.mean())
    return DegreeStats(
        max_degree=int(g.degrees.max()),
        avg_degree=mean,
        rsd=float(deg.std() / mean),
    )


def write_edge_list(g: Graph, path: Path) -> None:
    """
    Writes `u v w` lines preceded by a `# vertices n` header, which the
    edge-list loader honours so ids and isolated vertices survive a reload.
    """
    u, v, w = g.edges()
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# vertices {g.num_vertices}\n")
        for a, b, x in zip(u.tolist(), v.tolist(), w.tolist()):
            f.write(f"{a} {b} {x!r}\n")
