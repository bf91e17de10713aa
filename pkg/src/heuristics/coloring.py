"""Speculative parallel distance-1 greedy coloring."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from loguru import logger
from numba import njit, prange

from src.graph.csr import Graph
from src.utils import timed, worker_scope

MAX_ROUNDS = 1_000_000


@dataclass(frozen=True, eq=False)
class Coloring:
    colors: np.ndarray
    num_colors: int

    @cached_property
    def class_sizes(self) -> np.ndarray:
        return np.bincount(self.colors, minlength=self.num_colors)

    @cached_property
    def classes(self) -> list[np.ndarray]:
        """Vertex ids of each color class, ascending, in color order."""
        order = np.argsort(self.colors, kind="stable")
        bounds = np.cumsum(self.class_sizes)[:-1]
        return np.split(order, bounds)

    @property
    def class_size_rsd(self) -> float:
        sizes = self.class_sizes.astype(np.float64)
        return float(sizes.std() / sizes.mean()) if sizes.size else 0.0


@njit(parallel=True, cache=True)
def _tentative_colors(offsets, neighbors, colors, worklist, out):
    # smallest color absent from the already colored neighbors
    for t in prange(worklist.size):
        v = worklist[t]
        start, end = offsets[v], offsets[v + 1]
        forbidden = np.zeros(end - start + 1, dtype=np.bool_)
        for e in range(start, end):
            u = neighbors[e]
            if u != v:
                c = colors[u]
                if c >= 0 and c <= end - start:
                    forbidden[c] = True
        c = 0
        while forbidden[c]:
            c += 1
        out[t] = c


@njit(parallel=True, cache=True)
def _conflicts(offsets, neighbors, colors, worklist, lose):
    # the higher endpoint of a same-colored edge gives its color up
    for t in prange(worklist.size):
        v = worklist[t]
        lose[t] = False
        for e in range(offsets[v], offsets[v + 1]):
            u = neighbors[e]
            if u < v and colors[u] == colors[v]:
                lose[t] = True
                break


@timed
def color_graph(g: Graph, worker_count: int | None = None) -> Coloring:
    """
    Rounds of: every uncolored vertex takes the smallest color missing among
    its colored neighbors (reads from the round's snapshot), then same-colored
    edges are detected and their higher-id endpoint is uncolored.
    """
    n = g.num_vertices
    colors = np.full(n, -1, dtype=np.int64)
    worklist = np.arange(n, dtype=np.int64)
    rounds = 0
    with worker_scope(worker_count):
        while worklist.size:
            rounds += 1
            if rounds > MAX_ROUNDS:
                raise RuntimeError("coloring did not converge")
            chosen = np.empty(worklist.size, dtype=np.int64)
            _tentative_colors(g.adjacency_offsets, g.neighbors, colors, worklist, chosen)
            colors[worklist] = chosen
            lose = np.empty(worklist.size, dtype=np.bool_)
            _conflicts(g.adjacency_offsets, g.neighbors, colors, worklist, lose)
            worklist = worklist[lose]
            colors[worklist] = -1

    num_colors = int(colors.max()) + 1 if n else 0
    coloring = Coloring(colors=colors, num_colors=num_colors)
    logger.debug(f"Colored {n} vertices with {num_colors} colors in {rounds} rounds "
                 f"(class size RSD {coloring.class_size_rsd:.3f})")
    return coloring


def coloring_conflicts(g: Graph, colors: np.ndarray) -> int:
    """Number of non-self edges whose endpoints share a color."""
    u, v, _ = g.edges()
    off_diag = u != v
    return int(np.count_nonzero(colors[u[off_diag]] == colors[v[off_diag]]))
