"""Small seeded graph generators for tests and benchmarks."""
import numpy as np
from scipy.spatial import cKDTree

from src.graph.csr import Graph

# Zachary's karate club, 0-based
KARATE_EDGES = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7), (0, 8), (0, 10), (0, 11),
    (0, 12), (0, 13), (0, 17), (0, 19), (0, 21), (0, 31), (1, 2), (1, 3), (1, 7), (1, 13),
    (1, 17), (1, 19), (1, 21), (1, 30), (2, 3), (2, 7), (2, 8), (2, 9), (2, 13), (2, 27),
    (2, 28), (2, 32), (3, 7), (3, 12), (3, 13), (4, 6), (4, 10), (5, 6), (5, 10), (5, 16),
    (6, 16), (8, 30), (8, 32), (8, 33), (9, 33), (13, 33), (14, 32), (14, 33), (15, 32), (15, 33),
    (18, 32), (18, 33), (19, 33), (20, 32), (20, 33), (22, 32), (22, 33), (23, 25), (23, 27), (23, 29),
    (23, 32), (23, 33), (24, 25), (24, 27), (24, 31), (25, 31), (26, 29), (26, 33), (27, 33), (28, 31),
    (28, 33), (29, 32), (29, 33), (30, 32), (30, 33), (31, 32), (31, 33), (32, 33),
]


def from_edge_pairs(pairs, num_vertices: int | None = None, weights=None) -> Graph:
    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    n = num_vertices if num_vertices is not None else (int(arr.max()) + 1 if arr.size else 0)
    return Graph.from_edges(n, arr[:, 0], arr[:, 1], weights)


def complete_graph(n: int) -> Graph:
    iu, ju = np.triu_indices(n, k=1)
    return Graph.from_edges(n, iu, ju)


def star_graph(leaves: int) -> Graph:
    """Hub 0 with leaves 1..leaves."""
    return Graph.from_edges(leaves + 1, np.zeros(leaves, dtype=np.int64), np.arange(1, leaves + 1))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, np.arange(n - 1), np.arange(1, n))


def two_triangles() -> Graph:
    """Triangles {0,1,2} and {3,4,5} joined by the bridge (2,3)."""
    return from_edge_pairs([(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)])


def karate_club() -> Graph:
    return from_edge_pairs(KARATE_EDGES, num_vertices=34)


def random_graph(n: int, num_records: int, rng: np.random.Generator, max_weight: int | None = None,
                 self_loops: bool = False) -> Graph:
    """
    Uniform random edge records (duplicates merge). Integer weights in
    1..max_weight when max_weight is given, unit weights otherwise.
    """
    src = rng.integers(0, n, size=num_records)
    dst = rng.integers(0, n, size=num_records)
    if not self_loops:
        keep = src != dst
        src, dst = src[keep], dst[keep]
    weights = None if max_weight is None else rng.integers(1, max_weight + 1, size=src.size).astype(np.float64)
    return Graph.from_edges(n, src, dst, weights)


def random_weighted_graph(n: int, num_records: int, rng: np.random.Generator) -> Graph:
    """Real weights drawn from (0, 10]."""
    src = rng.integers(0, n, size=num_records)
    dst = rng.integers(0, n, size=num_records)
    weights = 10.0 - rng.uniform(0.0, 10.0, size=num_records)
    return Graph.from_edges(n, src, dst, weights)


def planted_partition(groups: int, group_size: int, degree_in: float, degree_out: float,
                      rng: np.random.Generator) -> Graph:
    """Groups of equal size with given expected intra/inter degrees."""
    n = groups * group_size
    m_in = int(n * degree_in / 2)
    m_out = int(n * degree_out / 2)
    g = rng.integers(0, groups, size=m_in)
    a = g * group_size + rng.integers(0, group_size, size=m_in)
    b = g * group_size + rng.integers(0, group_size, size=m_in)
    c = rng.integers(0, n, size=m_out)
    d = rng.integers(0, n, size=m_out)
    src = np.concatenate([a, c])
    dst = np.concatenate([b, d])
    keep = src != dst
    return Graph.from_edges(n, src[keep], dst[keep])


def random_geometric(n: int, radius: float, rng: np.random.Generator) -> Graph:
    """Points in the unit square joined when closer than radius."""
    points = rng.random((n, 2))
    pairs = cKDTree(points).query_pairs(radius, output_type="ndarray")
    return Graph.from_edges(n, pairs[:, 0], pairs[:, 1])
