"""Graph rebuilding between phases."""
import numpy as np

from src.graph.contract import contract_graph
from src.graph.csr import Graph
from src.modularity import CommunityState


def renumber_communities(s: CommunityState) -> tuple[np.ndarray, int]:
    """
    Dense ids for the non-empty communities, ascending by label. Returns the
    community → new id map (-1 for empty communities) and the count.
    """
    non_empty = np.flatnonzero(s.sizes > 0)
    ordered = non_empty[np.argsort(s.labels[non_empty], kind="stable")]
    community_map = np.full(s.sizes.size, -1, dtype=np.int64)
    community_map[ordered] = np.arange(ordered.size, dtype=np.int64)
    return community_map, int(ordered.size)


def rebuild(g: Graph, s: CommunityState) -> tuple[Graph, np.ndarray]:
    """
    One meta-vertex per non-empty community. Its self loop carries the
    intra-community weight counted once (½·w_internal); meta edges carry the
    summed inter-community weight.
    """
    community_map, count = renumber_communities(s)
    rebuilt = contract_graph(g, community_map[s.assignment], count)
    return rebuilt, community_map
