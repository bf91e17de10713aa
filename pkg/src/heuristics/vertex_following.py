"""Vertex following: merge single-degree vertices into their sole neighbor."""
from dataclasses import dataclass

import numpy as np
from loguru import logger

from src.graph.contract import contract_graph
from src.graph.csr import Graph


@dataclass(frozen=True, eq=False)
class VfMapping:
    mapping: np.ndarray  # original vertex -> compacted vertex
    graph: Graph
    merged_count: int

    def expand(self, compacted_assignment: np.ndarray) -> np.ndarray:
        return np.asarray(compacted_assignment)[self.mapping]


def single_degree_targets(g: Graph) -> np.ndarray:
    """
    For every vertex, the vertex it follows (itself if it stays). A vertex
    follows when its only edge is to another vertex and it has no self loop;
    of an isolated pair the lower id stays.
    """
    n = g.num_vertices
    ids = np.arange(n, dtype=np.int64)
    candidate = (g.degrees == 1) & (g.self_loops == 0)
    first = ids.copy()
    has_edges = g.degrees > 0
    first[has_edges] = g.neighbors[g.adjacency_offsets[:-1][has_edges]]
    target = np.where(candidate, first, ids)
    pair = candidate & candidate[target] & (target != ids)
    return np.where(pair & (ids < target), ids, target)


def vf_compact(g: Graph) -> VfMapping:
    """
    One pass over the original degrees; no chains are followed. Surviving
    vertices are renumbered densely in ascending original id.
    """
    target = single_degree_targets(g)
    survives = target == np.arange(g.num_vertices)
    new_id = np.cumsum(survives) - 1
    mapping = new_id[target].astype(np.int64)
    n_new = int(survives.sum())
    merged = g.num_vertices - n_new

    compacted = contract_graph(g, mapping, n_new) if merged else g
    logger.info(f"Vertex following merged {merged} single-degree vertices ({g.num_vertices} -> {n_new})")
    return VfMapping(mapping=mapping, graph=compacted, merged_count=merged)


def vf_rule_violations(g: Graph, assignment: np.ndarray) -> np.ndarray:
    """Single-degree vertices of g whose community differs from their neighbor's."""
    target = single_degree_targets(g)
    followers = np.flatnonzero(target != np.arange(g.num_vertices))
    # of an isolated pair only the higher id is a follower; that suffices
    return followers[assignment[followers] != assignment[target[followers]]]
