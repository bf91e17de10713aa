"""Modularity, modularity gain and community aggregate bookkeeping."""
from dataclasses import dataclass

import numpy as np

from src.exceptions import EmptyGraphError, InvalidMoveError
from src.graph.csr import Graph


@dataclass
class CommunityState:
    """
    Per-vertex community assignment plus per-community aggregates.
    Community ids index the aggregate arrays; empty communities keep zeros.
    """
    assignment: np.ndarray
    labels: np.ndarray
    a_tot: np.ndarray
    w_internal: np.ndarray
    sizes: np.ndarray

    @property
    def num_vertices(self) -> int:
        return int(self.assignment.size)

    @property
    def num_communities(self) -> int:
        return int(np.count_nonzero(self.sizes))

    def copy(self) -> "CommunityState":
        return CommunityState(
            assignment=self.assignment.copy(),
            labels=self.labels.copy(),
            a_tot=self.a_tot.copy(),
            w_internal=self.w_internal.copy(),
            sizes=self.sizes.copy(),
        )


def singleton_state(g: Graph) -> CommunityState:
    n = g.num_vertices
    ids = np.arange(n, dtype=np.int64)
    return CommunityState(
        assignment=ids.copy(),
        labels=ids.copy(),
        a_tot=g.weighted_degrees.copy(),
        w_internal=2.0 * g.self_loops,
        sizes=np.ones(n, dtype=np.int64),
    )


def state_from_assignment(g: Graph, assignment) -> CommunityState:
    """Builds a state whose aggregates are recomputed from scratch."""
    assignment = np.asarray(assignment, dtype=np.int64)
    n = g.num_vertices
    if assignment.shape != (n,) or (n and (assignment.min() < 0 or assignment.max() >= n)):
        raise ValueError("assignment must map every vertex to a community id in 0..n-1")
    a_tot, w_internal, sizes = recompute_aggregates(g, assignment)
    return CommunityState(
        assignment=assignment.copy(),
        labels=np.arange(n, dtype=np.int64),
        a_tot=a_tot,
        w_internal=w_internal,
        sizes=sizes,
    )


def recompute_aggregates(g: Graph, assignment: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full edge rescan: (a_tot, w_internal, sizes) indexed by community id."""
    n = g.num_vertices
    owner = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    c_owner = assignment[owner]
    same = c_owner == assignment[g.neighbors]
    is_loop = owner == g.neighbors
    # non-self edges are seen from both ends, self loops once: both give 2w
    contrib = np.where(is_loop, 2.0 * g.weights, g.weights)
    w_internal = np.bincount(c_owner[same], weights=contrib[same], minlength=n)
    a_tot = np.bincount(assignment, weights=g.weighted_degrees, minlength=n)
    sizes = np.bincount(assignment, minlength=n).astype(np.int64)
    return a_tot.astype(np.float64), w_internal.astype(np.float64), sizes


def _require_edges(g: Graph) -> float:
    if g.total_weight <= 0:
        raise EmptyGraphError("modularity undefined for edgeless graph")
    return g.total_weight


def modularity(g: Graph, s: CommunityState) -> float:
    """Q = Σ_C w_internal(C)/2m − Σ_C (a_C/2m)², from the tracked aggregates."""
    two_m = 2.0 * _require_edges(g)
    return float(s.w_internal.sum() / two_m - np.square(s.a_tot / two_m).sum())


def modularity_from_scratch(g: Graph, assignment) -> float:
    """Q by full rescan, ignoring any tracked aggregates."""
    two_m = 2.0 * _require_edges(g)
    a_tot, w_internal, _ = recompute_aggregates(g, np.asarray(assignment, dtype=np.int64))
    return float(w_internal.sum() / two_m - np.square(a_tot / two_m).sum())


def neighbor_weights(g: Graph, s: CommunityState, i: int) -> dict[int, float]:
    """
    e_{i→C} for every neighboring community C, self loops excluded.
    The current community is always present (as e_{i→C(i)∖{i}}).
    """
    e: dict[int, float] = {int(s.assignment[i]): 0.0}
    for j, w in zip(g.neighbors_of(i).tolist(), g.weights_of(i).tolist()):
        if j == i:
            continue
        c = int(s.assignment[j])
        e[c] = e.get(c, 0.0) + w
    return e


def delta_q(g: Graph, s: CommunityState, i: int, target: int, e_i_to: dict[int, float]) -> float:
    """
    ΔQ for moving i into target. Terms for the current community exclude i
    itself, so target = C(i) gives exactly 0.
    """
    m = _require_edges(g)
    current = int(s.assignment[i])
    if target == current:
        return 0.0
    if target not in e_i_to:
        raise InvalidMoveError(f"community {target} is not adjacent to vertex {i}")
    k_i = g.weighted_degrees[i]
    e_stay = e_i_to.get(current, 0.0)
    a_stay = s.a_tot[current] - k_i
    return float((e_i_to[target] - e_stay) / m + 2.0 * k_i * (a_stay - s.a_tot[target]) / (2.0 * m) ** 2)


def apply_move(g: Graph, s: CommunityState, i: int, target: int, e_i_to: dict[int, float]) -> None:
    """Moves i into target, updating aggregates in place."""
    current = int(s.assignment[i])
    if target == current:
        return
    k_i = g.weighted_degrees[i]
    loop = g.self_loops[i]
    s.a_tot[current] -= k_i
    s.a_tot[target] += k_i
    s.w_internal[current] -= 2.0 * (e_i_to.get(current, 0.0) + loop)
    s.w_internal[target] += 2.0 * (e_i_to.get(target, 0.0) + loop)
    s.sizes[current] -= 1
    s.sizes[target] += 1
    s.assignment[i] = target
    if s.sizes[current] == 0:
        # clear rounding residue on emptied communities
        s.a_tot[current] = 0.0
        s.w_internal[current] = 0.0


def joint_gain_oracle(g: Graph, s: CommunityState, i: int, j: int, k_target: int) -> float:
    """
    Net gain when singletons i and j both move into k_target at once:
    ΔQ_i + ΔQ_j + ω(i,j)/m − 2·k_i·k_j/(2m)².
    """
    m = _require_edges(g)
    if i == j:
        raise ValueError("i and j must differ")
    if s.sizes[s.assignment[i]] != 1 or s.sizes[s.assignment[j]] != 1:
        raise ValueError("both vertices must be singletons")
    if k_target in (s.assignment[i], s.assignment[j]):
        raise ValueError("target must differ from both current communities")
    gain_i = delta_q(g, s, i, k_target, neighbor_weights(g, s, i))
    gain_j = delta_q(g, s, j, k_target, neighbor_weights(g, s, j))
    k_i, k_j = g.weighted_degrees[i], g.weighted_degrees[j]
    return float(gain_i + gain_j + g.edge_weight(i, j) / m - 2.0 * k_i * k_j / (2.0 * m) ** 2)


def aggregates_consistent(g: Graph, s: CommunityState, rtol: float = 1e-9) -> bool:
    a_tot, w_internal, sizes = recompute_aggregates(g, s.assignment)
    scale = max(1.0, 2.0 * g.total_weight)
    return (
        np.array_equal(sizes, s.sizes)
        and np.allclose(a_tot, s.a_tot, rtol=rtol, atol=rtol * scale)
        and np.allclose(w_internal, s.w_internal, rtol=rtol, atol=rtol * scale)
    )
