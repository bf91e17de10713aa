"""One Louvain phase: repeated parallel sweeps until the gain is negligible."""
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np
from loguru import logger

from src.config import RunConfig, settings
from src.engine import kernels
from src.exceptions import ConsistencyCheckError, EmptyGraphError
from src.graph.csr import Graph
from src.heuristics.coloring import Coloring
from src.modularity import CommunityState, modularity, modularity_from_scratch, singleton_state
from src.models import TraceRecord

TraceSink = Callable[[TraceRecord], None]

# |Q_P| below this switches the stop test to an absolute difference
Q_FLOOR = 1e-15


@dataclass
class PhaseResult:
    state: CommunityState
    modularity: float
    iterations: int
    moves: int
    converged: bool


def relative_change(q_new: float, q_old: float) -> float:
    if abs(q_old) < Q_FLOOR:
        return abs(q_new - q_old)
    return abs((q_new - q_old) / q_old)


def run_iteration(g: Graph, s: CommunityState, vertices: np.ndarray) -> tuple[CommunityState, int]:
    """
    Decides a target for every vertex of the subset against the state as it
    stands on entry, then applies all moves and updates the aggregates.
    """
    vertices = np.ascontiguousarray(vertices, dtype=np.int64)
    if vertices.size == 0:
        return s, 0
    m = float(g.total_weight)
    targets = np.empty(vertices.size, dtype=np.int64)
    kernels.decide_moves(g.adjacency_offsets, g.neighbors, g.weights, g.weighted_degrees,
                         s.assignment, s.labels, s.a_tot, s.sizes, m, vertices, targets)

    changed = targets != s.assignment[vertices]
    moved = vertices[changed]
    if moved.size == 0:
        return s, 0
    previous = s.assignment.copy()
    kernels.apply_moves(g.weighted_degrees, moved, targets[changed], s.assignment, s.a_tot, s.sizes)

    is_moved = np.zeros(g.num_vertices, dtype=np.bool_)
    is_moved[moved] = True
    lose = np.empty(moved.size, dtype=np.float64)
    gain = np.empty(moved.size, dtype=np.float64)
    kernels.internal_weight_deltas(g.adjacency_offsets, g.neighbors, g.weights, previous, s.assignment,
                                   moved, is_moved, lose, gain)
    kernels.fold_internal_deltas(moved, previous, s.assignment, lose, gain, s.w_internal)

    emptied = s.sizes == 0
    s.a_tot[emptied] = 0.0
    s.w_internal[emptied] = 0.0
    return s, int(moved.size)


def run_serial_iteration(g: Graph, s: CommunityState) -> tuple[CommunityState, int]:
    """Reference sweep in ascending vertex order with immediate updates."""
    vertices = np.arange(g.num_vertices, dtype=np.int64)
    moves = kernels.serial_sweep(g.adjacency_offsets, g.neighbors, g.weights, g.weighted_degrees,
                                 g.self_loops, s.assignment, s.labels, s.a_tot, s.w_internal, s.sizes,
                                 float(g.total_weight), vertices)
    return s, int(moves)


def run_phase(g: Graph, cfg: RunConfig, coloring: Coloring | None = None,
              trace: TraceSink | None = None, phase: int = 1) -> PhaseResult:
    """
    Iterates from the singleton state. With a coloring, one iteration is one
    stage per color class in ascending color order and θ = theta_color;
    otherwise one sweep of all vertices and θ = theta_final.
    """
    if g.total_weight <= 0:
        raise EmptyGraphError("modularity undefined for edgeless graph")
    serial = cfg.sweep == "serial"
    theta = cfg.theta_color if coloring is not None else cfg.theta_final
    if coloring is not None and not serial:
        stages = coloring.classes
    else:
        stages = [np.arange(g.num_vertices, dtype=np.int64)]

    s = singleton_state(g)
    q_prev = -math.inf
    q_cur = modularity(g, s)
    total_moves = 0
    converged = False
    iteration = 0
    while iteration < cfg.max_iterations_per_phase:
        iteration += 1
        start = time.perf_counter()
        if serial:
            _, moves = run_serial_iteration(g, s)
        else:
            moves = 0
            for vertices in stages:
                _, stage_moves = run_iteration(g, s, vertices)
                moves += stage_moves
        q_cur = modularity(g, s)
        millis = (time.perf_counter() - start) * 1000.0
        total_moves += moves

        if settings.debug_checks:
            q_check = modularity_from_scratch(g, s.assignment)
            if abs(q_check - q_cur) > 1e-9 * max(1.0, abs(q_check)):
                raise ConsistencyCheckError(f"phase {phase} iteration {iteration}: tracked Q {q_cur} "
                                            f"drifted from recomputed {q_check}")
        if trace is not None:
            trace(TraceRecord(phase=phase, iteration=iteration, stage="clustering",
                              modularity=q_cur, moves=moves, millis=millis))
        logger.debug(f"phase {phase} iteration {iteration}: Q={q_cur:.6f} moves={moves}")

        if moves == 0:
            converged = True
            break
        if q_prev != -math.inf and relative_change(q_cur, q_prev) < theta:
            converged = True
            break
        q_prev = q_cur

    if not converged:
        logger.warning(f"Phase {phase} stopped at the iteration cap ({cfg.max_iterations_per_phase})")
    return PhaseResult(state=s, modularity=q_cur, iterations=iteration, moves=total_moves,
                       converged=converged)
