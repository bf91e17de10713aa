from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from src.config import RunConfig
from src.engine.phase import TraceSink, relative_change, run_phase
from src.engine.rebuild import rebuild, renumber_communities
from src.exceptions import EmptyGraphError
from src.graph.csr import Graph
from src.heuristics.coloring import color_graph
from src.heuristics.vertex_following import VfMapping, vf_compact, vf_rule_violations
from src.modularity import modularity, modularity_from_scratch, singleton_state
from src.models import TraceRecord
from src.utils import StageTimer, worker_scope


@dataclass
class Hierarchy:
    """
    levels[p] maps the vertices of phase p's input graph to the vertices of
    phase p+1's input graph (its dense community ids).
    """
    num_original: int
    levels: list[np.ndarray] = field(default_factory=list)
    vf: VfMapping | None = None

    def flatten(self, depth: int | None = None) -> np.ndarray:
        """Community of every original vertex after the first `depth` levels."""
        assignment = self.vf.mapping.copy() if self.vf is not None else np.arange(self.num_original, dtype=np.int64)
        for level in self.levels[:depth]:
            assignment = level[assignment]
        return assignment

    @property
    def assignment(self) -> np.ndarray:
        return self.flatten()


@dataclass
class RunResult:
    hierarchy: Hierarchy
    modularity: float
    phases: int
    iterations: int
    seconds: float
    stage_breakdown: str
    converged: bool
    phase_modularities: list[float] = field(default_factory=list)
    # phase -> color-class sizes, for colored phases only
    color_histograms: dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def assignment(self) -> np.ndarray:
        return self.hierarchy.assignment

    def summary_line(self) -> str:
        return f"{self.modularity!r},{self.phases},{self.iterations},{self.seconds:.6f},{self.stage_breakdown}"


def _emit(trace: TraceSink | None, record: TraceRecord) -> None:
    if trace is not None:
        trace(record)


def run(g: Graph, cfg: RunConfig, trace: TraceSink | None = None) -> RunResult:
    """
    Multi-phase driver:
    1. VF preprocessing (optional, once).
    2. Coloring of each phase input while coloring stays active.
    3. Phases, each followed by graph rebuilding.
    """
    if g.total_weight <= 0:
        raise EmptyGraphError("modularity undefined for edgeless graph")

    timer = StageTimer()
    hierarchy = Hierarchy(num_original=g.num_vertices)
    current = g

    with worker_scope(cfg.worker_count):
        # ---------------------------------------------------------
        # STEP 1: VERTEX FOLLOWING
        # ---------------------------------------------------------
        if cfg.use_vf:
            with timer.stage("vf") as clock:
                hierarchy.vf = vf_compact(g)
            current = hierarchy.vf.graph
            _emit(trace, TraceRecord(phase=0, iteration=0, stage="vf",
                                     modularity=modularity(current, singleton_state(current)),
                                     moves=hierarchy.vf.merged_count, millis=clock["elapsed"] * 1000.0))

        coloring_active = cfg.use_coloring and cfg.sweep == "parallel"
        phase_q: list[float] = []
        color_histograms: dict[int, np.ndarray] = {}
        last_gain: float | None = None
        start_q = modularity(current, singleton_state(current))
        moving_phases = 0
        iterations = 0
        converged = True

        for phase in range(1, cfg.max_phases + 1):
            # ---------------------------------------------------------
            # STEP 2: COLORING
            # ---------------------------------------------------------
            if coloring_active:
                gain_ok = last_gain is None or last_gain >= cfg.theta_color
                coloring_active = (
                    current.num_vertices >= cfg.color_cutoff
                    and gain_ok
                    and (cfg.color_policy == "multi_phase" or phase == 1)
                )
            coloring = None
            if coloring_active:
                with timer.stage("coloring") as clock:
                    coloring = color_graph(current)
                color_histograms[phase] = coloring.class_sizes
                logger.info(f"Phase {phase}: {coloring.num_colors} colors, class size RSD "
                            f"{coloring.class_size_rsd:.3f}")
                _emit(trace, TraceRecord(phase=phase, iteration=0, stage="coloring", modularity=start_q,
                                         moves=coloring.num_colors, millis=clock["elapsed"] * 1000.0))

            # ---------------------------------------------------------
            # STEP 3: PHASE
            # ---------------------------------------------------------
            logger.info(f"--- PHASE {phase}: n={current.num_vertices} M={current.num_edges} "
                        f"{'colored' if coloring is not None else 'uncolored'} ---")
            with timer.stage("clustering"):
                result = run_phase(current, cfg, coloring, trace, phase=phase)
            iterations += result.iterations
            converged = converged and result.converged

            if result.moves == 0:
                break
            if result.modularity < start_q:
                # a phase never lowers Q; drop it and keep the previous level
                logger.warning(f"Phase {phase} ended below its starting modularity "
                               f"({result.modularity:.6g} < {start_q:.6g}); discarding it")
                break

            moving_phases += 1
            phase_q.append(result.modularity)
            last_gain = relative_change(result.modularity, start_q)
            small_gain = last_gain < cfg.theta_final

            # ---------------------------------------------------------
            # STEP 4: GRAPH REBUILDING
            # ---------------------------------------------------------
            if small_gain or phase == cfg.max_phases:
                community_map, _ = renumber_communities(result.state)
                hierarchy.levels.append(community_map[result.state.assignment])
                break
            with timer.stage("rebuild") as clock:
                rebuilt, community_map = rebuild(current, result.state)
            hierarchy.levels.append(community_map[result.state.assignment])
            _emit(trace, TraceRecord(phase=phase, iteration=0, stage="rebuild", modularity=result.modularity,
                                     moves=rebuilt.num_vertices, millis=clock["elapsed"] * 1000.0))
            current = rebuilt
            start_q = result.modularity

    assignment = hierarchy.assignment
    final_q = modularity_from_scratch(g, assignment)
    if not cfg.use_vf:
        violations = vf_rule_violations(g, assignment)
        if violations.size:
            logger.warning(f"{violations.size} single-degree vertices ended apart from their neighbor")

    logger.success(f"Finished: Q={final_q:.6f} after {moving_phases} phases, {iterations} iterations, "
                   f"{np.unique(assignment).size} communities")
    return RunResult(
        hierarchy=hierarchy,
        modularity=final_q,
        phases=moving_phases,
        iterations=iterations,
        seconds=timer.total,
        stage_breakdown=timer.breakdown(),
        converged=converged,
        phase_modularities=phase_q,
        color_histograms=color_histograms,
    )
