import time
import warnings

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.config import RunConfig, settings
from src.engine.phase import relative_change, run_iteration, run_phase
from src.engine.rebuild import rebuild, renumber_communities
from src.exceptions import ConsistencyCheckError, EmptyGraphError
from src.graph import generators
from src.graph.csr import Graph
from src.graph.loaders import load_graph
from src.heuristics.coloring import color_graph
from src.heuristics.vertex_following import vf_compact
from src.modularity import modularity, modularity_from_scratch, singleton_state, state_from_assignment
from src.orchestrator import run
from src.reporting import TraceCollector, write_assignment

VARIANTS = {
    "baseline": dict(use_vf=False, use_coloring=False),
    "vf": dict(use_vf=True, use_coloring=False),
    # cutoff 0 so small graphs are colored too
    "color": dict(use_vf=False, use_coloring=True, color_cutoff=0),
    "vf+color": dict(use_vf=True, use_coloring=True, color_cutoff=0),
}


def _same_partition(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    pairs = np.unique(np.stack([a, b]), axis=1)
    return pairs.shape[1] == np.unique(a).size == np.unique(b).size


# --- run_iteration ---------------------------------------------------------

def test_k2_no_swap():
    g = generators.complete_graph(2)
    s, moves = run_iteration(g, singleton_state(g), np.arange(2))
    assert moves == 1
    assert_array_equal(s.assignment, [0, 0])


def test_k4_collapses_to_minimum_label(k4):
    s, moves = run_iteration(k4, singleton_state(k4), np.arange(4))
    assert moves == 3
    assert_array_equal(s.assignment, [0, 0, 0, 0])
    assert modularity(k4, s) == 0.0


def test_fixpoint_makes_no_moves(triangles, baseline_config):
    result = run_phase(triangles, baseline_config)
    before = result.state.copy()
    s, moves = run_iteration(triangles, result.state, np.arange(6))
    assert moves == 0
    assert_array_equal(s.assignment, before.assignment)
    assert_array_equal(s.a_tot, before.a_tot)


def test_first_sweep_on_two_triangles(triangles):
    s, moves = run_iteration(triangles, singleton_state(triangles), np.arange(6))
    assert moves == 3
    assert_array_equal(s.assignment, [0, 0, 0, 3, 4, 4])


def test_incremental_aggregates_match_rescan(rng):
    for _ in range(20):
        g = generators.random_weighted_graph(100, 400, rng)
        s = singleton_state(g)
        for _ in range(5):
            s, _ = run_iteration(g, s, np.arange(g.num_vertices))
            assert modularity(g, s) == pytest.approx(modularity_from_scratch(g, s.assignment), rel=1e-9)


# --- run_phase -------------------------------------------------------------

def test_phase_k4(k4, baseline_config):
    result = run_phase(k4, baseline_config)
    assert_array_equal(result.state.assignment, [0, 0, 0, 0])
    assert result.modularity == 0.0
    assert result.converged


def test_phase_two_triangles_trace(triangles, baseline_config):
    trace = TraceCollector()
    result = run_phase(triangles, baseline_config, trace=trace)
    assert result.modularity == pytest.approx(5 / 14, abs=1e-12)
    assert _same_partition(result.state.assignment, [0, 0, 0, 1, 1, 1])
    assert [r.moves for r in trace] == [3, 1, 0]
    assert [r.iteration for r in trace] == [1, 2, 3]
    assert {r.stage for r in trace} == {"clustering"}
    assert trace[0].modularity == pytest.approx(0.193878, abs=1e-6)


def test_phase_with_only_self_loops():
    compacted = vf_compact(generators.star_graph(3)).graph
    result = run_phase(compacted, RunConfig())
    assert result.iterations == 1
    assert result.moves == 0


def test_phase_rejects_edgeless_graph(baseline_config):
    with pytest.raises(EmptyGraphError):
        run_phase(Graph.from_edges(2, [], []), baseline_config)


def test_disjoint_pairs_converge_without_oscillation(baseline_config):
    g = generators.from_edge_pairs([(0, 1), (2, 3), (4, 5)])
    trace = TraceCollector()
    result = run_phase(g, baseline_config, trace=trace)
    assert result.iterations <= 2
    assert_array_equal(result.state.assignment, [0, 0, 2, 2, 4, 4])
    assert trace[-1].moves == 0


def test_colored_phase_uses_color_threshold(triangles):
    # the second sweep changes Q by ~84%, below 0.9, so a colored phase stops there
    cfg = RunConfig(theta_final=1e-6, theta_color=0.9)
    colored = run_phase(triangles, cfg, coloring=color_graph(triangles))
    uncolored = run_phase(triangles, cfg)
    assert colored.iterations == 2
    assert uncolored.iterations == 3
    assert colored.modularity == pytest.approx(5 / 14, abs=1e-12)


def test_iteration_cap_flags_non_convergence(triangles, log_messages):
    result = run_phase(triangles, RunConfig(max_iterations_per_phase=1, use_vf=False, use_coloring=False))
    assert not result.converged
    assert result.iterations == 1
    assert any("iteration cap" in m for m in log_messages)


def test_serial_sweep_reaches_two_triangles(triangles):
    result = run_phase(triangles, RunConfig(sweep="serial"))
    assert result.modularity == pytest.approx(5 / 14, abs=1e-12)
    assert _same_partition(result.state.assignment, [0, 0, 0, 1, 1, 1])


def test_debug_checks_hold_over_full_runs(rng, monkeypatch):
    monkeypatch.setattr(settings, "debug_checks", True)
    for _ in range(50):
        g = generators.random_weighted_graph(int(rng.integers(10, 200)), int(rng.integers(20, 600)), rng)
        trace = TraceCollector()
        run(g, RunConfig(color_cutoff=0), trace)
        assert all(np.isfinite(r.modularity) and r.millis >= 0 for r in trace)


def test_debug_checks_raise_on_drift(triangles, baseline_config, monkeypatch):
    monkeypatch.setattr(settings, "debug_checks", True)
    monkeypatch.setattr("src.engine.phase.modularity_from_scratch", lambda g, assignment: 0.5)
    with pytest.raises(ConsistencyCheckError, match="drifted"):
        run_phase(triangles, baseline_config)


def test_relative_change_floor():
    assert relative_change(0.5, 0.25) == pytest.approx(1.0)
    assert relative_change(1e-3, 0.0) == pytest.approx(1e-3)


# --- rebuild ---------------------------------------------------------------

def test_rebuild_triangle():
    tri = generators.complete_graph(3)
    s = state_from_assignment(tri, [0, 0, 2])
    rebuilt, community_map = rebuild(tri, s)
    assert_array_equal(community_map, [0, -1, 1])
    assert rebuilt.num_vertices == 2
    assert rebuilt.edge_weight(0, 0) == 1.0
    assert rebuilt.edge_weight(1, 1) == 0.0
    assert rebuilt.edge_weight(0, 1) == 2.0
    assert modularity(tri, s) == pytest.approx(-2 / 9, abs=1e-15)
    assert modularity(rebuilt, singleton_state(rebuilt)) == pytest.approx(-2 / 9, abs=1e-12)


def test_rebuild_of_singletons_is_identity(rng):
    g = generators.random_weighted_graph(50, 200, rng)
    rebuilt, community_map = rebuild(g, singleton_state(g))
    assert_array_equal(community_map, np.arange(50))
    assert rebuilt.same_as(g)


def test_rebuild_two_triangles(triangles):
    rebuilt, _ = rebuild(triangles, state_from_assignment(triangles, [0, 0, 0, 3, 3, 3]))
    assert rebuilt.edge_weight(0, 0) == 3.0
    assert rebuilt.edge_weight(1, 1) == 3.0
    assert rebuilt.edge_weight(0, 1) == 1.0
    assert modularity(rebuilt, singleton_state(rebuilt)) == pytest.approx(5 / 14, abs=1e-12)


def test_renumbering_follows_labels(triangles):
    s = state_from_assignment(triangles, [5, 5, 5, 1, 1, 1])
    community_map, count = renumber_communities(s)
    assert count == 2
    assert community_map[1] == 0
    assert community_map[5] == 1


def test_rebuild_preserves_modularity(rng):
    start = time.perf_counter()
    for _ in range(200):
        n = int(rng.integers(2, 300))
        g = generators.random_weighted_graph(n, int(rng.integers(1, 4 * n)), rng)
        s = state_from_assignment(g, rng.integers(0, int(rng.integers(1, n + 1)), size=n))
        rebuilt, _ = rebuild(g, s)
        assert rebuilt.total_weight == pytest.approx(g.total_weight, rel=1e-12)
        assert rebuilt.num_edges <= g.num_edges
        assert modularity(rebuilt, singleton_state(rebuilt)) == pytest.approx(modularity(g, s), abs=1e-12)
    assert time.perf_counter() - start < 30.0


# --- run -------------------------------------------------------------------

@pytest.mark.parametrize("variant", VARIANTS)
def test_run_k4(k4, variant):
    result = run(k4, RunConfig(**VARIANTS[variant]))
    assert result.modularity == 0.0
    assert_array_equal(result.assignment, [0, 0, 0, 0])


@pytest.mark.parametrize("variant", VARIANTS)
def test_run_two_triangles(triangles, variant):
    result = run(triangles, RunConfig(**VARIANTS[variant]))
    assert result.modularity == pytest.approx(5 / 14, abs=1e-12)
    assert _same_partition(result.assignment, [0, 0, 0, 1, 1, 1])


def test_run_k4_counts_one_moving_phase(k4):
    result = run(k4, RunConfig(use_vf=False, use_coloring=False))
    assert result.phases == 1
    assert result.converged
    assert result.summary_line().startswith("0.0,1,")


def test_run_star_needs_no_phase():
    result = run(generators.star_graph(3), RunConfig())
    assert result.phases == 0
    assert result.modularity == 0.0
    assert_array_equal(result.assignment, [0, 0, 0, 0])


def test_run_rejects_edgeless_graph():
    with pytest.raises(EmptyGraphError, match="modularity undefined for edgeless graph"):
        run(Graph.from_edges(3, [], []), RunConfig())


def test_karate_floor(karate):
    run(karate, RunConfig())  # compile kernels first
    start = time.perf_counter()
    result = run(karate, RunConfig())
    assert result.modularity >= 0.40
    assert time.perf_counter() - start < 1.0


def test_summary_breakdown_lists_every_stage(karate):
    result = run(karate, RunConfig(color_cutoff=0))
    stages = [part.split("=")[0] for part in result.stage_breakdown.split(";")]
    assert stages == ["vf", "coloring", "clustering", "rebuild"]
    assert len(result.summary_line().split(",")) == 5


def test_phase_modularity_is_monotone(rng):
    for _ in range(20):
        g = generators.planted_partition(8, 25, 8.0, 1.5, rng)
        for variant in VARIANTS.values():
            result = run(g, RunConfig(**variant))
            q = result.phase_modularities
            assert all(b >= a for a, b in zip(q, q[1:]))
            assert result.modularity == pytest.approx(q[-1] if q else result.modularity, abs=1e-9)


def test_flattening_is_total_and_dense(rng):
    for _ in range(20):
        g = generators.random_graph(150, 400, rng, max_weight=3)
        if g.total_weight == 0:
            continue
        result = run(g, RunConfig(color_cutoff=0))
        assignment = result.assignment
        assert assignment.shape == (g.num_vertices,)
        assert_array_equal(np.unique(assignment), np.arange(assignment.max() + 1))
        for depth in range(len(result.hierarchy.levels) + 1):
            assert result.hierarchy.flatten(depth).shape == (g.num_vertices,)


def test_vf_followers_end_with_their_neighbor(rng):
    for _ in range(20):
        g = generators.random_graph(100, 120, rng)
        result = run(g, RunConfig(use_vf=True, use_coloring=False))
        for i in np.flatnonzero(g.degrees == 1):
            j = g.neighbors_of(i)[0]
            assert result.assignment[i] == result.assignment[j]


def test_coloring_marks_a_prefix_of_phases(karate):
    trace = TraceCollector()
    run(karate, RunConfig(color_cutoff=0, theta_color=1e-2), trace)
    phases = sorted({r.phase for r in trace if r.stage == "clustering"})
    colored = [p for p in phases if "coloring" in trace.stages(p)]
    assert colored == phases[:len(colored)]
    assert colored[:1] == [1]


def test_first_phase_policy_colors_once(karate):
    trace = TraceCollector()
    run(karate, RunConfig(color_cutoff=0, theta_color=1e-4, color_policy="first_phase"), trace)
    assert sorted({r.phase for r in trace if r.stage == "coloring"}) == [1]



def test_color_histograms_follow_colored_phases(karate, triangles):
    trace = TraceCollector()
    result = run(karate, RunConfig(color_cutoff=0, theta_color=1e-4, color_policy="first_phase"), trace)
    assert list(result.color_histograms) == [1]
    assert result.color_histograms[1].sum() == result.hierarchy.vf.graph.num_vertices
    assert result.color_histograms[1].size == next(r.moves for r in trace if r.stage == "coloring")

    colored = run(triangles, RunConfig(use_vf=False, color_cutoff=0))
    assert_array_equal(colored.color_histograms[1], [2, 2, 2])
    assert run(triangles, RunConfig(use_coloring=False)).color_histograms == {}


def test_color_cutoff_disables_coloring(karate):
    trace = TraceCollector()
    run(karate, RunConfig(color_cutoff=35), trace)
    assert not any(r.stage == "coloring" for r in trace)


def test_color_threshold_barely_moves_quality(data_dir):
    for name in ("k4.el", "two_triangles.el", "star.el", "path3.el", "karate.el"):
        g = load_graph(data_dir / name)
        fine = run(g, RunConfig(color_cutoff=0, theta_color=1e-4)).modularity
        coarse = run(g, RunConfig(color_cutoff=0, theta_color=1e-2)).modularity
        assert coarse >= fine - 0.02


@pytest.mark.parametrize("coloring", [False, True])
def test_deterministic_across_workers(rng, tmp_path, coloring):
    g = generators.planted_partition(20, 100, 10.0, 2.0, rng)
    outputs = []
    for workers in (1, 2, 8):
        result = run(g, RunConfig(use_coloring=coloring, color_cutoff=0, worker_count=workers))
        path = write_assignment(result.assignment, tmp_path / f"w{workers}.txt")
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


@pytest.mark.slow
@pytest.mark.parametrize("coloring", [False, True])
def test_deterministic_on_100k_edges(rng, tmp_path, coloring):
    # 200 planted groups of 100, about 95k intra and 10k inter edges after merging
    g = generators.planted_partition(200, 100, 10.0, 1.0, rng)
    assert g.num_edges >= 100_000
    outputs = []
    for workers in (1, 2, 8):
        result = run(g, RunConfig(use_coloring=coloring, color_cutoff=0, worker_count=workers,
                                  max_iterations_per_phase=500))
        assert result.converged
        outputs.append(write_assignment(result.assignment, tmp_path / f"w{workers}.txt").read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


@pytest.mark.slow
def test_scaling_direction(rng):
    g = generators.random_geometric(200_000, 0.0045, rng)
    assert g.num_edges >= 1_000_000
    cfg1 = RunConfig(worker_count=1, color_cutoff=0)
    cfg4 = RunConfig(worker_count=4, color_cutoff=0)
    run(generators.karate_club(), cfg4)  # compile kernels first

    start = time.perf_counter()
    run(g, cfg1)
    serial = time.perf_counter() - start
    start = time.perf_counter()
    run(g, cfg4)
    parallel = time.perf_counter() - start
    if parallel > 0.75 * serial:
        warnings.warn(f"4 workers took {parallel:.2f}s against {serial:.2f}s for 1 worker")
