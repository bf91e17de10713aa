"""Collapsing vertex groups into meta-vertices."""
import numpy as np
import scipy.sparse as sps
from numba import njit, prange

from src.graph.csr import Graph


@njit(parallel=True, cache=True)
def _contract_rows(offsets, neighbors, weights, member_offsets, members, mapping,
                   bound_offsets, out_tgt, out_w, counts):
    # each meta-vertex owns its output segment; only targets >= itself are kept
    for c in prange(member_offsets.size - 1):
        base = bound_offsets[c]
        k = 0
        for t in range(member_offsets[c], member_offsets[c + 1]):
            i = members[t]
            for e in range(offsets[i], offsets[i + 1]):
                j = neighbors[e]
                d = mapping[j]
                if d < c:
                    continue
                w = weights[e]
                if j == i:
                    w = 2.0 * w
                out_tgt[base + k] = d
                out_w[base + k] = w
                k += 1
        if k == 0:
            counts[c] = 0
            continue

        order = np.argsort(out_tgt[base:base + k], kind="mergesort")
        tmp_t = out_tgt[base:base + k][order]
        tmp_w = out_w[base:base + k][order]
        r = 0
        out_tgt[base] = tmp_t[0]
        out_w[base] = tmp_w[0]
        for q in range(1, k):
            if tmp_t[q] == out_tgt[base + r]:
                out_w[base + r] += tmp_w[q]
            else:
                r += 1
                out_tgt[base + r] = tmp_t[q]
                out_w[base + r] = tmp_w[q]
        counts[c] = r + 1
        # intra weight was collected from both endpoints (loops doubled)
        if out_tgt[base] == c:
            out_w[base] *= 0.5


def contract_graph(g: Graph, mapping: np.ndarray, num_groups: int) -> Graph:
    """
    Collapses every group of vertices (mapping: vertex → group id in
    0..num_groups-1) into one vertex. Intra-group weight, counted once,
    becomes the meta self loop; weights between groups are summed.
    """
    mapping = np.asarray(mapping, dtype=np.int64)
    members = np.argsort(mapping, kind="stable").astype(np.int64)
    member_offsets = np.zeros(num_groups + 1, dtype=np.int64)
    np.cumsum(np.bincount(mapping, minlength=num_groups), out=member_offsets[1:])

    bound_offsets = np.zeros(num_groups + 1, dtype=np.int64)
    np.cumsum(np.bincount(mapping, weights=g.degrees, minlength=num_groups).astype(np.int64),
              out=bound_offsets[1:])
    out_tgt = np.empty(bound_offsets[-1], dtype=np.int64)
    out_w = np.empty(bound_offsets[-1], dtype=np.float64)
    counts = np.zeros(num_groups, dtype=np.int64)

    _contract_rows(g.adjacency_offsets, g.neighbors, g.weights, member_offsets, members, mapping,
                   bound_offsets, out_tgt, out_w, counts)

    row = np.repeat(np.arange(num_groups, dtype=np.int64), counts)
    within = np.arange(row.size, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
    pos = bound_offsets[:-1][row] + within
    col, w = out_tgt[pos], out_w[pos]

    diag = row == col
    off = ~diag
    rows = np.concatenate([row[off], col[off], row[diag]])
    cols = np.concatenate([col[off], row[off], row[diag]])
    vals = np.concatenate([w[off], w[off], w[diag]])
    adj = sps.csr_matrix((vals, (rows, cols)), shape=(num_groups, num_groups))
    return Graph.from_csr(adj, num_edges=int(row.size))
