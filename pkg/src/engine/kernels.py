"""
numba kernels for the Louvain sweeps.

Parallel kernels write only to per-vertex output slots. Every fold of those
slots into per-community aggregates runs sequentially in ascending vertex
order, so floating-point results are the same for any thread count.
"""
import numpy as np
from numba import njit, prange


@njit(cache=True)
def best_move(i, offsets, neighbors, weights, k, assignment, labels, a_tot, m):
    """
    Returns (C_new, gain, e_stay, e_new) for vertex i against the given
    state. Candidates are C(i) (gain 0) and the communities of Γ(i);
    higher gain wins, equal gain goes to the smaller label.
    """
    cur = assignment[i]
    start, end = offsets[i], offsets[i + 1]
    comm = np.empty(end - start, dtype=np.int64)
    wts = np.empty(end - start, dtype=np.float64)
    cnt = 0
    for e in range(start, end):
        j = neighbors[e]
        if j == i:
            continue
        comm[cnt] = assignment[j]
        wts[cnt] = weights[e]
        cnt += 1
    if cnt == 0:
        return cur, 0.0, 0.0, 0.0

    order = np.argsort(comm[:cnt], kind="mergesort")
    e_stay = 0.0
    for q in range(cnt):
        if comm[order[q]] == cur:
            e_stay += wts[order[q]]

    k_i = k[i]
    a_stay = a_tot[cur] - k_i
    two_m_sq = (2.0 * m) ** 2
    best = cur
    best_gain = 0.0
    e_best = e_stay
    q = 0
    while q < cnt:
        c = comm[order[q]]
        e_c = 0.0
        while q < cnt and comm[order[q]] == c:
            e_c += wts[order[q]]
            q += 1
        if c == cur:
            continue
        gain = (e_c - e_stay) / m + 2.0 * k_i * (a_stay - a_tot[c]) / two_m_sq
        if gain > best_gain or (gain == best_gain and labels[c] < labels[best]):
            best = c
            best_gain = gain
            e_best = e_c
    return best, best_gain, e_stay, e_best


@njit(parallel=True, cache=True)
def decide_moves(offsets, neighbors, weights, k, assignment, labels, a_tot, sizes, m,
                 vertices, out_target):
    """Target community per vertex of the subset, read from a frozen state."""
    for t in prange(vertices.size):
        i = vertices[t]
        cur = assignment[i]
        best, gain, _, _ = best_move(i, offsets, neighbors, weights, k, assignment, labels, a_tot, m)
        # singlet minimum label guard
        if best != cur and sizes[cur] == 1 and sizes[best] == 1 and labels[best] > labels[cur]:
            best = cur
        if gain > 0.0 and best != cur:
            out_target[t] = best
        else:
            out_target[t] = cur


@njit(cache=True)
def apply_moves(k, moved, targets, assignment, a_tot, sizes):
    for t in range(moved.size):
        i = moved[t]
        old = assignment[i]
        new = targets[t]
        a_tot[old] -= k[i]
        a_tot[new] += k[i]
        sizes[old] -= 1
        sizes[new] += 1
        assignment[i] = new


@njit(parallel=True, cache=True)
def internal_weight_deltas(offsets, neighbors, weights, previous, assignment, moved, is_moved,
                           lose, gain):
    """
    Intra-community weight lost from the old and gained in the new community
    of every moved vertex. An edge between two moved vertices is charged to
    the lower id only.
    """
    for t in prange(moved.size):
        i = moved[t]
        lo = 0.0
        gn = 0.0
        for e in range(offsets[i], offsets[i + 1]):
            j = neighbors[e]
            w = weights[e]
            if j == i:
                lo += 2.0 * w
                gn += 2.0 * w
                continue
            if is_moved[j] and j < i:
                continue
            if previous[i] == previous[j]:
                lo += 2.0 * w
            if assignment[i] == assignment[j]:
                gn += 2.0 * w
        lose[t] = lo
        gain[t] = gn


@njit(cache=True)
def fold_internal_deltas(moved, previous, assignment, lose, gain, w_internal):
    for t in range(moved.size):
        i = moved[t]
        w_internal[previous[i]] -= lose[t]
        w_internal[assignment[i]] += gain[t]


@njit(cache=True)
def serial_sweep(offsets, neighbors, weights, k, loops, assignment, labels, a_tot, w_internal, sizes,
                 m, vertices):
    """Sequential sweep: each decision sees every earlier move of the sweep."""
    moves = 0
    for t in range(vertices.size):
        i = vertices[t]
        cur = assignment[i]
        best, gain, e_stay, e_best = best_move(i, offsets, neighbors, weights, k, assignment, labels,
                                               a_tot, m)
        if gain > 0.0 and best != cur:
            a_tot[cur] -= k[i]
            a_tot[best] += k[i]
            w_internal[cur] -= 2.0 * (e_stay + loops[i])
            w_internal[best] += 2.0 * (e_best + loops[i])
            sizes[cur] -= 1
            sizes[best] += 1
            if sizes[cur] == 0:
                a_tot[cur] = 0.0
                w_internal[cur] = 0.0
            assignment[i] = best
            moves += 1
    return moves
