"""
Pair-counting agreement between two community assignments.

A pair of vertices is TP when it shares a community in both partitions, FP
when only the candidate puts it together, FN when only the reference does,
and TN otherwise.
"""
import numpy as np

from src.exceptions import OracleLimitError, PartitionMismatchError
from src.models import PartitionComparison

BRUTEFORCE_LIMIT = 2_000


def _comb2(counts: np.ndarray) -> int:
    counts = counts.astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def _ratio(num: int, den: int) -> float:
    return 1.0 if den == 0 else num / den


def _validate(reference, candidate) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(reference, dtype=np.int64).ravel()
    p = np.asarray(candidate, dtype=np.int64).ravel()
    if s.size != p.size:
        raise PartitionMismatchError(f"assignments cover {s.size} and {p.size} vertices")
    if s.size < 2:
        raise PartitionMismatchError("at least two vertices are needed to count pairs")
    return s, p


def align_assignments(reference: dict[int, int], candidate: dict[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Both mappings as arrays ordered by vertex id; the vertex sets must match."""
    if reference.keys() != candidate.keys():
        only_ref = len(reference.keys() - candidate.keys())
        only_cand = len(candidate.keys() - reference.keys())
        raise PartitionMismatchError(f"assignments cover different vertex sets "
                                     f"({only_ref} only in reference, {only_cand} only in candidate)")
    vertices = sorted(reference)
    s = np.fromiter((reference[v] for v in vertices), dtype=np.int64, count=len(vertices))
    p = np.fromiter((candidate[v] for v in vertices), dtype=np.int64, count=len(vertices))
    return s, p


def _from_counts(tp: int, fp: int, fn: int, tn: int) -> PartitionComparison:
    return PartitionComparison(
        tp=tp, fp=fp, fn=fn, tn=tn,
        sp=_ratio(tp, tp + fp),
        se=_ratio(tp, tp + fn),
        oq=_ratio(tp, tp + fp + fn),
        rand=_ratio(tp + tn, tp + fp + fn + tn),
    )


def compare_partitions(reference, candidate) -> PartitionComparison:
    """Contingency-table pair counts; O(n log n)."""
    s, p = _validate(reference, candidate)
    n = s.size
    _, s_codes = np.unique(s, return_inverse=True)
    _, p_codes = np.unique(p, return_inverse=True)
    cells = s_codes.astype(np.int64) * (int(p_codes.max()) + 1) + p_codes
    _, cell_sizes = np.unique(cells, return_counts=True)

    tp = _comb2(cell_sizes)
    same_s = _comb2(np.bincount(s_codes))
    same_p = _comb2(np.bincount(p_codes))
    fn = same_s - tp
    fp = same_p - tp
    tn = n * (n - 1) // 2 - tp - fp - fn
    return _from_counts(tp, fp, fn, tn)


def compare_partitions_bruteforce(reference, candidate) -> PartitionComparison:
    """All-pairs categorisation. Only meant as a test oracle."""
    s, p = _validate(reference, candidate)
    n = s.size
    if n > BRUTEFORCE_LIMIT:
        raise OracleLimitError(f"brute-force comparison limited to {BRUTEFORCE_LIMIT} vertices, got {n}")
    tp = fp = fn = tn = 0
    for i in range(n):
        for j in range(i + 1, n):
            in_s = s[i] == s[j]
            in_p = p[i] == p[j]
            if in_s and in_p:
                tp += 1
            elif in_p:
                fp += 1
            elif in_s:
                fn += 1
            else:
                tn += 1
    return _from_counts(tp, fp, fn, tn)
