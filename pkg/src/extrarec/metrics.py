"""Accuracy and diversity metrics for top-K recommendation lists.

Lists are passed as ``{user: sequence of item indices}`` mappings (or any
iterable of ``(user, items)`` pairs) and the probe set as
``{user: set of item indices}``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from itertools import combinations

import numpy as np


@dataclass
class EvalReport:
    K: int
    evaluatedUsers: int
    precisionAtK: float
    recallAtK: float
    f1AtK: float
    coverageAtK: int
    intraDAtK: float | None = None
    hammingAtK: float | None = None
    hammingStdErr: float | None = None
    empty: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _items(lists):
    return lists.items() if hasattr(lists, "items") else lists


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def precision_recall_f1(lists, probe, K: int):
    """Average per-user precision (hits/K) and recall, then F1 of the averages.

    Users without probe items are skipped. Returns ``None`` when no user is
    evaluable.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    precisions, recalls = [], []
    for user, items in _items(lists):
        relevant = probe.get(user)
        if not relevant:
            continue
        hits = len(set(list(items)[:K]) & relevant)
        precisions.append(hits / K)
        recalls.append(hits / len(relevant))
    if not precisions:
        return None
    p = float(np.mean(precisions))
    r = float(np.mean(recalls))
    return p, r, f1_score(p, r)


def coverage(lists, K: int | None = None) -> int:
    """Number of distinct items across all lists (Diversity-in-top-K)."""
    seen = set()
    for _, items in _items(lists):
        seen.update(list(items)[:K] if K else items)
    return len(seen)


def intra_similarity(items, graph) -> float:
    """Mean cosine over ordered pairs of distinct items in one list."""
    items = list(items)
    n = len(items)
    if n < 2:
        raise ValueError("intra-similarity needs at least 2 items")
    sim = graph.item_cosine_block(items)
    return float((sim.sum() - np.trace(sim)) / (n * (n - 1)))


def intra_diversity(lists, graph, K: int) -> float:
    """One minus the mean intra-list similarity over users."""
    if K < 2:
        raise ValueError("intra-diversity needs K >= 2")
    vals = [intra_similarity(list(items)[:K], graph) for _, items in _items(lists)
            if len(list(items)[:K]) >= 2]
    if not vals:
        raise ValueError("no list with at least 2 items")
    return 1.0 - float(np.mean(vals))


def hamming_diversity(lists, K: int) -> float:
    """Mean of ``1 - q_uv / K`` over all unordered user pairs.

    Uses the identity ``sum_{u<v} q_uv = sum_i c_i (c_i - 1) / 2`` where
    ``c_i`` counts the lists containing item ``i``, so the cost is linear in
    the total list length.
    """
    tops = [list(items)[:K] for _, items in _items(lists)]
    n = len(tops)
    if n < 2:
        raise ValueError("Hamming diversity needs at least 2 users")
    counts = Counter(i for items in tops for i in items)
    shared = sum(c * (c - 1) // 2 for c in counts.values())
    pairs = n * (n - 1) // 2
    return 1.0 - shared / (K * pairs)


def hamming_diversity_naive(lists, K: int) -> float:
    tops = [set(list(items)[:K]) for _, items in _items(lists)]
    vals = [1.0 - len(a & b) / K for a, b in combinations(tops, 2)]
    return float(np.mean(vals))


def hamming_diversity_sampled(lists, K: int, n_pairs=100_000, seed=0):
    """Estimate HD@K from random distinct user pairs; returns ``(mean, stderr)``."""
    tops = [set(list(items)[:K]) for _, items in _items(lists)]
    n = len(tops)
    if n < 2:
        raise ValueError("Hamming diversity needs at least 2 users")
    rng = np.random.Generator(np.random.PCG64(seed))
    a = rng.integers(0, n, size=n_pairs)
    b = rng.integers(0, n - 1, size=n_pairs)
    b = np.where(b >= a, b + 1, b)
    vals = np.fromiter((1.0 - len(tops[x] & tops[y]) / K for x, y in zip(a, b)),
                       dtype=np.float64, count=n_pairs)
    stderr = float(vals.std(ddof=1) / math.sqrt(n_pairs)) if n_pairs > 1 else float("nan")
    return float(vals.mean()), stderr


def evaluate(lists, probe, graph, K: int, hd="exact", hd_pairs=100_000, hd_seed=0) -> EvalReport:
    """Full metric bundle over the users present in ``lists``.

    ``lists`` should already be restricted to the evaluated users (at least
    one training and one probe item).
    """
    lists = {u: list(items)[:K] for u, items in _items(lists)}
    acc = precision_recall_f1(lists, probe, K)
    if acc is None:
        return EvalReport(K, 0, 0.0, 0.0, 0.0, 0, empty=True)
    p, r, f1 = acc
    report = EvalReport(
        K=K,
        evaluatedUsers=sum(1 for u in lists if probe.get(u)),
        precisionAtK=p,
        recallAtK=r,
        f1AtK=f1,
        coverageAtK=coverage(lists),
    )
    if K >= 2:
        report.intraDAtK = intra_diversity(lists, graph, K)
    if len(lists) >= 2:
        if hd == "exact":
            report.hammingAtK = hamming_diversity(lists, K)
        elif hd == "sampled":
            report.hammingAtK, report.hammingStdErr = hamming_diversity_sampled(
                lists, K, hd_pairs, hd_seed)
        else:
            raise ValueError(f"unknown hd mode {hd!r}")
    return report
