"""Per-user expertise scores computed from training links only."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import BipartiteGraph

METHODS = ("Activity", "EL", "InvPop", "Gini", "Sim", "Sim2", "Uniform")


@dataclass(frozen=True)
class ExpertiseVector:
    method: str
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("expertise values must be finite and non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def _safe_div(num, den):
    out = np.zeros_like(num, dtype=np.float64)
    np.divide(num, den, out=out, where=den > 0)
    return out


def expertise_activity(graph: BipartiteGraph) -> ExpertiseVector:
    return ExpertiseVector("Activity", graph.user_degree.astype(np.float64))


def expertise_el(graph: BipartiteGraph) -> ExpertiseVector:
    """Mean popularity of the items a user collected (0 for cold users)."""
    pop_sum = graph.user_item @ graph.item_degree.astype(np.float64)
    return ExpertiseVector("EL", _safe_div(pop_sum, graph.user_degree.astype(np.float64)))


def expertise_invpop(graph: BipartiteGraph) -> ExpertiseVector:
    """Sum of inverse popularities of the user's items."""
    inv = _safe_div(np.ones(graph.n_items), graph.item_degree.astype(np.float64))
    return ExpertiseVector("InvPop", graph.user_item @ inv)


def gini_standard(popularities) -> float:
    """Population Gini coefficient; 0 for fewer than two values."""
    p = np.sort(np.asarray(popularities, dtype=np.float64))
    n = len(p)
    total = p.sum()
    if n <= 1 or total == 0:
        return 0.0
    ranks = np.arange(1, n + 1)
    return float(np.sum((2 * ranks - n - 1) * p) / (n * total))


def gini_literal(popularities) -> float:
    """Rank-based formula with competition ranking over ascending popularity.

    Position ``k`` contributes ``((n + 1 - r_k) / (n + 1)) * (c_k / n)`` where
    ``r_k`` is the competition rank of the ``k``-th item and ``c_k`` the number
    of items sharing its popularity; the sum is doubled. Distinct
    popularities always give exactly 1.
    """
    p = np.sort(np.asarray(popularities, dtype=np.float64))
    n = len(p)
    if n <= 1:
        return 0.0
    ranks = np.searchsorted(p, p, side="left") + 1
    counts = np.searchsorted(p, p, side="right") - (ranks - 1)
    return float(2.0 * np.sum(((n + 1 - ranks) / (n + 1)) * (counts / n)))


def expertise_gini(graph: BipartiteGraph, mode="standard") -> ExpertiseVector:
    if mode == "standard":
        fn = gini_standard
    elif mode == "literal":
        fn = gini_literal
    else:
        raise ValueError(f"unknown gini mode {mode!r}")
    pop = graph.item_degree
    vals = np.array([fn(pop[graph.user_items(u)]) for u in range(graph.n_users)])
    return ExpertiseVector("Gini", vals)


def _similarity_sums(graph: BipartiteGraph, weight, block=2048):
    # Co-occurrence counts c_uv come from A @ A.T one row block at a time,
    # which walks each user's items and then each item's users (an inverted
    # index sweep). fsum keeps the total independent of summation order.
    ui = graph.user_item
    ku = graph.user_degree
    out = np.zeros(graph.n_users)
    for start in range(0, graph.n_users, block):
        stop = min(start + block, graph.n_users)
        co = (ui[start:stop] @ graph.item_user).tocsr()
        for r in range(stop - start):
            u = start + r
            lo, hi = co.indptr[r], co.indptr[r + 1]
            others = co.indices[lo:hi]
            counts = co.data[lo:hi]
            keep = others != u
            if not keep.any():
                continue
            terms = weight(counts[keep], float(ku[u]), ku[others[keep]].astype(np.float64))
            out[u] = math.fsum(terms.tolist())
    return out


def expertise_sim(graph: BipartiteGraph) -> ExpertiseVector:
    """Sum over other users of the cosine overlap of item sets."""
    vals = _similarity_sums(graph, lambda c, ku, kv: c / np.sqrt(ku * kv))
    return ExpertiseVector("Sim", vals)


def expertise_sim2(graph: BipartiteGraph) -> ExpertiseVector:
    """Overlap with each other user divided by the squared degree product."""
    vals = _similarity_sums(graph, lambda c, ku, kv: c / (ku * kv) ** 2)
    return ExpertiseVector("Sim2", vals)


def expertise_uniform(graph: BipartiteGraph) -> ExpertiseVector:
    return ExpertiseVector("Uniform", np.ones(graph.n_users))


_EXTRACTORS = {
    "activity": expertise_activity,
    "el": expertise_el,
    "invpop": expertise_invpop,
    "sim": expertise_sim,
    "sim2": expertise_sim2,
    "uniform": expertise_uniform,
}


def canonical_method(name: str) -> str:
    for m in METHODS:
        if m.lower() == str(name).lower():
            return m
    raise ValueError(f"unknown expertise method {name!r}; expected one of {METHODS}")


def compute_expertise(graph: BipartiteGraph, method: str, gini="standard") -> ExpertiseVector:
    method = canonical_method(method)
    if method == "Gini":
        return expertise_gini(graph, gini)
    return _EXTRACTORS[method.lower()](graph)
