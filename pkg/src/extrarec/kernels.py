"""Two-step resource diffusion kernels and top-K ranking.

Every kernel shares the same pipeline, applied to a batch of target users
with binary profile rows ``P`` (targets x items)::

    user_resource = P @ step1                # items -> users, (targets, users)
    user_resource *= user_scale              # per-user spreading factor
    scores = user_resource @ A               # users -> items
    scores *= receiver_scale                 # per-item receiving factor

``step1`` is an ``(items, users)`` sparse matrix holding the share each user
takes from each item. Only the target rows are ever materialised; no
item-item transfer matrix is built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .expertise import ExpertiseVector
from .graph import BipartiteGraph

KERNELS = ("MD", "ExTrA", "HC", "HHP", "BHC")
MODES = ("userDegree", "literalEq3")


@dataclass(frozen=True)
class KernelSpec:
    method: str
    lam: float = 1.0
    expertise: str | None = None
    mode: str = "userDegree"

    def __post_init__(self):
        if self.method not in KERNELS:
            raise ValueError(f"unknown kernel {self.method!r}; expected one of {KERNELS}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.method == "ExTrA" and self.expertise is None:
            raise ValueError("ExTrA requires an expertise method")
        if self.method != "ExTrA" and self.expertise is not None:
            raise ValueError(f"{self.method} takes no expertise method")

    @property
    def uses_lambda(self) -> bool:
        return self.method in ("ExTrA", "HHP", "BHC")

    @property
    def name(self) -> str:
        """Display name: ``MD``, ``HHP``, ``MDSim2`` and so on."""
        if self.method == "ExTrA":
            return "MD" + self.expertise
        return self.method


def parse_method(name: str, lam: float = 1.0, mode: str = "userDegree") -> KernelSpec:
    """Build a spec from a display name such as ``MD``, ``HHP`` or ``MDSim2``."""
    from .expertise import canonical_method

    upper = str(name).upper()
    for base in ("MD", "HC", "HHP", "BHC"):
        if upper == base:
            return KernelSpec(base, lam if base in ("HHP", "BHC") else 1.0)
    if upper.startswith("MD"):
        return KernelSpec("ExTrA", lam, canonical_method(name[2:]), mode)
    raise ValueError(f"unknown method {name!r}")


def _inv_pow(deg, power):
    # deg**-power with 0 for zero-degree nodes (they never carry resource)
    out = np.zeros(len(deg))
    nz = deg > 0
    out[nz] = deg[nz].astype(np.float64) ** (-power)
    return out


def extra_shares(graph: BipartiteGraph, e, lam: float) -> sp.csr_matrix:
    """``(items, users)`` matrix of shares ``(e(u) / sum_{v in G(j)} e(v))**lam``.

    Items whose neighbours all have zero expertise fall back to ``1 / k_j``.
    """
    e = np.asarray(getattr(e, "values", e), dtype=np.float64)
    iu = graph.item_user
    rows = np.repeat(np.arange(graph.n_items), np.diff(iu.indptr))
    eu = e[iu.indices]
    totals = np.bincount(rows, weights=eu, minlength=graph.n_items)
    denom = totals[rows]
    ratio = np.zeros_like(eu)
    np.divide(eu, denom, out=ratio, where=denom > 0)
    shares = np.power(ratio, lam)
    dead = denom <= 0
    if dead.any():
        shares[dead] = 1.0 / graph.item_degree[rows[dead]]
    return sp.csr_matrix((shares, iu.indices.copy(), iu.indptr.copy()), shape=iu.shape)


class Diffuser:
    """Precomputed pipeline pieces for one (graph, kernel) pair."""

    def __init__(self, graph: BipartiteGraph, spec: KernelSpec, expertise=None):
        if spec.method == "ExTrA":
            if expertise is None:
                raise ValueError("ExTrA requires an expertise vector")
            if len(expertise) != graph.n_users:
                raise ValueError("expertise length does not match user count")
        self.graph = graph
        self.spec = spec
        ki = graph.item_degree
        ku = graph.user_degree
        iu = graph.item_user
        lam = spec.lam
        user_scale = _inv_pow(ku, 1.0)
        receiver = None
        if spec.method == "MD":
            step1 = sp.diags(_inv_pow(ki, 1.0)) @ iu
        elif spec.method == "HC":
            step1 = iu
            receiver = _inv_pow(ki, 1.0)
        elif spec.method == "HHP":
            step1 = sp.diags(_inv_pow(ki, lam)) @ iu
            receiver = _inv_pow(ki, 1.0 - lam)
        elif spec.method == "BHC":
            step1 = iu
            receiver = _inv_pow(ki, lam)
        else:
            step1 = extra_shares(graph, expertise, lam)
            if spec.mode == "literalEq3":
                step1 = sp.diags(_inv_pow(ki, 1.0)) @ step1
                user_scale = (ku > 0).astype(np.float64)
        self._step1 = sp.csr_matrix(step1)
        self._user_scale = user_scale
        self._receiver = receiver

    def scores(self, targets) -> np.ndarray:
        """Dense ``(len(targets), n_items)`` score rows for ``targets``."""
        targets = np.atleast_1d(np.asarray(targets, dtype=np.int64))
        profile = self.graph.user_item[targets]
        resource = (profile @ self._step1).toarray()
        resource *= self._user_scale
        out = (self.graph.item_user @ resource.T).T
        if self._receiver is not None:
            out *= self._receiver
        return np.ascontiguousarray(out)


def kernel_scores(graph, spec: KernelSpec, target: int, expertise=None) -> np.ndarray:
    """Score vector for one target; empty for a user with no training items."""
    if graph.user_degree[target] == 0:
        return np.zeros(0)
    return Diffuser(graph, spec, expertise).scores([target])[0]


def md_scores(graph, target):
    return kernel_scores(graph, KernelSpec("MD"), target)


def hc_scores(graph, target):
    return kernel_scores(graph, KernelSpec("HC"), target)


def hhp_scores(graph, lam, target):
    return kernel_scores(graph, KernelSpec("HHP", lam), target)


def bhc_scores(graph, lam, target):
    return kernel_scores(graph, KernelSpec("BHC", lam), target)


def extra_scores(graph, e: ExpertiseVector, lam, mode, target):
    spec = KernelSpec("ExTrA", lam, getattr(e, "method", "Custom"), mode)
    return kernel_scores(graph, spec, target, e)


# Scores are rounded before ranking so that ties which are exact in real
# arithmetic but differ in the last ulp still break by item index.
_TIE_DECIMALS = 12


def rank_rows(scores: np.ndarray, exclude: sp.csr_matrix, k: int):
    """Top-``k`` item indices per row, skipping ``exclude`` entries.

    Returns ``(items, lengths)``: an ``(n, k)`` int array padded with -1 and the
    number of valid entries per row. Ties break by ascending item index.
    """
    if k < 1:
        raise ValueError("K must be >= 1")
    n, n_items = scores.shape
    key = -np.round(scores, _TIE_DECIMALS)
    rows = np.repeat(np.arange(n), np.diff(exclude.indptr))
    key[rows, exclude.indices] = np.inf
    kk = min(k, n_items)
    if kk < n_items:
        # argpartition keeps it O(n_items); the ordered refinement only runs
        # on the candidates whose key is <= the k-th smallest key.
        part = np.argpartition(key, kk - 1, axis=1)[:, :kk]
        kth = np.take_along_axis(key, part, axis=1).max(axis=1)
        items = np.empty((n, kk), dtype=np.int64)
        for r in range(n):
            cand = np.flatnonzero(key[r] <= kth[r])
            order = np.lexsort((cand, key[r, cand]))
            items[r] = cand[order[:kk]]
    else:
        items = np.argsort(key, axis=1, kind="stable")
    valid = np.isfinite(np.take_along_axis(key, items, axis=1))
    lengths = valid.sum(axis=1)
    items = np.where(valid, items, -1)
    if kk < k:
        items = np.pad(items, ((0, 0), (0, k - kk)), constant_values=-1)
    return items, lengths


@dataclass(frozen=True)
class RecommendationList:
    target: int
    items: np.ndarray
    scores: np.ndarray

    def __len__(self):
        return len(self.items)


def top_k(scores, graph: BipartiteGraph, target: int, k: int) -> RecommendationList:
    """K best uncollected items for ``target`` (ties by ascending index)."""
    if k < 1:
        raise ValueError("K must be >= 1")
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        return RecommendationList(target, np.zeros(0, dtype=np.int64), np.zeros(0))
    items, lengths = rank_rows(scores[None, :], graph.user_item[[target]], k)
    chosen = items[0, :lengths[0]]
    return RecommendationList(target, chosen, scores[chosen])
