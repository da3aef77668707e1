"""Immutable user-item bipartite graph in compressed sparse row form."""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp


class BipartiteGraph:
    """Training graph with user->items and item->users CSR views.

    Both views are binary ``scipy.sparse.csr_matrix`` objects with sorted,
    duplicate-free column indices. Degrees are precomputed as int64 arrays.
    """

    def __init__(self, user_item: sp.csr_matrix):
        ui = sp.csr_matrix(user_item, dtype=np.float64, copy=True)
        ui.sum_duplicates()
        ui.data[:] = 1.0
        ui.eliminate_zeros()
        ui.sort_indices()
        iu = ui.T.tocsr()
        iu.sort_indices()
        for m in (ui, iu):
            m.data.setflags(write=False)
            m.indices.setflags(write=False)
            m.indptr.setflags(write=False)
        self._ui = ui
        self._iu = iu
        self.user_degree = np.diff(ui.indptr).astype(np.int64)
        self.item_degree = np.diff(iu.indptr).astype(np.int64)
        self.user_degree.setflags(write=False)
        self.item_degree.setflags(write=False)

    @classmethod
    def from_edges(cls, edges, n_users: int, n_items: int) -> "BipartiteGraph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        data = np.ones(len(edges))
        mat = sp.csr_matrix((data, (edges[:, 0], edges[:, 1])), shape=(n_users, n_items))
        return cls(mat)

    @classmethod
    def from_adjacency(cls, adjacency, n_items=None) -> "BipartiteGraph":
        """Build from a list of per-user item lists."""
        edges = [(u, i) for u, items in enumerate(adjacency) for i in items]
        if n_items is None:
            n_items = 1 + max((i for _, i in edges), default=-1)
        return cls.from_edges(edges, len(adjacency), n_items)

    @property
    def n_users(self) -> int:
        return self._ui.shape[0]

    @property
    def n_items(self) -> int:
        return self._ui.shape[1]

    @property
    def n_links(self) -> int:
        return self._ui.nnz

    @property
    def user_item(self) -> sp.csr_matrix:
        """Binary ``(n_users, n_items)`` adjacency (read-only)."""
        return self._ui

    @property
    def item_user(self) -> sp.csr_matrix:
        """Binary ``(n_items, n_users)`` adjacency (read-only)."""
        return self._iu

    def user_items(self, u: int) -> np.ndarray:
        return self._ui.indices[self._ui.indptr[u]:self._ui.indptr[u + 1]]

    def item_users(self, i: int) -> np.ndarray:
        return self._iu.indices[self._iu.indptr[i]:self._iu.indptr[i + 1]]

    def item_cosine(self, i: int, j: int) -> float:
        """Cosine similarity |U_i & U_j| / sqrt(k_i k_j) of two items."""
        if i == j:
            return 1.0
        ki, kj = self.item_degree[i], self.item_degree[j]
        if ki == 0 or kj == 0:
            return 0.0
        common = np.intersect1d(self.item_users(i), self.item_users(j), assume_unique=True)
        return len(common) / math.sqrt(ki * kj)

    def item_cosine_block(self, items) -> np.ndarray:
        """Pairwise cosine among ``items`` as a small dense matrix.

        Only the requested columns are touched, so the cost is independent of
        the catalogue size. The diagonal is left at 1.
        """
        items = np.asarray(items, dtype=np.int64)
        rows = self._iu[items]
        common = (rows @ rows.T).toarray()
        deg = self.item_degree[items].astype(np.float64)
        norm = np.sqrt(np.outer(deg, deg))
        with np.errstate(divide="ignore", invalid="ignore"):
            sim = np.where(norm > 0, common / norm, 0.0)
        np.fill_diagonal(sim, 1.0)
        return sim

    def degree_histogram(self, side="user") -> np.ndarray:
        """Counts of nodes per degree, as ``(degree, count)`` rows."""
        deg = self.user_degree if side == "user" else self.item_degree
        values, counts = np.unique(deg, return_counts=True)
        return np.column_stack([values, counts])

    def __repr__(self):
        return f"BipartiteGraph(n_users={self.n_users}, n_items={self.n_items}, n_links={self.n_links})"


def build_graph(split) -> BipartiteGraph:
    """Training graph of a :class:`~extrarec.dataset.SplitDataset`."""
    return BipartiteGraph.from_edges(split.training, split.user_count, split.item_count)
