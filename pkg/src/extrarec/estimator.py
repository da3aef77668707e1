"""scikit-learn style recommender wrapping the diffusion kernels."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_interactions, check_k, check_lambda, check_users
from .expertise import ExpertiseVector, canonical_method, compute_expertise
from .kernels import Diffuser, KernelSpec, rank_rows


class DiffusionRecommender(BaseEstimator):
    """Top-K recommender on a user-item bipartite graph.

    Parameters
    ----------
    method : {"MD", "ExTrA", "HC", "HHP", "BHC"}
    lam : float in [0, 1]
        Exponent for ExTrA shares, the HHP hybridisation or the BHC bias.
        Ignored by MD and HC.
    expertise : str, optional
        Expertise extractor for ExTrA (``"EL"``, ``"Sim2"``, ...).
    mode : {"userDegree", "literalEq3"}
        Second-step normalisation for ExTrA.
    gini : {"standard", "literal"}
        Gini variant when ``expertise="Gini"``.
    n_recommendations : int
        Default list length for :meth:`predict`.
    batch_size : int
        Target users scored per sparse sweep.
    """

    def __init__(self, method="MD", lam=1.0, expertise=None, mode="userDegree",
                 gini="standard", n_recommendations=20, batch_size=1024):
        self.method = method
        self.lam = lam
        self.expertise = expertise
        self.mode = mode
        self.gini = gini
        self.n_recommendations = n_recommendations
        self.batch_size = batch_size

    def _spec(self):
        lam = check_lambda(self.lam)
        if self.method in ("MD", "HC"):
            lam = 1.0
        expertise = None if self.expertise is None else canonical_method(self.expertise)
        return KernelSpec(self.method, lam, expertise, self.mode)

    def fit(self, X, y=None, expertise_values=None):
        """Build the training graph from ``X`` (matrix or BipartiteGraph).

        ``expertise_values`` lets a caller reuse a precomputed
        :class:`ExpertiseVector` across several fits on the same graph.
        """
        self.spec_ = self._spec()
        self.graph_ = check_interactions(X)
        self.n_users_, self.n_items_ = self.graph_.n_users, self.graph_.n_items
        self.expertise_ = None
        if self.spec_.method == "ExTrA":
            if expertise_values is None:
                expertise_values = compute_expertise(self.graph_, self.spec_.expertise, self.gini)
            elif not isinstance(expertise_values, ExpertiseVector):
                expertise_values = ExpertiseVector(self.spec_.expertise, expertise_values)
            self.expertise_ = expertise_values
        self.diffuser_ = Diffuser(self.graph_, self.spec_, self.expertise_)
        return self

    def score_users(self, users=None) -> np.ndarray:
        """Raw diffusion scores, shape ``(n_targets, n_items)``."""
        check_is_fitted(self, "diffuser_")
        users = check_users(users, self.n_users_)
        out = np.empty((len(users), self.n_items_))
        for start in range(0, len(users), self.batch_size):
            chunk = users[start:start + self.batch_size]
            out[start:start + len(chunk)] = self.diffuser_.scores(chunk)
        return out

    def predict(self, users=None, k=None) -> np.ndarray:
        """Top-``k`` uncollected items per user, padded with -1.

        Users with no training items get an all -1 row.
        """
        check_is_fitted(self, "diffuser_")
        k = check_k(self.n_recommendations if k is None else k)
        users = check_users(users, self.n_users_)
        out = np.full((len(users), k), -1, dtype=np.int64)
        warm = np.flatnonzero(self.graph_.user_degree[users] > 0)
        for start in range(0, len(warm), self.batch_size):
            pos = warm[start:start + self.batch_size]
            chunk = users[pos]
            scores = self.diffuser_.scores(chunk)
            items, _ = rank_rows(scores, self.graph_.user_item[chunk], k)
            out[pos] = items
        return out

    def recommend(self, users=None, k=None) -> dict:
        """``{user: [items...]}`` with the same content as :meth:`predict`."""
        ranked = self.predict(users, k)
        users = check_users(users, self.n_users_)
        return {int(u): [int(i) for i in row if i >= 0] for u, row in zip(users, ranked)}
