"""Input checks shared by the estimator and the harness."""

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils.validation import check_array

from .graph import BipartiteGraph


def check_interactions(X) -> BipartiteGraph:
    """Coerce ``X`` into a :class:`BipartiteGraph`.

    Accepts a graph, or a 2-D dense/sparse user x item matrix whose non-zero
    entries are links (their values are ignored).
    """
    if isinstance(X, BipartiteGraph):
        return X
    X = check_array(X, accept_sparse="csr", dtype=np.float64, ensure_all_finite=True,
                    ensure_min_samples=1, ensure_min_features=1)
    values = X.data if sp.issparse(X) else X
    if (values < 0).any():
        raise ValueError("interaction matrix must be non-negative")
    if sp.issparse(X):
        X = X.copy()
        X.eliminate_zeros()
    else:
        X = sp.csr_matrix(X != 0, dtype=np.float64)
    return BipartiteGraph(X)


def check_users(users, n_users: int) -> np.ndarray:
    if users is None:
        return np.arange(n_users)
    users = np.atleast_1d(np.asarray(users))
    if users.ndim != 1 or not np.issubdtype(users.dtype, np.integer):
        raise ValueError("users must be a 1-D array of integer indices")
    if users.size and (users.min() < 0 or users.max() >= n_users):
        raise ValueError(f"user index out of range [0, {n_users})")
    return users.astype(np.int64)


def check_k(k) -> int:
    if not isinstance(k, numbers.Integral) or k < 1:
        raise ValueError(f"K must be a positive integer, got {k!r}")
    return int(k)


def check_lambda(lam) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    return lam
