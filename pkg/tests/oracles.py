"""Brute-force reference implementations, kept independent of the package.

Everything here works on a dense 0/1 numpy matrix ``A`` (users x items) and
builds the full item-item transfer matrix with explicit loops.
"""

import math

import numpy as np


def _inv(x, p=1.0):
    return 0.0 if x == 0 else x ** (-p)


def transfer_matrix(A, kind, lam=1.0, e=None, mode="userDegree"):
    """W[i, j] = resource item i gets from one unit on item j."""
    A = np.asarray(A, dtype=float)
    n_users, n_items = A.shape
    ku = A.sum(axis=1)
    ki = A.sum(axis=0)
    W = np.zeros((n_items, n_items))
    if kind == "ExTrA":
        share = np.zeros((n_items, n_users))
        for j in range(n_items):
            nbrs = [v for v in range(n_users) if A[v, j]]
            total = sum(e[v] for v in nbrs)
            for u in nbrs:
                if total > 0:
                    share[j, u] = (e[u] / total) ** lam
                else:
                    share[j, u] = 1.0 / len(nbrs)
    for i in range(n_items):
        for j in range(n_items):
            acc = 0.0
            for v in range(n_users):
                if not (A[v, i] and A[v, j]):
                    continue
                if kind == "ExTrA":
                    acc += share[j, v] * (_inv(ku[v]) if mode == "userDegree" else 1.0)
                else:
                    acc += 1.0 / ku[v]
            if kind == "MD":
                W[i, j] = acc * _inv(ki[j])
            elif kind == "HC":
                W[i, j] = acc * _inv(ki[i])
            elif kind == "HHP":
                W[i, j] = acc * _inv(ki[i], 1 - lam) * _inv(ki[j], lam)
            elif kind == "BHC":
                W[i, j] = acc * _inv(ki[i], lam)
            elif kind == "ExTrA":
                W[i, j] = acc if mode == "userDegree" else acc * _inv(ki[j])
            else:
                raise ValueError(kind)
    return W


def scores(A, target, kind, lam=1.0, e=None, mode="userDegree"):
    A = np.asarray(A, dtype=float)
    return transfer_matrix(A, kind, lam, e, mode) @ A[target]


def all_scores(A, kind, lam=1.0, e=None, mode="userDegree"):
    """Scores for every user as rows, from one transfer matrix."""
    A = np.asarray(A, dtype=float)
    return (transfer_matrix(A, kind, lam, e, mode) @ A.T).T


def similarity_sum(A, power):
    """O(U^2) user-pair loop; power 'sqrt' -> Sim, 'sq' -> Sim2."""
    sets = [set(np.flatnonzero(row)) for row in np.asarray(A)]
    out = []
    for u, Iu in enumerate(sets):
        terms = []
        for v, Iv in enumerate(sets):
            if v == u:
                continue
            c = len(Iu & Iv)
            if c == 0:
                continue
            if power == "sqrt":
                terms.append(c / math.sqrt(len(Iu) * len(Iv)))
            else:
                terms.append(c / float(len(Iu) * len(Iv)) ** 2)
        out.append(math.fsum(terms))
    return np.array(out)


def cosine(A, i, j):
    A = np.asarray(A)
    ui, uj = set(np.flatnonzero(A[:, i])), set(np.flatnonzero(A[:, j]))
    if not ui or not uj:
        return 0.0
    return len(ui & uj) / math.sqrt(len(ui) * len(uj))


def random_matrix(rng, max_users=50, max_items=50, min_dim=2):
    n_u = int(rng.integers(min_dim, max_users + 1))
    n_i = int(rng.integers(min_dim, max_items + 1))
    density = rng.uniform(0.05, 0.5)
    A = (rng.random((n_u, n_i)) < density).astype(float)
    return A
