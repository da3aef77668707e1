import numpy as np
import pytest
import scipy.sparse as sp
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from extrarec import DiffusionRecommender
from extrarec.expertise import expertise_el
from extrarec.kernels import md_scores, top_k


def test_params_roundtrip():
    est = DiffusionRecommender(method="ExTrA", lam=0.7, expertise="EL")
    params = est.get_params()
    assert params["lam"] == 0.7 and params["expertise"] == "EL"
    twin = clone(est)
    assert twin.get_params() == params
    est.set_params(lam=0.2)
    assert est.lam == 0.2


def test_not_fitted():
    with pytest.raises(NotFittedError):
        DiffusionRecommender().predict([0])


def test_fit_matches_kernel(toy_matrix, toy):
    est = DiffusionRecommender().fit(toy_matrix)
    np.testing.assert_array_equal(est.score_users([2])[0], md_scores(toy, 2))
    assert est.predict([2], k=2).tolist() == [[1, 2]]
    assert est.predict([2], k=2).tolist() == [top_k(md_scores(toy, 2), toy, 2, 2).items.tolist()]


def test_sparse_and_graph_inputs_agree(toy_matrix, toy):
    a = DiffusionRecommender(method="HC").fit(toy_matrix).score_users()
    b = DiffusionRecommender(method="HC").fit(sp.csr_matrix(toy_matrix * 4)).score_users()
    c = DiffusionRecommender(method="HC").fit(toy).score_users()
    np.testing.assert_array_equal(a, b)
    np.testing.assert_array_equal(a, c)


def test_extra_expertise_name_canonical(toy_matrix):
    est = DiffusionRecommender(method="ExTrA", lam=1.0, expertise="el").fit(toy_matrix)
    assert est.spec_.name == "MDEL"
    np.testing.assert_allclose(est.score_users([2])[0, [1, 2, 4]], [0.2925, 0.2422, 0.1333], atol=5e-5)


def test_precomputed_expertise(toy_matrix, toy):
    a = DiffusionRecommender(method="ExTrA", lam=0.6, expertise="EL")
    b = clone(a)
    a.fit(toy_matrix)
    b.fit(toy_matrix, expertise_values=expertise_el(toy).values)
    np.testing.assert_array_equal(a.score_users(), b.score_users())


def test_padding_and_cold_users():
    X = np.array([[1, 1, 0], [0, 1, 1], [0, 0, 0]])
    est = DiffusionRecommender(n_recommendations=3).fit(X)
    out = est.predict()
    assert out.shape == (3, 3)
    assert out[0].tolist() == [2, -1, -1]
    assert out[2].tolist() == [-1, -1, -1]
    assert est.recommend([0, 2]) == {0: [2], 2: []}


def test_batching_invariant():
    rng = np.random.default_rng(0)
    X = (rng.random((40, 30)) < 0.2).astype(float)
    a = DiffusionRecommender(method="HHP", lam=0.4, batch_size=3).fit(X)
    b = DiffusionRecommender(method="HHP", lam=0.4, batch_size=1000).fit(X)
    np.testing.assert_array_equal(a.predict(k=5), b.predict(k=5))
    np.testing.assert_array_equal(a.score_users(), b.score_users())


@pytest.mark.parametrize("kwargs", [
    {"lam": 1.5}, {"method": "Nope"}, {"method": "ExTrA", "lam": 0.5},
    {"mode": "weird"}, {"method": "ExTrA", "expertise": "Nope"},
])
def test_bad_params(kwargs, toy_matrix):
    with pytest.raises(ValueError):
        DiffusionRecommender(**kwargs).fit(toy_matrix)


def test_bad_inputs(toy_matrix):
    with pytest.raises(ValueError):
        DiffusionRecommender().fit(-toy_matrix)
    with pytest.raises(ValueError):
        DiffusionRecommender().fit(np.array([[np.nan, 1.0]]))
    est = DiffusionRecommender().fit(toy_matrix)
    with pytest.raises(ValueError):
        est.predict([7])
    with pytest.raises(ValueError):
        est.predict([0], k=0)
    with pytest.raises(ValueError):
        est.predict([0.5])
