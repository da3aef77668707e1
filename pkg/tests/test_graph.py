import math

import numpy as np
import pytest

from extrarec.dataset import SplitDataset
from extrarec.graph import BipartiteGraph, build_graph
from oracles import cosine, random_matrix


def test_toy_degrees(toy):
    assert toy.item_degree[0] == 3
    assert toy.item_degree[3] == 2
    assert toy.user_degree[2] == 2
    assert toy.user_degree.sum() == toy.item_degree.sum() == 11


def test_single_link():
    g = BipartiteGraph.from_edges([[0, 0]], 1, 1)
    assert g.user_degree[0] == g.item_degree[0] == 1


def test_empty_training_graph():
    ds = SplitDataset(np.zeros((0, 2), dtype=np.int64), np.array([[0, 0]]), 1, 1, 0, 0.5)
    g = build_graph(ds)
    assert g.n_links == 0
    assert g.user_degree.tolist() == [0]


def test_duplicates_collapse():
    g = BipartiteGraph.from_edges([[0, 1], [0, 1], [1, 1]], 2, 2)
    assert g.n_links == 2
    assert g.item_users(1).tolist() == [0, 1]


def test_views_consistent_and_sorted():
    rng = np.random.default_rng(1)
    for _ in range(20):
        A = random_matrix(rng)
        g = BipartiteGraph(A)
        for u in range(g.n_users):
            items = g.user_items(u)
            assert np.all(np.diff(items) > 0)
            for i in items:
                assert u in g.item_users(i)
        rebuilt = g.user_item.T.tocsr()
        assert (rebuilt != g.item_user).nnz == 0
        assert g.user_degree.sum() == g.item_degree.sum() == g.n_links


def test_graph_is_read_only(toy):
    with pytest.raises(ValueError):
        toy.user_degree[0] = 7
    with pytest.raises(ValueError):
        toy.user_item.data[0] = 2.0


def test_cosine_toy(toy):
    assert toy.item_cosine(0, 1) == pytest.approx(2 / 3, abs=1e-15)
    assert toy.item_cosine(0, 2) == pytest.approx(1 / math.sqrt(6), abs=1e-15)
    assert toy.item_cosine(3, 3) == 1.0


def test_cosine_disjoint():
    g = BipartiteGraph.from_edges([[0, 0], [1, 1]], 2, 2)
    assert g.item_cosine(0, 1) == 0.0


def test_cosine_zero_degree_item():
    g = BipartiteGraph.from_edges([[0, 0]], 1, 2)
    assert g.item_cosine(0, 1) == 0.0


def test_cosine_brute_force_and_block():
    rng = np.random.default_rng(7)
    for _ in range(15):
        A = random_matrix(rng, 25, 25)
        g = BipartiteGraph(A)
        items = rng.choice(g.n_items, size=min(6, g.n_items), replace=False)
        block = g.item_cosine_block(items)
        for a, i in enumerate(items):
            for b, j in enumerate(items):
                if i == j:
                    continue
                s = g.item_cosine(i, j)
                assert s == pytest.approx(cosine(A, i, j), abs=1e-12)
                assert s == pytest.approx(g.item_cosine(j, i), abs=0)
                assert 0.0 <= s <= 1.0
                assert block[a, b] == pytest.approx(s, abs=1e-12)


def test_degree_histogram(toy):
    hist = toy.degree_histogram("item")
    assert hist.tolist() == [[1, 1], [2, 2], [3, 2]]
