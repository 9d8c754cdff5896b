import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from andfeatures import (
    AndFeature,
    CandidateSolution,
    DataError,
    DomainError,
    FeatureSampleNetwork,
    InteractionMatrix,
    enhanced_matrix,
    enumerate_connected_oracle,
    knn_predict,
    split_validate,
    stratified_split,
)
from andfeatures.analysis import hamming

from conftest import load_network

HAND = InteractionMatrix(
    np.array(
        [
            [1, 1, 0, 0],
            [1, 0, 1, 0],
            [0, 1, 1, 1],
            [0, 0, 1, 1],
            [1, 1, 1, 1],
            [0, 0, 0, 1],
        ],
        dtype=np.uint8,
    ),
    np.array([0, 0, 1, 1, 2, 1]),
)


def oracle_predict(train, query, k):
    # sort-free: repeatedly take the (distance, index) minimum
    pool = [(int(np.sum(row != query)), i) for i, row in enumerate(train.rows)]
    chosen = []
    for _ in range(k):
        m = min(pool)
        pool.remove(m)
        chosen.append(int(train.labels[m[1]]))
    counts = {c: chosen.count(c) for c in set(chosen)}
    top = max(counts.values())
    return min(c for c, v in counts.items() if v == top)


class TestEnhancedMatrix:
    def test_identity(self, iris):
        m = enhanced_matrix(iris)
        assert (m.rows == iris.incidence()).all()
        assert (enhanced_matrix(iris, CandidateSolution()).rows == m.rows).all()

    def test_iris_full(self, iris):
        m = enhanced_matrix(iris, CandidateSolution(enumerate_connected_oracle(iris)))
        assert m.rows.shape == (150, 140)
        assert set(m.rows.sum(axis=1).tolist()) == {15}

    def test_toy_column(self, toy):
        m = enhanced_matrix(toy, CandidateSolution({AndFeature([0, 1])}))
        assert m.rows[:, 2].tolist() == [0, 1]

    def test_columns_sorted_and_pruned(self, toy):
        net = FeatureSampleNetwork.from_sample_adj([[0, 1, 2], [0, 1]], 3, [0, 1])
        m = enhanced_matrix(net, [AndFeature([1, 2]), AndFeature([0, 1])])
        assert m.rows[:, 3:].T.tolist() == [[1, 1], [1, 0]]
        assert enhanced_matrix(toy, [AndFeature([0, 1])]).rows.shape == (2, 3)

    def test_unlabelled(self):
        net = FeatureSampleNetwork.from_sample_adj([[0], [1]], 2)
        with pytest.raises(DataError):
            enhanced_matrix(net)


class TestKnn:
    def test_exact_match(self):
        for i, row in enumerate(HAND.rows):
            assert knn_predict(HAND, row, 1) == HAND.labels[i]

    def test_tie_to_smallest_class(self):
        train = InteractionMatrix(np.array([[1, 0], [0, 1]]), np.array([1, 0]))
        assert knn_predict(train, np.array([0, 0]), 2) == 0

    def test_hand_table(self):
        # distances from 1011: 3, 1, 2, 1, 1, 2
        q = np.array([1, 0, 1, 1])
        assert hamming(q[None], HAND.rows)[0].tolist() == [3, 1, 2, 1, 1, 2]
        assert knn_predict(HAND, q, 3) == 0  # one vote each for 0, 1, 2
        assert knn_predict(HAND, q, 5) == 1
        assert knn_predict(HAND, q, 1) == 0  # row 1 wins the distance tie by index

    def test_domain(self):
        with pytest.raises(DomainError):
            knn_predict(HAND, HAND.rows[0], 7)
        with pytest.raises(DataError):
            knn_predict(InteractionMatrix(np.zeros((0, 4)), np.zeros(0, int)), HAND.rows[0], 1)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 10**9))
    def test_against_oracle(self, seed):
        gen = np.random.default_rng(seed)
        n, d = int(gen.integers(1, 12)), int(gen.integers(1, 6))
        train = InteractionMatrix(gen.integers(0, 2, (n, d)), gen.integers(0, 3, n))
        q = gen.integers(0, 2, d)
        k = int(gen.integers(1, n + 1))
        assert knn_predict(train, q, k) == oracle_predict(train, q, k)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10**9))
    def test_zero_column_invariant(self, seed):
        gen = np.random.default_rng(seed)
        train = InteractionMatrix(gen.integers(0, 2, (8, 4)), gen.integers(0, 2, 8))
        wider = InteractionMatrix(np.column_stack([train.rows, np.zeros(8, int)]), train.labels)
        q = gen.integers(0, 2, 4)
        for k in range(1, 9):
            assert knn_predict(train, q, k) == knn_predict(wider, np.append(q, 0), k)


class TestSplits:
    def test_stratified_counts(self):
        labels = np.array([0] * 10 + [1] * 5 + [2] * 2)
        mask = stratified_split(labels, 0.7, random.Random(0))
        assert [int(mask[labels == c].sum()) for c in range(3)] == [7, 4, 1]

    def test_at_least_one(self):
        labels = np.array([0, 0, 1, 1])
        mask = stratified_split(labels, 0.1, random.Random(0))
        assert [int(mask[labels == c].sum()) for c in range(2)] == [1, 1]

    def test_separable(self):
        rows = np.array([[1, 0, 0]] * 6 + [[0, 1, 1]] * 6)
        labels = np.array([0] * 6 + [1] * 6)
        table = split_validate(InteractionMatrix(rows, labels), repeats=5, k_range=range(1, 5))
        assert all(r["mean"] == 1.0 and r["sd"] == 0.0 for r in table.records)

    def test_singleton_class(self):
        with pytest.raises(DataError, match="class 1"):
            split_validate(InteractionMatrix(np.eye(3, dtype=int), np.array([0, 0, 1])))

    def test_deterministic(self, iris):
        m = enhanced_matrix(iris)
        a = split_validate(m, repeats=3, seed=4).to_csv()
        assert a == split_validate(m, repeats=3, seed=4).to_csv()
        assert a != split_validate(m, repeats=3, seed=5).to_csv()

    def test_empty_solution_matches_original(self, iris):
        a = split_validate(enhanced_matrix(iris), repeats=3)
        b = split_validate(enhanced_matrix(iris, CandidateSolution()), repeats=3)
        assert a.records == b.records

    def test_vectorized_matches_knn_predict(self):
        # one split, scored with knn_predict row by row
        net = load_network("glass")
        m = enhanced_matrix(net)
        table = split_validate(m, fractions=(0.7,), repeats=1, k_range=[1, 4, 9], seed=2)
        from andfeatures.engine import derive_rng

        mask = stratified_split(m.labels, 0.7, derive_rng(2, "split", 0.7, 0))
        train = InteractionMatrix(m.rows[mask], m.labels[mask])
        for rec in table.records:
            pred = [knn_predict(train, row, rec["k"]) for row in m.rows[~mask]]
            assert rec["mean"] == pytest.approx(np.mean(np.array(pred) == m.labels[~mask]))

    def test_table_shape(self, iris):
        table = split_validate(enhanced_matrix(iris), repeats=2, k_range=range(1, 4))
        assert table.fractions() == [0.7, 0.8]
        assert table.to_csv().splitlines()[0] == "fraction,k,mean,sd"
        assert len(table.records) == 6
        best = table.best(0.7)
        assert best["mean"] == max(r["mean"] for r in table.records if r["fraction"] == 0.7)
        assert set(table.to_dict()["best"]) == {"0.7", "0.8"}
        assert all(0 <= r["mean"] <= 1 for r in table.records)
