"""k-NN classification on (enhanced) interaction matrices."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .andfeature import connected_samples
from .engine import derive_rng
from .errors import DataError, DomainError
from .network import FeatureSampleNetwork
from .objectives import CandidateSolution


@dataclass
class InteractionMatrix:
    """0/1 sample-by-feature matrix: base features, then and-feature columns."""

    rows: np.ndarray
    labels: np.ndarray

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]


def enhanced_matrix(
    network: FeatureSampleNetwork, solution: CandidateSolution | Iterable[tuple[int, ...]] | None = None
) -> InteractionMatrix:
    """Interaction matrix of the network enhanced by ``solution``.

    And-feature columns follow the canonical (sorted) order; and-features
    without connections are left out.
    """
    if network.labels is None:
        raise DataError("network has no labels")
    base = network.incidence()
    feats = [] if solution is None else solution.features if isinstance(solution, CandidateSolution) else solution
    cols = []
    for af in sorted(tuple(f) for f in feats):
        conn = connected_samples(network, af)
        if conn.size:
            col = np.zeros(network.n_samples, dtype=np.uint8)
            col[conn] = 1
            cols.append(col)
    rows = np.column_stack([base] + cols) if cols else base
    return InteractionMatrix(rows.astype(np.uint8), np.asarray(network.labels, dtype=np.int64))


def hamming(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise Hamming distances between the 0/1 rows of ``a`` and ``b``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    return a.sum(1)[:, None] + b.sum(1)[None, :] - 2 * (a @ b.T)


def _votes(neighbour_labels: np.ndarray, n_classes: int) -> np.ndarray:
    """Cumulative vote counts: out[q, k-1, c] = votes for c among the k nearest."""
    onehot = np.zeros(neighbour_labels.shape + (n_classes,), dtype=np.int32)
    np.put_along_axis(onehot, neighbour_labels[..., None], 1, axis=-1)
    return onehot.cumsum(axis=1)


def knn_predict(train: InteractionMatrix, query_row: np.ndarray, k: int) -> int:
    """Majority class among the ``k`` nearest training rows.

    Neighbours are ordered by (Hamming distance, training row index); vote
    ties go to the smallest class id.
    """
    if train.n_samples == 0:
        raise DataError("empty training set")
    if not 1 <= k <= train.n_samples:
        raise DomainError(f"k must lie in [1, {train.n_samples}], got {k}")
    d = hamming(np.atleast_2d(query_row), train.rows)[0]
    nearest = np.argsort(d, kind="stable")[:k]
    votes = np.bincount(train.labels[nearest], minlength=int(train.labels.max()) + 1)
    return int(np.argmax(votes))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def stratified_split(labels: np.ndarray, fraction: float, rng) -> np.ndarray:
    """Boolean training mask: per class round-half-up(fraction * n_c), >= 1."""
    mask = np.zeros(len(labels), dtype=bool)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c).tolist()
        take = min(len(idx), max(1, _round_half_up(fraction * len(idx))))
        mask[rng.sample(idx, take)] = True
    return mask


@dataclass
class AccuracyTable:
    """Mean and standard deviation of k-NN accuracy per (fraction, k)."""

    records: list[dict] = field(default_factory=list)
    repeats: int = 0

    def best(self, fraction: float) -> dict:
        """Row with the highest mean for ``fraction`` (smallest k on ties)."""
        rows = [r for r in self.records if r["fraction"] == fraction]
        if not rows:
            raise KeyError(fraction)
        return max(rows, key=lambda r: (r["mean"], -r["k"]))

    def fractions(self) -> list[float]:
        return sorted({r["fraction"] for r in self.records})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fraction", "k", "mean", "sd"])
        for r in self.records:
            w.writerow([r["fraction"], r["k"], repr(r["mean"]), repr(r["sd"])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "repeats": self.repeats,
            "records": self.records,
            "best": {str(f): self.best(f) for f in self.fractions()},
        }


def split_validate(
    matrix: InteractionMatrix,
    fractions: Sequence[float] = (0.7, 0.8),
    repeats: int = 20,
    k_range: Iterable[int] = range(1, 21),
    seed: int = 0,
) -> AccuracyTable:
    """Repeated stratified train/test splits scored for every k.

    The labelled (training) share of every class is ``fraction``; the rest
    is classified. Accuracies are averaged over ``repeats`` splits; the sd
    uses the N-1 denominator.
    """
    labels = matrix.labels
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 1:
        raise DomainError("k_range must contain positive integers")
    if repeats < 1:
        raise DomainError("repeats must be >= 1")
    classes, counts = np.unique(labels, return_counts=True)
    for c, n in zip(classes, counts):
        if n < 2:
            raise DataError(f"class {c} has fewer than 2 members")
    n_classes = int(labels.max()) + 1
    rows = np.asarray(matrix.rows, dtype=np.int64)

    table = AccuracyTable(repeats=repeats)
    for fraction in fractions:
        acc = np.zeros((repeats, len(ks)))
        for r in range(repeats):
            mask = stratified_split(labels, fraction, derive_rng(seed, "split", float(fraction), r))
            train, test = np.flatnonzero(mask), np.flatnonzero(~mask)
            if test.size == 0:
                raise DataError(f"fraction {fraction} leaves no test samples")
            kmax = min(ks[-1], train.size)
            d = hamming(rows[test], rows[train])
            nearest = np.argsort(d, axis=1, kind="stable")[:, :kmax]
            votes = _votes(labels[train][nearest], n_classes)
            for col, k in enumerate(ks):
                pred = np.argmax(votes[:, min(k, kmax) - 1, :], axis=1)
                acc[r, col] = np.mean(pred == labels[test])
        sd = acc.std(axis=0, ddof=1) if repeats > 1 else np.zeros(len(ks))
        for col, k in enumerate(ks):
            table.records.append(
                {"fraction": float(fraction), "k": k, "mean": float(acc[:, col].mean()), "sd": float(sd[col])}
            )
    return table
