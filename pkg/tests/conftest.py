from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import pytest

from andfeatures import FeatureSampleNetwork, binarize, build_network, ingest_csv

DATA = Path(__file__).parent / "data"
LABEL_COLUMN = {"iris": "class", "wine": "class", "glass": "type", "ecoli": "class"}


def load_network(name: str, bins: int = 3, scheme: str = "quantile") -> FeatureSampleNetwork:
    with open(DATA / f"{name}.csv") as fh:
        raw = ingest_csv(fh, label_column=LABEL_COLUMN[name])
    return build_network(binarize(raw, bins, scheme))


def random_network(rng: np.random.Generator, n: int, d: int, density: float = 0.5) -> FeatureSampleNetwork:
    x = (rng.random((n, d)) < density).astype(np.uint8)
    for i in range(n):
        if not x[i].any():
            x[i, rng.integers(d)] = 1
    labels = rng.integers(0, 2, size=n)
    return FeatureSampleNetwork.from_sample_adj([np.flatnonzero(r) for r in x], d, labels)


@pytest.fixture(scope="session")
def iris():
    return load_network("iris")


@pytest.fixture
def toy():
    # rows (1,0), (1,1)
    return FeatureSampleNetwork.from_sample_adj([[0], [0, 1]], 2, [0, 1])


@pytest.fixture
def rng():
    return random.Random(12345)


def brute_evaluate(network: FeatureSampleNetwork, features) -> tuple[int, list[int], float]:
    """Independent evaluator on the dense incidence matrix, no repair."""
    x = network.incidence().astype(int)
    added = [0] * network.n_samples
    count = 0
    for af in set(tuple(f) for f in features):
        hit = [i for i in range(network.n_samples) if all(x[i][j] for j in af)]
        if hit:
            count += 1
            for i in hit:
                added[i] += 1
    ratios = [a / k for a, k in zip(added, x.sum(axis=1))]
    mean = sum(ratios) / len(ratios)
    sd = (sum((r - mean) ** 2 for r in ratios) / (len(ratios) - 1)) ** 0.5
    return count, added, sd


# one line per acceptance criterion, echoed again at the end of the session
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
