"""Plumbing shared by the evolutionary engines: random streams, parallel
evaluation and per-generation statistics."""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

from .objectives import CandidateSolution, Lookup, evaluate
from .network import FeatureSampleNetwork


def derive_rng(seed: int, *path: object) -> random.Random:
    """Independent stream for ``(seed, *path)``, e.g. ``(seed, "eval", gen, slot)``."""
    digest = hashlib.blake2b(repr((int(seed),) + path).encode(), digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "little"))


def evaluate_all(
    network: FeatureSampleNetwork,
    population: Sequence[CandidateSolution],
    m_max: int,
    seed: int,
    generation: int,
    lookup: Lookup,
    threads: int = 1,
) -> None:
    """Evaluate every unevaluated individual.

    Slot ``i`` repairs with the stream ``(seed, "eval", generation, i)``, so
    the outcome does not depend on ``threads``.
    """
    todo = [i for i, s in enumerate(population) if s.evaluated is None]

    def work(i: int) -> None:
        evaluate(network, population[i], m_max, derive_rng(seed, "eval", generation, i), lookup)

    if threads > 1 and len(todo) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, todo))
    else:
        for i in todo:
            work(i)


STAT_KEYS = ("count_min", "count_mean", "count_max", "delta_min", "delta_mean", "delta_max")


def summarize(tracked: Sequence[CandidateSolution]) -> dict[str, float]:
    counts = np.array([s.evaluated.connected_count for s in tracked], dtype=float)
    deltas = np.array([s.evaluated.disproportion for s in tracked], dtype=float)
    return {
        "count_min": int(counts.min()),
        "count_mean": float(counts.mean()),
        "count_max": int(counts.max()),
        "delta_min": float(deltas.min()),
        "delta_mean": float(deltas.mean()),
        "delta_max": float(deltas.max()),
    }


def dedupe(solutions: Sequence[CandidateSolution]) -> list[CandidateSolution]:
    """Drop solutions whose and-feature set already appeared (order kept)."""
    seen: set[frozenset] = set()
    out = []
    for s in solutions:
        k = s.key()
        if k not in seen:
            seen.add(k)
            out.append(s)
    return out
