"""SPEA2: strength Pareto evolutionary algorithm with an external archive.

Fitness is raw strength (sum of the strengths of every dominator) plus a
density term from the distance to the k-th nearest neighbour; the archive
keeps the nondominated individuals and truncates by nearest-neighbour
distance when it overflows.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .andfeature import ConnectionCache
from .engine import dedupe, derive_rng, evaluate_all, summarize
from .errors import ConfigError, DataError
from .network import FeatureSampleNetwork
from .objectives import CandidateSolution, Lookup
from .operators import InitParams, VariationParams, binary_tournament, breed, init_individual
from .report import RunReport, final_set

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Spea2Config:
    population_size: int = 1000
    archive_size: int = 100
    generations: int = 1000
    init: InitParams = field(default_factory=InitParams)
    variation: VariationParams = field(default_factory=VariationParams)
    m_max: int | None = None  # None: 100 * D
    seed: int = 0
    k: int | None = None  # None: floor(sqrt(archive_size))

    def validate(self) -> None:
        if self.archive_size < 2:
            raise ConfigError("archive_size must be >= 2")
        if self.archive_size > self.population_size:
            raise ConfigError(
                f"archive_size ({self.archive_size}) must be <= population_size ({self.population_size})"
            )
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.m_max is not None and self.m_max < 1:
            raise ConfigError("m_max must be >= 1")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")

    @property
    def resolved_k(self) -> int:
        return self.k if self.k is not None else max(1, math.isqrt(self.archive_size))

    def resolved_m_max(self, network: FeatureSampleNetwork) -> int:
        return self.m_max if self.m_max is not None else 100 * network.n_features


@dataclass
class Spea2Fitness:
    strength: np.ndarray
    raw: np.ndarray
    density: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.raw + self.density


def normalize(objectives: np.ndarray) -> np.ndarray:
    """Min-max scale each column to [0, 1]; a constant column maps to 0."""
    obj = np.asarray(objectives, dtype=float)
    lo = obj.min(axis=0)
    span = obj.max(axis=0) - lo
    out = np.zeros_like(obj)
    ok = span > 0
    out[:, ok] = (obj[:, ok] - lo[ok]) / span[ok]
    return out


def dominance_matrix(objectives: np.ndarray) -> np.ndarray:
    """``dom[i, j]`` is True when point i dominates point j (minimization)."""
    o = np.asarray(objectives, dtype=float)
    le = np.all(o[:, None, :] <= o[None, :, :], axis=2)
    lt = np.any(o[:, None, :] < o[None, :, :], axis=2)
    return le & lt


def _distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def spea2_fitness(objectives: np.ndarray, k: int) -> Spea2Fitness:
    """Strength, raw fitness and density for every point of the union.

    Density is ``1 / (sigma_k + 2)`` with ``sigma_k`` the distance to the
    k-th nearest other point in normalized objective space.
    """
    obj = np.asarray(objectives, dtype=float)
    n = len(obj)
    if n < 2:
        raise DataError("SPEA2 fitness needs at least 2 individuals")
    dom = dominance_matrix(obj)
    strength = dom.sum(axis=1)
    raw = (dom * strength[:, None]).sum(axis=0)
    dist = _distances(normalize(obj))
    np.fill_diagonal(dist, np.inf)
    kk = min(k, n - 1)
    sigma = np.partition(dist, kk - 1, axis=1)[:, kk - 1]
    return Spea2Fitness(strength.astype(np.int64), raw.astype(np.int64), 1.0 / (sigma + 2.0))


def truncate(points: np.ndarray, size: int) -> list[int]:
    """Indices of the ``size`` points kept by iterated nearest-neighbour removal.

    Each step removes the point whose ascending list of distances to the
    remaining points is lexicographically smallest. Coincident points are
    grouped so that heavy duplication stays cheap; among identical points the
    one with the highest index goes first, and exact ties between distinct
    points remove the lowest index.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if size >= n:
        return list(range(n))
    # group coincident points; group order follows first appearance
    groups: dict[tuple, list[int]] = {}
    for i, row in enumerate(map(tuple, pts)):
        groups.setdefault(row, []).append(i)
    members = list(groups.values())
    centres = np.array([pts[m[0]] for m in members])
    gdist = _distances(centres)
    mult = np.array([len(m) for m in members])
    alive = n
    while alive > size:
        top = mult.max()
        cands = np.flatnonzero(mult == top)
        if len(cands) > 1:
            rows = []
            for g in cands:
                # the top-1 leading zeros are shared by every candidate
                order = np.argsort(gdist[g], kind="stable")
                order = order[order != g]
                rows.append(np.repeat(gdist[g][order], mult[order]))
            rows = np.array(rows)
            # lexsort: last key is primary
            best = np.lexsort(rows.T[::-1])[0] if rows.shape[1] else 0
            g = cands[best]
        else:
            g = cands[0]
        members[g].pop()
        mult[g] -= 1
        alive -= 1
    return sorted(i for m in members for i in m)


def environmental_selection(objectives: np.ndarray, fitness: Spea2Fitness, size: int) -> list[int]:
    """Indices of the next archive.

    All points with fitness below 1 (the nondominated ones) enter; an
    underfull archive is topped up by ascending fitness, an overfull one is
    truncated.
    """
    f = fitness.total
    nd = np.flatnonzero(f < 1.0)
    if len(nd) == size:
        return nd.tolist()
    if len(nd) < size:
        rest = np.flatnonzero(f >= 1.0)
        rest = rest[np.argsort(f[rest], kind="stable")]
        return sorted(nd.tolist() + rest[: size - len(nd)].tolist())
    pts = normalize(np.asarray(objectives, dtype=float))[nd]
    keep = truncate(pts, size)
    return nd[keep].tolist()


def _objective_matrix(solutions: Sequence[CandidateSolution]) -> np.ndarray:
    return np.array([tuple(s.objectives) for s in solutions], dtype=float)


def run_spea2(
    network: FeatureSampleNetwork,
    config: Spea2Config,
    threads: int = 1,
    lookup: Lookup | None = None,
    on_generation: Callable[[int, dict], bool | None] | None = None,
) -> RunReport:
    config.validate()
    t0 = time.perf_counter()
    m_max = config.resolved_m_max(network)
    lookup = lookup if lookup is not None else ConnectionCache(network)
    seed, k = config.seed, config.resolved_k
    p, a = config.population_size, config.archive_size

    echo = asdict(config)
    echo["m_max"] = m_max
    echo["k"] = k
    report = RunReport("spea2", echo, seed)
    report.history["archive_nondominated_count"] = []

    population = [init_individual(network, config.init, derive_rng(seed, "init", i)) for i in range(p)]
    archive: list[CandidateSolution] = []
    archive_f = np.empty(0)
    for gen in range(config.generations):
        evaluate_all(network, population, m_max, seed, gen, lookup, threads)
        union = archive + population
        obj = _objective_matrix(union)
        fit = spea2_fitness(obj, k)
        chosen = environmental_selection(obj, fit, a)
        archive = [union[i] for i in chosen]
        archive_f = fit.total[chosen]
        nondominated = [s for s, f in zip(archive, archive_f) if f < 1.0]
        stats = summarize(nondominated)
        stats["archive_nondominated_count"] = len(nondominated)
        report.record(stats)
        stop = on_generation is not None and bool(on_generation(gen, stats))
        if gen % 50 == 0:
            log.debug("spea2 gen %d: %d nondominated, best count %d", gen, len(nondominated), stats["count_max"])
        if stop or gen == config.generations - 1:
            break

        ranked = list(range(len(archive)))
        fvals = archive_f.tolist()

        def cmp(i: int, j: int) -> int:
            return (fvals[i] > fvals[j]) - (fvals[i] < fvals[j])

        children: list[CandidateSolution] = []
        pair = 0
        while len(children) < p:
            rng = derive_rng(seed, "breed", gen, pair)
            i = binary_tournament(ranked, cmp, rng)
            j = binary_tournament(ranked, cmp, rng)
            c1, c2 = breed(network, archive[i], archive[j], config.variation, rng)
            if len(children) + 2 <= p:
                children += (c1, c2)
            else:
                children.append(c1 if rng.random() < 0.5 else c2)
            pair += 1
        population = children

    final = [s for s, f in zip(archive, archive_f) if f < 1.0]
    report.final = final_set(dedupe(final))
    report.wall_time = time.perf_counter() - t0
    return report
