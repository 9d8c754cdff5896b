"""Lexicographic genetic algorithm.

Individuals are ranked by connected count first and disproportion second.
Each generation keeps the best ``elite_size`` unchanged and fills the rest
with children of binary-tournament parents.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

from .andfeature import ConnectionCache
from .engine import dedupe, derive_rng, evaluate_all, summarize
from .errors import ConfigError
from .network import FeatureSampleNetwork
from .objectives import CandidateSolution, Lookup, lex_better, lex_key
from .operators import InitParams, VariationParams, binary_tournament, breed, init_individual
from .report import RunReport, final_set

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LgaConfig:
    population_size: int = 1000
    elite_size: int = 100
    generations: int = 1000
    init: InitParams = field(default_factory=InitParams)
    variation: VariationParams = field(default_factory=VariationParams)
    m_max: int | None = None  # None: 100 * D
    seed: int = 0

    def validate(self) -> None:
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if not 0 <= self.elite_size < self.population_size:
            raise ConfigError(
                f"elite_size ({self.elite_size}) must be < population_size ({self.population_size})"
            )
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.m_max is not None and self.m_max < 1:
            raise ConfigError("m_max must be >= 1")

    def resolved_m_max(self, network: FeatureSampleNetwork) -> int:
        return self.m_max if self.m_max is not None else 100 * network.n_features


def _lex_cmp(a: CandidateSolution, b: CandidateSolution) -> int:
    return lex_better(a.objectives, b.objectives)


def run_lga(
    network: FeatureSampleNetwork,
    config: LgaConfig,
    threads: int = 1,
    lookup: Lookup | None = None,
    on_generation: Callable[[int, dict], bool | None] | None = None,
) -> RunReport:
    config.validate()
    t0 = time.perf_counter()
    m_max = config.resolved_m_max(network)
    lookup = lookup if lookup is not None else ConnectionCache(network)
    seed = config.seed
    p, e = config.population_size, config.elite_size

    echo = asdict(config)
    echo["m_max"] = m_max
    report = RunReport("lga", echo, seed)

    population = [init_individual(network, config.init, derive_rng(seed, "init", i)) for i in range(p)]
    elite: list[CandidateSolution] = []
    for gen in range(config.generations):
        evaluate_all(network, population, m_max, seed, gen, lookup, threads)
        population.sort(key=lex_key)
        elite = population[:e] if e > 0 else population[:1]
        stats = summarize(elite)
        report.record(stats)
        stop = on_generation is not None and bool(on_generation(gen, stats))
        if gen % 50 == 0:
            log.debug("lga gen %d: best count %d delta %.4f", gen, stats["count_max"], stats["delta_min"])
        if stop or gen == config.generations - 1:
            break

        nxt = list(population[:e])
        pair = 0
        while len(nxt) < p:
            rng = derive_rng(seed, "breed", gen, pair)
            p1 = binary_tournament(population, _lex_cmp, rng)
            p2 = binary_tournament(population, _lex_cmp, rng)
            c1, c2 = breed(network, p1, p2, config.variation, rng)
            if len(nxt) + 2 <= p:
                nxt += (c1, c2)
            else:
                nxt.append(c1 if rng.random() < 0.5 else c2)
            pair += 1
        population = nxt

    report.final = final_set(dedupe(elite))
    report.wall_time = time.perf_counter() - t0
    return report
