"""Variation and selection operators shared by both evolutionary engines.

Every operator is a deterministic function of its inputs and the supplied
``random.Random`` stream. Members of a set are picked by position in the
set's iteration order, which is itself a deterministic function of how the
set was built, so replaying a run with the same seed reproduces it exactly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Sequence, TypeVar

from .andfeature import AndFeature, count_possible_and_features, sample_and_feature
from .errors import ConfigError, DataError
from .network import FeatureSampleNetwork
from .objectives import CandidateSolution

T = TypeVar("T")


@dataclass(frozen=True)
class InitParams:
    mu: float = 50.0
    sigma: float = 10.0

    def __post_init__(self):
        if not (self.mu > 0 and self.sigma > 0):
            raise ConfigError(f"mu and sigma must be > 0, got mu={self.mu}, sigma={self.sigma}")


@dataclass(frozen=True)
class VariationParams:
    recombination_rate: float = 0.6
    eta: int = 1

    def __post_init__(self):
        if not 0.0 <= self.recombination_rate <= 1.0:
            raise ConfigError("recombination_rate must lie in [0, 1]")
        if self.eta < 0 or int(self.eta) != self.eta:
            raise ConfigError("eta must be a non-negative integer")


def init_individual(
    network: FeatureSampleNetwork, params: InitParams, rng: random.Random
) -> CandidateSolution:
    """Random solution of floor(M) distinct and-features, M ~ N(mu, sigma).

    Sizes below 1 are raised to 1.
    """
    size = max(1, math.floor(rng.gauss(params.mu, params.sigma)))
    size = min(size, count_possible_and_features(network.n_features))
    features: set[AndFeature] = set()
    while len(features) < size:
        features.add(sample_and_feature(network, rng))
    return CandidateSolution(features)


def _base_of(solution: CandidateSolution) -> CandidateSolution | None:
    return solution if solution.evaluated is not None else solution.base


def uniform_crossover(
    p1: CandidateSolution, p2: CandidateSolution, rng: random.Random
) -> tuple[CandidateSolution, CandidateSolution]:
    """Both children keep the parents' common and-features; every element of
    the symmetric difference goes to one child or the other with chance 1/2."""
    a, b = p1.features, p2.features
    c1 = set(a & b)
    c2 = set(c1)
    for v in a ^ b:
        if rng.random() < 0.5:
            c1.add(v)
        else:
            c2.add(v)
    return (
        CandidateSolution(c1, base=_base_of(p1)),
        CandidateSolution(c2, base=_base_of(p2)),
    )


def _pick(features: set[AndFeature], index: int) -> AndFeature:
    return next(islice(features, index, None))


def modify_and_feature(af: AndFeature, n_features: int, rng: random.Random) -> AndFeature:
    """Grow by one random index (chance 1/q) or swap a member with a random
    index (chance (q-1)/q). Either may leave ``af`` unchanged."""
    q = len(af)
    if rng.random() < 1.0 / q:
        j = rng.randrange(n_features)
        if j in af:
            return af
        return AndFeature._trusted(tuple(sorted(af + (j,))))
    j_out = af[rng.randrange(q)]
    j_in = rng.randrange(n_features)
    if j_in in af:
        # both positions hold a 1 (or j_in == j_out): the swap is a no-op
        return af
    return AndFeature._trusted(tuple(sorted([m for m in af if m != j_out] + [j_in])))


def mutate(
    network: FeatureSampleNetwork,
    solution: CandidateSolution,
    eta: int,
    rng: random.Random,
) -> CandidateSolution:
    """Apply ``eta`` random changes, each an add, remove or modify with
    probability 1/3. Returns a new solution; the input is left untouched."""
    features = set(solution.features)
    for _ in range(eta):
        branch = rng.randrange(3)
        if branch == 0:
            features.add(sample_and_feature(network, rng))
        elif branch == 1:
            if not features:
                continue
            # position len(features) stands for "remove nothing"
            r = rng.randrange(len(features) + 1)
            if r < len(features):
                features.discard(_pick(features, r))
        else:
            if not features:
                continue
            v = _pick(features, rng.randrange(len(features)))
            w = modify_and_feature(v, network.n_features, rng)
            if w != v:
                features.discard(v)
                features.add(w)
    return CandidateSolution(features, base=_base_of(solution))


def binary_tournament(
    population: Sequence[T],
    better: Callable[[T, T], int],
    rng: random.Random,
) -> T:
    """Better of two uniform draws (with replacement).

    ``better(a, b)`` is negative when ``a`` is better, positive when ``b`` is,
    zero on a tie, which is broken by a fair coin.
    """
    if not population:
        raise DataError("tournament on an empty population")
    n = len(population)
    a = population[rng.randrange(n)]
    b = population[rng.randrange(n)]
    c = better(a, b)
    if c < 0:
        return a
    if c > 0:
        return b
    return a if rng.random() < 0.5 else b


def breed(
    network: FeatureSampleNetwork,
    p1: CandidateSolution,
    p2: CandidateSolution,
    params: VariationParams,
    rng: random.Random,
) -> tuple[CandidateSolution, CandidateSolution]:
    """Crossover with probability ``recombination_rate`` (else copy the
    parents), then mutate both children."""
    if rng.random() < params.recombination_rate:
        c1, c2 = uniform_crossover(p1, p2, rng)
    else:
        c1 = CandidateSolution(set(p1.features), base=_base_of(p1))
        c2 = CandidateSolution(set(p2.features), base=_base_of(p2))
    return (
        mutate(network, c1, params.eta, rng),
        mutate(network, c2, params.eta, rng),
    )
