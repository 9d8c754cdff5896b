"""Objective evaluation of candidate solutions.

A candidate solution is a set of and-features. Its two objectives are the
number of connected and-features (maximized, stored negated as ``f1``) and
the disproportion: the sample standard deviation of every sample's relative
degree increase (minimized, ``f2``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, NamedTuple

import numpy as np

from .andfeature import AndFeature, connected_samples
from .errors import DomainError
from .network import FeatureSampleNetwork

Lookup = Callable[[tuple[int, ...]], np.ndarray]


class ObjectiveVector(NamedTuple):
    f1: int  # minus the connected count
    f2: float  # disproportion

    @property
    def count(self) -> int:
        return -self.f1


@dataclass(frozen=True, eq=False)
class EvaluationResult:
    connected_count: int
    disproportion: float
    per_sample_added: np.ndarray
    feasible: bool

    @property
    def objectives(self) -> ObjectiveVector:
        return ObjectiveVector(-self.connected_count, self.disproportion)


@dataclass(eq=False)
class CandidateSolution:
    """A set of and-features plus its cached evaluation.

    Evaluation freezes ``features`` into a pruned ``frozenset``; variation
    operators always build new solutions rather than editing evaluated ones.
    ``base`` optionally names an evaluated solution this one was derived from,
    which lets :func:`evaluate` work from the difference instead of the
    whole set.
    """

    features: set[AndFeature] | frozenset[AndFeature] = field(default_factory=set)
    evaluated: EvaluationResult | None = None
    base: "CandidateSolution | None" = field(default=None, repr=False)

    @property
    def objectives(self) -> ObjectiveVector:
        if self.evaluated is None:
            raise ValueError("solution has not been evaluated")
        return self.evaluated.objectives

    def __len__(self) -> int:
        return len(self.features)

    def key(self) -> frozenset:
        return frozenset(self.features)


def disproportion(original_degrees: np.ndarray, added: np.ndarray) -> float:
    """Sample standard deviation (ddof=1) of ``added[i] / original_degrees[i]``."""
    k = np.asarray(original_degrees, dtype=float)
    a = np.asarray(added, dtype=float)
    if k.shape != a.shape:
        raise DomainError("degree and addition vectors differ in length")
    if k.size < 2:
        raise DomainError("disproportion needs at least 2 samples")
    if np.any(k <= 0):
        raise DomainError("original degrees must all be >= 1")
    ratios = a / k
    if ratios.max() == ratios.min():
        return 0.0
    return float(np.std(ratios, ddof=1))


def evaluate(
    network: FeatureSampleNetwork,
    solution: CandidateSolution,
    m_max: int,
    rng: random.Random,
    lookup: Lookup | None = None,
) -> EvaluationResult:
    """Prune, repair and score ``solution`` in place.

    And-features with no connection are dropped. If more than ``m_max``
    remain, uniformly chosen ones are removed until exactly ``m_max`` are
    left; this consumes ``rng``. ``lookup`` defaults to
    :func:`connected_samples`; pass a :class:`ConnectionCache` to memoize.
    """
    if solution.evaluated is not None:
        return solution.evaluated
    conn = lookup if lookup is not None else (lambda af: connected_samples(network, af))
    n = network.n_samples
    base = solution.base
    if base is not None and base.evaluated is not None:
        base_set = base.features
        features = solution.features
        added = base.evaluated.per_sample_added.copy()
        for af in base_set - features:
            added[conn(af)] -= 1
        retained = set(features)
        for af in features - base_set:
            c = conn(af)
            if c.size:
                added[c] += 1
            else:
                retained.discard(af)
    else:
        retained = set()
        parts = []
        for af in solution.features:
            c = conn(af)
            if c.size:
                retained.add(af)
                parts.append(c)
        if parts:
            added = np.bincount(np.concatenate(parts), minlength=n).astype(np.int64)
        else:
            added = np.zeros(n, dtype=np.int64)

    excess = len(retained) - m_max
    if excess > 0:
        for af in rng.sample(sorted(retained), excess):
            retained.discard(af)
            added[conn(af)] -= 1

    added.flags.writeable = False
    result = EvaluationResult(
        connected_count=len(retained),
        disproportion=disproportion(network.degrees, added),
        per_sample_added=added,
        feasible=len(retained) <= m_max,
    )
    solution.features = frozenset(retained)
    solution.evaluated = result
    solution.base = None
    return result


def dominates(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    """Pareto dominance for two minimized objectives."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


class Ordering(IntEnum):
    """Comparison outcome; usable as a cmp-style sign (negative = better)."""

    BETTER = -1
    EQUIVALENT = 0
    WORSE = 1


def lex_better(a: ObjectiveVector, b: ObjectiveVector) -> Ordering:
    """Larger connected count wins; on an exact tie, smaller disproportion."""
    if a[0] != b[0]:
        return Ordering.BETTER if a[0] < b[0] else Ordering.WORSE
    if a[1] != b[1]:
        return Ordering.BETTER if a[1] < b[1] else Ordering.WORSE
    return Ordering.EQUIVALENT


def lex_key(solution: CandidateSolution) -> tuple[int, float]:
    """Sort key realizing :func:`lex_better` (best first)."""
    return tuple(solution.objectives)
