"""And-features: conjunctions of two or more base features.

An and-feature connects to exactly the samples that hold every one of its
member features, i.e. the intersection of the members' posting lists.
"""

from __future__ import annotations

import io
import random
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial
from typing import Iterable, TextIO

import numpy as np

from .errors import BoundsError, DomainError, OracleInfeasible, ParseError
from .network import FeatureSampleNetwork

DEFAULT_ORACLE_BUDGET = 10_000_000


class AndFeature(tuple):
    """Canonical member list of an and-feature: strictly ascending, length >= 2.

    Two and-features are equal iff their member lists are equal, so instances
    can be used directly as set elements and dict keys.
    """

    __slots__ = ()

    def __new__(cls, members: Iterable[int]):
        m = tuple(sorted({int(x) for x in members}))
        if len(m) < 2:
            raise DomainError(f"an and-feature needs at least 2 distinct members, got {m}")
        if m[0] < 0:
            raise DomainError(f"negative member index in {m}")
        return tuple.__new__(cls, m)

    @classmethod
    def _trusted(cls, members: tuple[int, ...]) -> "AndFeature":
        # caller guarantees canonical form
        return tuple.__new__(cls, members)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def order(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return f"AndFeature({list(self)})"


def _intersect(network: FeatureSampleNetwork, af: tuple[int, ...]) -> np.ndarray:
    arrays = network.feature_arrays
    d = network.n_features
    for j in af:
        if not 0 <= j < d:
            raise BoundsError(f"member {j} out of range [0, {d})")
    lists = sorted((arrays[j] for j in af), key=len)
    cur = lists[0]
    for other in lists[1:]:
        if cur.size == 0:
            break
        if other.size == 0:
            return other
        pos = np.searchsorted(other, cur)
        np.minimum(pos, other.size - 1, out=pos)
        cur = cur[other[pos] == cur]
    return cur


def connected_samples(network: FeatureSampleNetwork, af: tuple[int, ...]) -> np.ndarray:
    """Ascending indices of the samples an and-feature connects to.

    Posting lists are intersected shortest first; the loop exits as soon as
    the partial intersection is empty.
    """
    return _intersect(network, af).copy()


class ConnectionCache:
    """Bounded LRU memo of :func:`connected_samples` for one network.

    ``capacity=None`` is unbounded, ``0`` disables caching. Returned arrays are
    read-only and shared. Safe for concurrent use.
    """

    def __init__(self, network: FeatureSampleNetwork, capacity: int | None = 1 << 20):
        if capacity is not None and capacity < 0:
            raise DomainError("cache capacity must be >= 0")
        self.network = network
        self.capacity = capacity

        def compute(af: tuple[int, ...]) -> np.ndarray:
            out = _intersect(network, af).copy()
            out.flags.writeable = False
            return out

        self._lookup = lru_cache(maxsize=capacity)(compute)

    def __call__(self, af: tuple[int, ...]) -> np.ndarray:
        return self._lookup(af)

    get = __call__

    def stats(self) -> dict[str, int]:
        info = self._lookup.cache_info()
        evictions = info.misses - info.currsize if self.capacity != 0 else 0
        return {
            "hits": info.hits,
            "misses": info.misses,
            "size": info.currsize,
            "evictions": evictions,
        }

    def __len__(self) -> int:
        return self._lookup.cache_info().currsize

    def clear(self) -> None:
        self._lookup.cache_clear()


def count_possible_and_features(d: int) -> int:
    """Number of member sets of size >= 2 over ``d`` base features."""
    if d < 2:
        raise DomainError(f"need at least 2 features, got {d}")
    return (1 << d) - d - 1


def order_probability(q: int) -> Fraction:
    """Probability that a sampled and-feature has order ``q``: (q-1)/q!."""
    if q < 2:
        raise DomainError(f"order must be >= 2, got {q}")
    return Fraction(q - 1, factorial(q))


def truncated_order_distribution(d: int) -> dict[int, Fraction]:
    """Order law restricted to the achievable orders 2..d, renormalized."""
    probs = {q: order_probability(q) for q in range(2, d + 1)}
    total = sum(probs.values())
    return {q: p / total for q, p in probs.items()}


def sample_order(d: int, rng: random.Random) -> int:
    # grow while a uniform draw says "continue" (chance 1/q at order q);
    # running past d restarts, which renormalizes the law over 2..d
    while True:
        q = 2
        while rng.random() >= 1.0 - 1.0 / q:
            q += 1
            if q > d:
                break
        if q <= d:
            return q


def sample_and_feature(network: FeatureSampleNetwork | int, rng: random.Random) -> AndFeature:
    """Draw a random and-feature with order law (q-1)/q! truncated to q <= D.

    Members are distinct base features drawn uniformly without replacement.
    The result may connect to no sample.
    """
    d = network if isinstance(network, int) else network.n_features
    if d < 2:
        raise DomainError("need at least 2 features to sample an and-feature")
    q = sample_order(d, rng)
    return AndFeature._trusted(tuple(sorted(rng.sample(range(d), q))))


def oracle_cost(network: FeatureSampleNetwork) -> int:
    """Sum over samples of 2^k_i, the enumeration work bound."""
    return sum(1 << len(adj) for adj in network.sample_adj)


def enumerate_connected_oracle(
    network: FeatureSampleNetwork, budget: int = DEFAULT_ORACLE_BUDGET
) -> set[AndFeature]:
    """Every and-feature with at least one connection.

    An and-feature connects iff its members are a subset of some sample's
    features, so this is the deduplicated union of all size >= 2 subsets of
    every sample's feature set. Refuses with :class:`OracleInfeasible` when
    the enumeration bound exceeds ``budget``.
    """
    cost = oracle_cost(network)
    if cost > budget:
        raise OracleInfeasible(cost, budget)
    found: set[tuple[int, ...]] = set()
    for adj in set(network.sample_adj):
        for q in range(2, len(adj) + 1):
            found.update(combinations(adj, q))
    return {AndFeature._trusted(m) for m in found}


# --------------------------------------------------------------------------
# AFS v1: one and-feature per line


def write_afs(features: Iterable[tuple[int, ...]], out: TextIO | None = None) -> str:
    text = "".join(" ".join(map(str, af)) + "\n" for af in sorted(tuple(f) for f in features))
    if out is not None:
        out.write(text)
    return text


def read_afs(source: TextIO | str, n_features: int | None = None) -> set[AndFeature]:
    if isinstance(source, str):
        source = io.StringIO(source)
    out: set[AndFeature] = set()
    for lineno, line in enumerate(source.read().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            members = [int(v) for v in line.split()]
        except ValueError:
            raise ParseError("non-integer member", lineno) from None
        if len(members) < 2:
            raise ParseError("and-feature needs at least 2 members", lineno)
        if any(b <= a for a, b in zip(members, members[1:])):
            raise ParseError("members not strictly ascending", lineno)
        if members[0] < 0 or (n_features is not None and members[-1] >= n_features):
            raise ParseError(f"member index out of range [0, {n_features})", lineno)
        out.add(AndFeature._trusted(tuple(members)))
    return out
