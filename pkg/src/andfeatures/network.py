"""Feature-sample networks: CSV ingestion, binarization, construction and I/O.

A feature-sample network is the bipartite graph linking each sample to every
binary feature it activates. Indices are 0-based throughout.
"""

from __future__ import annotations

from bisect import bisect_left
import csv
import io
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Sequence, TextIO

import numpy as np

from .errors import DataError, DomainError, ParseError

if TYPE_CHECKING:
    from .objectives import CandidateSolution

FSN_VERSION = 1
BINNING_SCHEMES = ("quantile", "width")


@dataclass
class RawDataset:
    """Tabular data before binarization.

    Each entry of ``attributes`` is one column: a list of floats for numeric
    columns, a list of strings for categorical ones.
    """

    attributes: list[list]
    labels: list[str] | None = None
    attribute_names: list[str] | None = None

    def __post_init__(self):
        if not self.attributes:
            raise DataError("dataset has no attributes")
        n = len(self.attributes[0])
        if n < 1:
            raise DataError("dataset has no rows")
        for j, col in enumerate(self.attributes):
            if len(col) != n:
                raise DataError(f"attribute {j} has {len(col)} values, expected {n}")
        if self.labels is not None and len(self.labels) != n:
            raise DataError(f"{len(self.labels)} labels for {n} rows")
        if self.attribute_names is None:
            self.attribute_names = [f"a{j}" for j in range(len(self.attributes))]

    @property
    def n_samples(self) -> int:
        return len(self.attributes[0])

    def is_numeric(self, j: int) -> bool:
        return all(isinstance(v, float) for v in self.attributes[j])


@dataclass(frozen=True)
class FeatureOrigin:
    """Where a binary feature came from.

    ``kind`` is ``"bin"`` (``value`` is the bin index among all ``bins``
    intervals and ``interval`` its bounds), ``"category"`` (``value`` is the
    category string) or ``"constant"`` for a constant numeric attribute.
    """

    attribute: int
    name: str
    kind: str
    value: int | str
    interval: tuple[float, float] | None = None

    def describe(self) -> str:
        if self.kind == "bin":
            lo, hi = self.interval
            return f"{self.name}[{lo:g},{hi:g}]"
        if self.kind == "category":
            return f"{self.name}={self.value}"
        return f"{self.name}=const"


@dataclass
class BinaryDataset:
    rows: np.ndarray
    labels: np.ndarray | None = None
    feature_origin: list[FeatureOrigin] = field(default_factory=list)
    class_names: list[str] | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.uint8)
        if self.rows.ndim != 2 or self.rows.shape[0] < 1:
            raise DataError("binary dataset must be a non-empty 2-d matrix")
        if self.rows.shape[1] < 2:
            raise DataError(f"need at least 2 binary features, got {self.rows.shape[1]}")
        if np.any(self.rows > 1):
            raise DataError("binary dataset contains values other than 0/1")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if len(self.labels) != self.rows.shape[0]:
                raise DataError("label count does not match row count")

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class FeatureSampleNetwork:
    """Immutable bipartite graph of samples and binary features.

    ``sample_adj[i]`` lists the features of sample ``i`` and ``feature_adj[j]``
    the samples holding feature ``j``, both strictly ascending.
    """

    n_samples: int
    n_features: int
    sample_adj: tuple[tuple[int, ...], ...]
    feature_adj: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.sample_adj) != self.n_samples:
            raise DataError("sample_adj length differs from n_samples")
        if len(self.feature_adj) != self.n_features:
            raise DataError("feature_adj length differs from n_features")
        for i, adj in enumerate(self.sample_adj):
            if not adj:
                raise DataError(f"sample {i} has no features (degree 0)")
            _check_ascending(adj, self.n_features, f"sample {i}")
        for j, adj in enumerate(self.feature_adj):
            _check_ascending(adj, self.n_samples, f"feature {j}")
        if sum(map(len, self.sample_adj)) != sum(map(len, self.feature_adj)):
            raise DataError("adjacency lists are not transposes")
        for j, adj in enumerate(self.feature_adj):
            for i in adj:
                if not _contains(self.sample_adj[i], j):
                    raise DataError(f"feature {j} lists sample {i} but not vice versa")
        if self.labels is not None and len(self.labels) != self.n_samples:
            raise DataError("label count does not match n_samples")

    @classmethod
    def from_sample_adj(
        cls,
        sample_adj: Sequence[Iterable[int]],
        n_features: int,
        labels: Sequence[int] | None = None,
    ) -> "FeatureSampleNetwork":
        sadj = tuple(tuple(sorted(set(int(j) for j in adj))) for adj in sample_adj)
        fadj: list[list[int]] = [[] for _ in range(n_features)]
        for i, adj in enumerate(sadj):
            for j in adj:
                if not 0 <= j < n_features:
                    raise DataError(f"sample {i}: feature index {j} out of range")
                fadj[j].append(i)
        return cls(
            n_samples=len(sadj),
            n_features=n_features,
            sample_adj=sadj,
            feature_adj=tuple(tuple(a) for a in fadj),
            labels=None if labels is None else tuple(int(c) for c in labels),
        )

    @cached_property
    def degrees(self) -> np.ndarray:
        """Sample degrees k_i as an int array."""
        return np.fromiter((len(a) for a in self.sample_adj), dtype=np.int64, count=self.n_samples)

    @cached_property
    def feature_arrays(self) -> tuple[np.ndarray, ...]:
        """``feature_adj`` as int arrays, for fast intersection."""
        return tuple(np.asarray(a, dtype=np.int64) for a in self.feature_adj)

    @property
    def n_edges(self) -> int:
        return int(self.degrees.sum())

    def incidence(self) -> np.ndarray:
        """Dense 0/1 sample-by-feature matrix."""
        x = np.zeros((self.n_samples, self.n_features), dtype=np.uint8)
        for i, adj in enumerate(self.sample_adj):
            x[i, list(adj)] = 1
        return x


def _check_ascending(adj: Sequence[int], bound: int, what: str) -> None:
    prev = -1
    for v in adj:
        if v <= prev:
            raise DataError(f"{what}: adjacency not strictly ascending")
        prev = v
    if adj and (adj[0] < 0 or adj[-1] >= bound):
        raise DataError(f"{what}: index out of range [0, {bound})")


def _contains(adj: tuple[int, ...], v: int) -> bool:
    k = bisect_left(adj, v)
    return k < len(adj) and adj[k] == v


# --------------------------------------------------------------------------
# ingestion


def _to_float(v: str) -> float | None:
    try:
        return float(v)
    except ValueError:
        return None


def ingest_csv(
    source: TextIO | str,
    delimiter: str = ",",
    has_header: bool = True,
    label_column: str | int | None = None,
) -> RawDataset:
    """Parse delimited text into a :class:`RawDataset`.

    A column is numeric when every value parses as a float; otherwise it is
    categorical. ``label_column`` may be a header name or a 0-based index.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=delimiter)
    header: list[str] | None = None
    records: list[list[str]] = []
    lines: list[int] = []
    width = None
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        row = [c.strip() for c in row]
        if has_header and header is None:
            header = row
            width = len(row)
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", reader.line_num)
        records.append(row)
        lines.append(reader.line_num)
    if not records:
        raise DataError("empty input: no data rows")

    names = header if header is not None else [f"a{j}" for j in range(width)]
    label_idx = None
    if label_column is not None:
        if isinstance(label_column, int) or str(label_column).lstrip("-").isdigit():
            label_idx = int(label_column)
            if label_idx < 0:
                label_idx += width
            if not 0 <= label_idx < width:
                raise DataError(f"label column index {label_column} out of range")
        elif label_column in names:
            label_idx = names.index(label_column)
        else:
            raise DataError(f"label column {label_column!r} not found")

    columns: list[list] = []
    attr_names: list[str] = []
    for j in range(width):
        if j == label_idx:
            continue
        raw = [r[j] for r in records]
        parsed = [_to_float(v) for v in raw]
        columns.append(parsed if all(p is not None for p in parsed) else raw)
        attr_names.append(names[j])
    if not columns:
        raise DataError("no attribute columns besides the label")
    labels = [r[label_idx] for r in records] if label_idx is not None else None
    return RawDataset(columns, labels, attr_names)


# --------------------------------------------------------------------------
# binarization


def _bin_numeric(col: np.ndarray, bins: int, scheme: str) -> tuple[np.ndarray, np.ndarray]:
    """Return (bin index per value, bin edges of length bins+1)."""
    lo, hi = float(col.min()), float(col.max())
    if scheme == "width":
        idx = np.floor((col - lo) / (hi - lo) * bins).astype(np.int64)
        idx = np.clip(idx, 0, bins - 1)
        edges = np.linspace(lo, hi, bins + 1)
    elif scheme == "quantile":
        inner = np.quantile(col, [b / bins for b in range(1, bins)])
        # right-closed intervals: x <= e_1 goes to bin 0
        idx = np.searchsorted(inner, col, side="left").astype(np.int64)
        edges = np.concatenate([[lo], inner, [hi]])
    else:
        raise DomainError(f"unknown binning scheme {scheme!r}; use one of {BINNING_SCHEMES}")
    return idx, edges


def binarize(raw: RawDataset, bins: int = 3, scheme: str = "quantile") -> BinaryDataset:
    """One-hot encode every attribute.

    Numeric attributes are cut into ``bins`` intervals, either equal-frequency
    (``scheme="quantile"``, right-closed intervals between the empirical
    quantiles) or equal-width over ``[min, max]`` (``scheme="width"``, last
    interval closed). Intervals that no sample falls into are dropped.
    Categorical attributes give one feature per distinct value in order of
    first appearance. Every sample activates exactly one feature per attribute.
    """
    if bins < 2:
        raise DomainError(f"bins must be >= 2, got {bins}")
    if scheme not in BINNING_SCHEMES:
        raise DomainError(f"unknown binning scheme {scheme!r}; use one of {BINNING_SCHEMES}")
    n = raw.n_samples
    blocks: list[np.ndarray] = []
    origin: list[FeatureOrigin] = []
    for a, col in enumerate(raw.attributes):
        name = raw.attribute_names[a]
        if raw.is_numeric(a):
            values = np.asarray(col, dtype=float)
            if values.min() == values.max():
                warnings.warn(f"attribute {name!r} is constant; emitting one always-on feature")
                blocks.append(np.zeros(n, dtype=np.int64))
                origin.append(FeatureOrigin(a, name, "constant", 0))
                continue
            idx, edges = _bin_numeric(values, bins, scheme)
            used = np.unique(idx)
            remap = {int(b): k for k, b in enumerate(used)}
            blocks.append(np.array([remap[int(b)] for b in idx], dtype=np.int64))
            origin.extend(
                FeatureOrigin(a, name, "bin", int(b), (float(edges[b]), float(edges[b + 1])))
                for b in used
            )
        else:
            cats: dict[str, int] = {}
            for v in col:
                cats.setdefault(v, len(cats))
            blocks.append(np.array([cats[v] for v in col], dtype=np.int64))
            origin.extend(FeatureOrigin(a, name, "category", c) for c in cats)

    rows = np.zeros((n, len(origin)), dtype=np.uint8)
    offset = 0
    for block in blocks:
        rows[np.arange(n), offset + block] = 1
        offset += int(block.max()) + 1

    labels = class_names = None
    if raw.labels is not None:
        class_names = sorted(set(raw.labels))
        lookup = {c: k for k, c in enumerate(class_names)}
        labels = np.array([lookup[c] for c in raw.labels], dtype=np.int64)
    return BinaryDataset(rows, labels, origin, class_names)


def build_network(data: BinaryDataset) -> FeatureSampleNetwork:
    """Transcribe a binary dataset into a feature-sample network."""
    rows = data.rows
    sample_adj = []
    for i in range(rows.shape[0]):
        adj = tuple(int(j) for j in np.flatnonzero(rows[i]))
        if not adj:
            raise DataError(f"sample {i} has an all-zero row (degree 0)")
        sample_adj.append(adj)
    feature_adj = tuple(tuple(int(i) for i in np.flatnonzero(rows[:, j])) for j in range(rows.shape[1]))
    labels = None if data.labels is None else tuple(int(c) for c in data.labels)
    return FeatureSampleNetwork(rows.shape[0], rows.shape[1], tuple(sample_adj), feature_adj, labels)


# --------------------------------------------------------------------------
# FSN v1 text format


def write_fsn(network: FeatureSampleNetwork, out: TextIO | None = None) -> str:
    """Serialize ``network``; returns the text and also writes it to ``out``."""
    lines = [f"FSN {FSN_VERSION}", f"{network.n_samples} {network.n_features}"]
    lines.extend(f"{i}: {' '.join(map(str, adj))}" for i, adj in enumerate(network.sample_adj))
    if network.labels is not None:
        lines.append("LABELS")
        lines.extend(f"{i}: {c}" for i, c in enumerate(network.labels))
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.write(text)
    return text


def _parse_indexed(line: str, expected: int, lineno: int) -> list[int]:
    head, sep, rest = line.partition(":")
    if not sep:
        raise ParseError("expected 'i: ...'", lineno)
    try:
        i = int(head)
        values = [int(v) for v in rest.split()]
    except ValueError:
        raise ParseError("non-integer token", lineno) from None
    if i != expected:
        raise ParseError(f"expected index {expected}, got {i}", lineno)
    return values


def read_fsn(source: TextIO | str) -> FeatureSampleNetwork:
    if isinstance(source, str):
        source = io.StringIO(source)
    lines = [(k + 1, ln.strip()) for k, ln in enumerate(source.read().splitlines())]
    lines = [(k, ln) for k, ln in lines if ln]
    if not lines:
        raise ParseError("empty FSN stream", 1)
    lineno, first = lines[0]
    parts = first.split()
    if len(parts) != 2 or parts[0] != "FSN":
        raise ParseError("missing 'FSN <version>' header", lineno)
    if parts[1] != str(FSN_VERSION):
        raise ParseError(f"unsupported FSN version {parts[1]} (expected {FSN_VERSION})", lineno)
    if len(lines) < 2:
        raise ParseError("missing 'N D' line", lineno + 1)
    lineno, dims = lines[1]
    try:
        n, d = (int(v) for v in dims.split())
    except ValueError:
        raise ParseError("expected 'N D'", lineno) from None
    body = lines[2:]
    if len(body) < n:
        raise ParseError(f"expected {n} sample lines, found {len(body)}", body[-1][0] if body else lineno)
    sample_adj = []
    for i in range(n):
        lineno, ln = body[i]
        adj = _parse_indexed(ln, i, lineno)
        if not adj:
            raise ParseError(f"sample {i} has no features", lineno)
        for a, b in zip(adj, adj[1:]):
            if b <= a:
                raise ParseError("feature indices not strictly ascending", lineno)
        if adj[0] < 0 or adj[-1] >= d:
            raise ParseError(f"feature index out of range [0, {d})", lineno)
        sample_adj.append(adj)
    labels = None
    rest = body[n:]
    if rest:
        lineno, ln = rest[0]
        if ln != "LABELS":
            raise ParseError("unexpected content after sample block", lineno)
        if len(rest) - 1 != n:
            raise ParseError(f"expected {n} label lines, found {len(rest) - 1}", lineno)
        labels = []
        for i, (lineno, ln) in enumerate(rest[1:]):
            vals = _parse_indexed(ln, i, lineno)
            if len(vals) != 1:
                raise ParseError("expected one class id", lineno)
            labels.append(vals[0])
    return FeatureSampleNetwork.from_sample_adj(sample_adj, d, labels)


# --------------------------------------------------------------------------
# DOT export

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def export_graph_description(
    network: FeatureSampleNetwork,
    enhanced: "CandidateSolution | None" = None,
) -> str:
    """Emit the (optionally enhanced) network as an undirected DOT graph.

    Samples are circles coloured by class, base features squares and
    and-features filled grey squares.
    """
    from .andfeature import connected_samples

    out = ["graph fsn {", "  node [label=\"\"];"]
    for i in range(network.n_samples):
        attrs = "shape=circle"
        if network.labels is not None:
            colour = _PALETTE[network.labels[i] % len(_PALETTE)]
            attrs += f", style=filled, fillcolor=\"{colour}\", class={network.labels[i]}"
        out.append(f"  s{i} [{attrs}];")
    for j in range(network.n_features):
        out.append(f"  f{j} [shape=square];")
    extra: list[tuple[int, ...]] = []
    if enhanced is not None:
        for af in sorted(enhanced.features):
            conn = connected_samples(network, af)
            if len(conn) == 0:
                continue
            members = " ".join(map(str, af))
            out.append(f"  a{len(extra)} [shape=square, style=filled, fillcolor=gray, members=\"{members}\"];")
            extra.append(tuple(int(i) for i in conn))
    for i, adj in enumerate(network.sample_adj):
        out.extend(f"  s{i} -- f{j};" for j in adj)
    for m, conn in enumerate(extra):
        out.extend(f"  s{i} -- a{m};" for i in conn)
    out.append("}")
    return "\n".join(out) + "\n"
