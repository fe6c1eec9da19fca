"""Categorical time series data model: ingestion, validation, synthesis, sharding.

A dataset holds N series of identical length T, each taking integer levels
in {0, ..., J-1}, with a non-negative survey weight and free-form string
attributes per series.  Ingestion order is preserved and is the reference
ordering for cluster labels.

All randomness (sharding, synthesis) uses numpy's PCG64 generator seeded
through SeedSequence, so results are reproducible across platforms and
runs for a fixed seed.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field

import numpy as np


class DatasetError(ValueError):
    """Malformed or inconsistent dataset input."""


_MAGIC = b"CTS1"

ARCHETYPES = ("C1", "C2", "C3")

# archetype shapes as (start fraction, level) breakpoints over [0, 1);
# C1 stays home except a short afternoon excursion, C2 stays out through
# the final minute, C3 is the home/travel/out/travel/home workday with
# transitions at the quarter marks
_TEMPLATE_SEGMENTS = {
    "C1": ((0.0, 0), (0.50, 1), (0.52, 2), (0.66, 1), (0.68, 0)),
    "C2": ((0.0, 0), (0.375, 1), (0.5, 2)),
    "C3": ((0.0, 0), (0.25, 1), (0.375, 2), (0.75, 1), (0.875, 0)),
}


@dataclass
class CategoricalSeries:
    """One respondent's per-minute level sequence with weight and attributes."""

    id: str
    values: np.ndarray
    weight: float = 1.0
    attributes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.ndim != 1:
            raise DatasetError(f"series {self.id!r}: values must be 1-D")
        if self.weight < 0:
            raise DatasetError(f"series {self.id!r}: negative weight {self.weight}")


@dataclass
class Dataset:
    """Ordered collection of categorical series sharing T and J."""

    series: list[CategoricalSeries]
    T: int
    J: int

    def __post_init__(self):
        if self.J < 2:
            raise DatasetError("J must be at least 2")
        seen: set[str] = set()
        for k, s in enumerate(self.series):
            if len(s.values) != self.T:
                raise DatasetError(
                    f"inconsistent series length at row {k + 1}: "
                    f"expected {self.T}, got {len(s.values)}"
                )
            if s.values.min(initial=0) < 0 or s.values.max(initial=0) >= self.J:
                raise DatasetError(f"level out of range at row {k + 1}")
            if s.id in seen:
                raise DatasetError(f"duplicate series id {s.id!r} at row {k + 1}")
            seen.add(s.id)

    @property
    def N(self) -> int:
        return len(self.series)

    def __len__(self) -> int:
        return len(self.series)

    def values_matrix(self) -> np.ndarray:
        """(N, T) int64 matrix of levels in ingestion order."""
        return np.stack([s.values for s in self.series]) if self.series else np.zeros((0, self.T), dtype=np.int64)

    def weights(self) -> np.ndarray:
        return np.array([s.weight for s in self.series], dtype=np.float64)

    @classmethod
    def from_series(cls, series: list[CategoricalSeries], J: int | None = None) -> "Dataset":
        """Build a dataset, inferring T from the first series and J from the data if absent."""
        if not series:
            raise DatasetError("dataset must contain at least one series")
        t = len(series[0].values)
        if J is None:
            J = max(2, 1 + max(int(s.values.max(initial=0)) for s in series))
        return cls(series=series, T=t, J=int(J))


@dataclass(frozen=True)
class ShardPlan:
    """Randomized assignment of N series to S shards.

    `order` is the without-replacement sampling order: order[k] is the
    0-based original index of the k-th sampled series.  The first
    shard_sizes[0] sampled series form shard 0, the next shard_sizes[1]
    shard 1, and so on; all shards but the last have floor(N/S) series
    and the last absorbs the remainder.
    """

    S: int
    order: np.ndarray
    shard_sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "order", np.asarray(self.order, dtype=np.int64))

    @property
    def N(self) -> int:
        return len(self.order)

    @property
    def shard_of(self) -> np.ndarray:
        """(N,) array mapping original series index to its shard."""
        out = np.empty(self.N, dtype=np.int64)
        start = 0
        for s, size in enumerate(self.shard_sizes):
            out[self.order[start : start + size]] = s
            start += size
        return out

    def shard_indices(self, s: int) -> np.ndarray:
        """Original indices of shard s, in sampled order."""
        start = int(sum(self.shard_sizes[:s]))
        return self.order[start : start + self.shard_sizes[s]]

    def restore(self, concatenated: np.ndarray) -> np.ndarray:
        """Realign values from shard-concatenation order back to ingestion order."""
        concatenated = np.asarray(concatenated)
        if len(concatenated) != self.N:
            raise ValueError("length does not match the plan")
        out = np.empty_like(concatenated)
        out[self.order] = concatenated
        return out


def make_shard_plan(n: int, s: int, seed: int) -> ShardPlan:
    """Sample the N series indices without replacement and split them into S shards.

    Deterministic for fixed (n, s, seed): the order is a PCG64 permutation
    of 0..n-1.  Shards 0..S-2 get floor(n/s) series each; the last shard
    gets the remainder.
    """
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= S <= N, got S={s}, N={n}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    order = rng.permutation(n)
    base = n // s
    sizes = tuple([base] * (s - 1) + [n - (s - 1) * base])
    return ShardPlan(S=s, order=order, shard_sizes=sizes)


def archetype_template(archetype: str, t: int) -> np.ndarray:
    """Noise-free level template of one synthetic archetype at length t."""
    if archetype not in _TEMPLATE_SEGMENTS:
        raise ValueError(f"unknown archetype {archetype!r}")
    if t < 2:
        raise ValueError("template length must be at least 2")
    out = np.zeros(t, dtype=np.int64)
    segments = _TEMPLATE_SEGMENTS[archetype]
    for (frac, level), nxt in zip(segments, segments[1:] + ((1.0, None),)):
        out[int(np.floor(frac * t)) : int(np.floor(nxt[0] * t))] = level
    return out


def generate_synthetic(n_per_archetype: int, t: int, noise: float, seed: int) -> Dataset:
    """Plant three archetypal daily patterns with per-minute flip noise.

    Produces 3 * n_per_archetype series (all C1, then C2, then C3), each a
    copy of its archetype template with every minute independently flipped
    to a uniformly random other level with probability `noise`.  The
    planted archetype is stored in attributes["truth"].
    """
    if n_per_archetype < 1:
        raise ValueError("n_per_archetype must be positive")
    if t < 2:
        raise ValueError("T must be at least 2")
    if not 0.0 <= noise < 0.5:
        raise ValueError("noise must lie in [0, 0.5)")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    j = 3
    series: list[CategoricalSeries] = []
    for arch in ARCHETYPES:
        template = archetype_template(arch, t)
        block = np.tile(template, (n_per_archetype, 1))
        flips = rng.random((n_per_archetype, t)) < noise
        shifts = rng.integers(1, j, size=(n_per_archetype, t))
        block = np.where(flips, (block + shifts) % j, block)
        for i in range(n_per_archetype):
            series.append(
                CategoricalSeries(
                    id=f"{arch.lower()}-{i:05d}",
                    values=block[i],
                    weight=1.0,
                    attributes={"truth": arch},
                )
            )
    return Dataset(series=series, T=t, J=j)


def save_dataset(dataset: Dataset, path, format: str = "csv") -> None:
    """Write a dataset in the canonical CSV or the length-prefixed binary format."""
    if format == "csv":
        _save_csv(dataset, path)
    elif format == "binary":
        _save_binary(dataset, path)
    else:
        raise ValueError(f"unknown format {format!r}")


def load_dataset(path, format: str = "csv") -> Dataset:
    """Read a dataset written by `save_dataset`, validating every row.

    Raises DatasetError with the offending 1-based data row number on
    malformed rows, out-of-range levels, inconsistent lengths, or negative
    weights.
    """
    if format == "csv":
        return _load_csv(path)
    if format == "binary":
        return _load_binary(path)
    raise ValueError(f"unknown format {format!r}")


def _save_csv(dataset: Dataset, path) -> None:
    attr_names = sorted({k for s in dataset.series for k in s.attributes})
    header = ["id", "w", "J"] + [f"attr:{a}" for a in attr_names] + [
        f"t{k}" for k in range(dataset.T)
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for s in dataset.series:
            row = [s.id, repr(float(s.weight)), dataset.J]
            row += [s.attributes.get(a, "") for a in attr_names]
            row += [int(v) for v in s.values]
            writer.writerow(row)


def _load_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file") from None
        if not header or header[0] != "id":
            raise DatasetError("first column must be 'id'")
        attr_cols: dict[int, str] = {}
        level_cols: list[int] = []
        w_col = j_col = None
        for k, name in enumerate(header[1:], start=1):
            if name == "w":
                w_col = k
            elif name == "J":
                j_col = k
            elif name.startswith("attr:"):
                attr_cols[k] = name[len("attr:") :]
            else:
                level_cols.append(k)
        if not level_cols:
            raise DatasetError("no level columns declared in header")

        declared_j: int | None = None
        series: list[CategoricalSeries] = []
        for rownum, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise DatasetError(
                    f"malformed row {rownum}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                weight = float(row[w_col]) if w_col is not None else 1.0
            except ValueError:
                raise DatasetError(f"malformed row {rownum}: bad weight {row[w_col]!r}") from None
            if weight < 0:
                raise DatasetError(f"negative weight at row {rownum}")
            if j_col is not None:
                try:
                    row_j = int(row[j_col])
                except ValueError:
                    raise DatasetError(f"malformed row {rownum}: bad J {row[j_col]!r}") from None
                if declared_j is None:
                    declared_j = row_j
                elif row_j != declared_j:
                    raise DatasetError(f"inconsistent J at row {rownum}")
            try:
                values = np.array([int(row[k]) for k in level_cols], dtype=np.int64)
            except ValueError:
                raise DatasetError(f"malformed row {rownum}: non-integer level") from None
            if values.min() < 0 or (declared_j is not None and values.max() >= declared_j):
                raise DatasetError(f"level out of range at row {rownum}")
            attributes = {name: row[k] for k, name in attr_cols.items() if row[k] != ""}
            series.append(
                CategoricalSeries(id=row[0], values=values, weight=weight, attributes=attributes)
            )
        if not series:
            raise DatasetError("dataset contains no rows")
    return Dataset.from_series(series, J=declared_j)


def _save_binary(dataset: Dataset, path) -> None:
    if dataset.J > 256:
        raise DatasetError("binary format stores levels as single bytes (J <= 256)")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<III", dataset.N, dataset.T, dataset.J))
        for s in dataset.series:
            ident = s.id.encode("utf-8")
            fh.write(struct.pack("<I", len(ident)))
            fh.write(ident)
            fh.write(struct.pack("<d", float(s.weight)))
            fh.write(struct.pack("<I", len(s.attributes)))
            for key in sorted(s.attributes):
                kb = key.encode("utf-8")
                vb = s.attributes[key].encode("utf-8")
                fh.write(struct.pack("<I", len(kb)))
                fh.write(kb)
                fh.write(struct.pack("<I", len(vb)))
                fh.write(vb)
            fh.write(s.values.astype(np.uint8).tobytes())


def _read_exact(fh, n: int, rownum: int) -> bytes:
    buf = fh.read(n)
    if len(buf) != n:
        raise DatasetError(f"malformed row {rownum}: truncated file")
    return buf


def _load_binary(path) -> Dataset:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise DatasetError("not a binary dataset file (bad magic)")
        n, t, j = struct.unpack("<III", _read_exact(fh, 12, 0))
        series: list[CategoricalSeries] = []
        for rownum in range(1, n + 1):
            (id_len,) = struct.unpack("<I", _read_exact(fh, 4, rownum))
            ident = _read_exact(fh, id_len, rownum).decode("utf-8")
            (weight,) = struct.unpack("<d", _read_exact(fh, 8, rownum))
            if weight < 0:
                raise DatasetError(f"negative weight at row {rownum}")
            (n_attrs,) = struct.unpack("<I", _read_exact(fh, 4, rownum))
            attributes = {}
            for _ in range(n_attrs):
                (klen,) = struct.unpack("<I", _read_exact(fh, 4, rownum))
                key = _read_exact(fh, klen, rownum).decode("utf-8")
                (vlen,) = struct.unpack("<I", _read_exact(fh, 4, rownum))
                attributes[key] = _read_exact(fh, vlen, rownum).decode("utf-8")
            values = np.frombuffer(_read_exact(fh, t, rownum), dtype=np.uint8).astype(np.int64)
            if values.max(initial=0) >= j:
                raise DatasetError(f"level out of range at row {rownum}")
            series.append(
                CategoricalSeries(id=ident, values=values, weight=weight, attributes=attributes)
            )
        if fh.read(1):
            raise DatasetError("trailing bytes after final series")
    if not series:
        raise DatasetError("dataset contains no rows")
    return Dataset(series=series, T=t, J=j)
