"""Divide-and-combine K-means: S shard workers, one coordinator.

Each round, every worker runs K-means on its shard's landscape features
(round 1 from a uniform-range initialization with a worker-specific seed,
later rounds from the consensus centroids broadcast by the coordinator)
and reports its K centroids plus a labels-changed flag.  The coordinator
clusters the S*K reported centroids into K consensus centroids and
broadcasts them; the loop ends when every worker reports unchanged labels
or after I rounds.  Final labels are the workers' last retained
assignments, realigned to the dataset's ingestion order, and the total
WCSS is the sum of the per-shard values.

Per-worker seeds derive deterministically from (seed, worker_id), so
results do not depend on execution order or transport.  The in-process
transport drives workers directly; the socket transport (see `wire`)
runs them as separate processes and must produce identical results.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .features import (
    DEFAULT_LANDSCAPE_LENGTH,
    FeatureMatrix,
    build_features,
    local_ranges,
    reduce_global_range,
)
from .kmeans import Assignment, CentroidSet, init_uniform, lloyd, wcss_total
from .series import Dataset, ShardPlan, make_shard_plan

DEFAULT_MAX_ROUNDS = 100
DEFAULT_KMEANS_ITERS = 1000


class ProtocolError(RuntimeError):
    """A worker failed to report or a message was malformed."""


@dataclass(frozen=True)
class RoundMessage:
    """One worker's report for one round: centroids plus a labels-changed flag."""

    worker_id: int
    round: int
    centroids: CentroidSet
    flag: int

    def __post_init__(self):
        if self.flag not in (0, 1):
            raise ValueError("flag must be 0 or 1")
        if self.round == 1 and self.flag != 1:
            raise ValueError("round 1 always sets the flag")


@dataclass(frozen=True)
class ClusterResult:
    """Outcome of one divide-and-combine run.

    labels are in 1..K and aligned to the dataset's ingestion order;
    wcss is the sum over shards; centroids is the last consensus set the
    coordinator computed; worker_centroids/wcss_per_shard keep each
    worker's final state so the total is auditable.
    """

    labels: np.ndarray
    wcss: float
    centroids: CentroidSet
    rounds_used: int
    converged: bool
    worker_centroids: tuple[CentroidSet, ...]
    wcss_per_shard: tuple[float, ...]
    feature_seconds: float
    kmeans_seconds: float


@dataclass(frozen=True)
class ElbowPoint:
    K: int
    wcss: float
    feature_seconds: float
    kmeans_seconds: float


def derive_seed(seed: int, stream: int) -> int:
    """Deterministic, platform-independent seed for one worker (coordinator = 0)."""
    ss = np.random.SeedSequence([int(seed), int(stream)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def worker_round(
    shard_features: FeatureMatrix,
    incoming: CentroidSet | None,
    k: int,
    seed: int,
    round_index: int,
    worker_id: int = 1,
    prev: Assignment | None = None,
    max_iters: int = DEFAULT_KMEANS_ITERS,
) -> tuple[RoundMessage, Assignment]:
    """Run one worker's K-means pass for one round.

    Round 1 initializes centroids uniformly on the shard's feature ranges
    with the worker's derived seed and always raises the flag; later
    rounds start from the incoming consensus centroids and raise the flag
    only if any label differs from the previous round's assignment.

    Returns the message for the coordinator and the retained assignment.
    """
    if round_index < 1:
        raise ValueError("round_index starts at 1")
    if (incoming is None) != (round_index == 1):
        raise ValueError("consensus centroids are present exactly when round > 1")
    if incoming is None:
        start = init_uniform(shard_features, k, seed)
    else:
        if incoming.L != shard_features.L:
            raise ValueError(
                f"dimension mismatch: features have L={shard_features.L}, "
                f"incoming centroids L={incoming.L}"
            )
        start = incoming
    assignment, centroids = lloyd(shard_features, start, max_iters=max_iters)
    if round_index == 1:
        flag = 1
    else:
        flag = 0 if prev is not None and np.array_equal(assignment.labels, prev.labels) else 1
    message = RoundMessage(worker_id=worker_id, round=round_index, centroids=centroids, flag=flag)
    return message, assignment


def master_consensus(
    messages: list[RoundMessage],
    k: int,
    seed: int,
    shard_sizes: tuple[int, ...] | None = None,
    max_iters: int = DEFAULT_KMEANS_ITERS,
) -> CentroidSet:
    """Cluster the S*K reported centroids into K consensus centroids.

    The reported centroids are treated as points (unit weight by default;
    pass shard_sizes to weight each worker's centroids by its shard size)
    and clustered by the same K-means with a uniform-range initialization.
    The K results are ordered by the smallest input row assigned to each
    cluster, so a coordinator fed an already-stable centroid set returns
    it unchanged.

    Raises ProtocolError if the worker reports are not exactly 1..S.
    """
    if not messages:
        raise ProtocolError("no worker messages")
    by_worker = {m.worker_id: m for m in messages}
    s = len(messages)
    if sorted(by_worker) != list(range(1, s + 1)):
        missing = set(range(1, s + 1)) - set(by_worker)
        raise ProtocolError(f"missing worker message(s): {sorted(missing)}")
    stacked = np.vstack([by_worker[wid].centroids.centroids for wid in range(1, s + 1)])
    weights = None
    if shard_sizes is not None:
        if len(shard_sizes) != s:
            raise ProtocolError("shard_sizes must have one entry per worker")
        weights = np.repeat(np.asarray(shard_sizes, dtype=np.float64), k)
    assignment, centroids = lloyd(
        stacked, init_uniform(stacked, k, seed), max_iters=max_iters, sample_weight=weights
    )
    # canonical order: by first input row assigned to each cluster
    first_row = np.full(k, len(stacked), dtype=np.int64)
    for row, label in enumerate(assignment.labels):
        if first_row[label - 1] == len(stacked):
            first_row[label - 1] = row
    order = np.lexsort((np.arange(k), first_row))
    return CentroidSet(centroids=centroids.centroids[order])


def _prepare_features(
    dataset: Dataset, s: int, length: int, seed: int
) -> tuple[ShardPlan, list[FeatureMatrix], float]:
    t0 = time.perf_counter()
    plan = make_shard_plan(dataset.N, s, seed)
    shards = [[dataset.series[i] for i in plan.shard_indices(si)] for si in range(s)]
    ranges = [local_ranges(shard) for shard in shards]
    global_range = reduce_global_range(ranges)  # all-shards barrier
    matrices = [build_features(shard, global_range, length) for shard in shards]
    return plan, matrices, time.perf_counter() - t0


def _run_rounds(
    matrices: list[FeatureMatrix],
    k: int,
    seed: int,
    max_rounds: int,
    weight_by_shard_size: bool,
    kmeans_iters: int,
):
    """Round loop over in-process workers; returns the combined final state."""
    s = len(matrices)
    worker_seeds = [derive_seed(seed, wid) for wid in range(1, s + 1)]
    master_seed = derive_seed(seed, 0)
    shard_sizes = tuple(len(m) for m in matrices) if weight_by_shard_size else None

    retained: list[Assignment | None] = [None] * s
    messages: list[RoundMessage] = []
    consensus: CentroidSet | None = None
    converged = False
    rounds_used = 0
    for i in range(1, max_rounds + 1):
        messages = []
        for wid in range(1, s + 1):
            msg, retained[wid - 1] = worker_round(
                matrices[wid - 1],
                consensus if i > 1 else None,
                k,
                worker_seeds[wid - 1],
                i,
                worker_id=wid,
                prev=retained[wid - 1],
                max_iters=kmeans_iters,
            )
            messages.append(msg)
        rounds_used = i
        if all(m.flag == 0 for m in messages):
            converged = True
            break
        consensus = master_consensus(
            messages, k, master_seed, shard_sizes=shard_sizes, max_iters=kmeans_iters
        )
    assert consensus is not None  # round 1 always flags, so a consensus exists
    assignments = [a for a in retained if a is not None]
    worker_centroids = tuple(m.centroids for m in messages)
    return assignments, worker_centroids, consensus, rounds_used, converged


def run_dcc(
    dataset: Dataset,
    k: int,
    s: int,
    length: int = DEFAULT_LANDSCAPE_LENGTH,
    seed: int = 0,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    transport: str = "inproc",
    weight_consensus_by_shard_size: bool = False,
    kmeans_iters: int = DEFAULT_KMEANS_ITERS,
) -> ClusterResult:
    """Full pipeline: shard, extract features, iterate the round loop, combine.

    Deterministic for fixed (dataset, k, s, length, seed, max_rounds).
    converged is False only when the loop hit max_rounds with some flag
    still raised; the last state is returned either way.
    """
    if k < 1:
        raise ValueError("K must be at least 1")
    plan, matrices, feature_seconds = _prepare_features(dataset, s, length, seed)

    t0 = time.perf_counter()
    if transport == "inproc":
        assignments, worker_centroids, consensus, rounds_used, converged = _run_rounds(
            matrices, k, seed, max_rounds, weight_consensus_by_shard_size, kmeans_iters
        )
    elif transport == "socket":
        from .wire import run_socket_rounds

        assignments, worker_centroids, consensus, rounds_used, converged = run_socket_rounds(
            matrices, k, seed, max_rounds, weight_consensus_by_shard_size, kmeans_iters
        )
    else:
        raise ValueError(f"unknown transport {transport!r}")
    kmeans_seconds = time.perf_counter() - t0

    labels_shard_order = np.concatenate([a.labels for a in assignments])
    labels = plan.restore(labels_shard_order)
    per_shard = tuple(a.wcss for a in assignments)
    return ClusterResult(
        labels=labels,
        wcss=wcss_total(per_shard),
        centroids=consensus,
        rounds_used=rounds_used,
        converged=converged,
        worker_centroids=worker_centroids,
        wcss_per_shard=per_shard,
        feature_seconds=feature_seconds,
        kmeans_seconds=kmeans_seconds,
    )


def elbow_sweep(
    dataset: Dataset,
    k_list,
    s: int,
    length: int = DEFAULT_LANDSCAPE_LENGTH,
    seed: int = 0,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    kmeans_iters: int = DEFAULT_KMEANS_ITERS,
) -> list[ElbowPoint]:
    """Run the protocol once per K with features computed once and reused."""
    k_list = list(k_list)
    if not k_list:
        raise ValueError("K list must not be empty")
    _, matrices, feature_seconds = _prepare_features(dataset, s, length, seed)
    points = []
    for k in k_list:
        t0 = time.perf_counter()
        assignments, _, _, _, _ = _run_rounds(matrices, k, seed, max_rounds, False, kmeans_iters)
        kmeans_seconds = time.perf_counter() - t0
        points.append(
            ElbowPoint(
                K=k,
                wcss=wcss_total(a.wcss for a in assignments),
                feature_seconds=feature_seconds,
                kmeans_seconds=kmeans_seconds,
            )
        )
    return points
