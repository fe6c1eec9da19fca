"""Socket transport for the divide-and-combine protocol.

Workers run as separate processes and talk to the coordinator over
localhost TCP with length-prefixed binary frames (all integers little
endian):

    frame    := u32 payload_length, payload
    payload  := u8 kind, body

    kind 1 SETUP   (coordinator -> worker)
        u32 worker_id, u32 K, u64 seed, u32 kmeans_iters,
        u32 rows, u32 L, rows*L f64 feature matrix (row major)
    kind 2 ROUND   (both directions)
        u32 round, u32 worker_id, u32 K, u32 L,
        K*L f64 centroids (row major), u8 flag
    kind 3 STOP    (coordinator -> worker), empty body
    kind 4 RESULT  (worker -> coordinator)
        u32 worker_id, u32 n, n*u32 labels (1-based), f64 wcss

A worker computes its first round immediately after SETUP; afterwards it
answers every ROUND broadcast with its own ROUND report until STOP, then
sends RESULT.  The transport carries IEEE doubles bit-exactly, so socket
runs produce results identical to the in-process transport.
"""

from __future__ import annotations

import multiprocessing
import socket
import struct

import numpy as np

from .dcc import ProtocolError, RoundMessage, derive_seed, master_consensus, worker_round
from .features import FeatureMatrix
from .kmeans import Assignment, CentroidSet

KIND_SETUP = 1
KIND_ROUND = 2
KIND_STOP = 3
KIND_RESULT = 4

_TIMEOUT = 120.0


def _send_frame(conn: socket.socket, payload: bytes) -> None:
    conn.sendall(struct.pack("<I", len(payload)) + payload)


def _recv_exact(conn: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = conn.recv(n - len(buf))
        if not chunk:
            raise ProtocolError("connection closed mid-frame")
        buf += chunk
    return buf


def _recv_frame(conn: socket.socket) -> bytes:
    (length,) = struct.unpack("<I", _recv_exact(conn, 4))
    return _recv_exact(conn, length)


def pack_setup(worker_id: int, k: int, seed: int, kmeans_iters: int, rows: np.ndarray) -> bytes:
    n, length = rows.shape
    head = struct.pack("<BIIQII", KIND_SETUP, worker_id, k, seed, kmeans_iters, n)
    return head + struct.pack("<I", length) + rows.astype("<f8").tobytes()


def unpack_setup(payload: bytes):
    worker_id, k, seed, kmeans_iters, n = struct.unpack_from("<IIQII", payload, 1)
    (length,) = struct.unpack_from("<I", payload, 25)
    rows = np.frombuffer(payload, dtype="<f8", count=n * length, offset=29).reshape(n, length)
    return worker_id, k, seed, kmeans_iters, rows


def pack_round(message: RoundMessage) -> bytes:
    c = message.centroids.centroids
    head = struct.pack("<BIIII", KIND_ROUND, message.round, message.worker_id, c.shape[0], c.shape[1])
    return head + c.astype("<f8").tobytes() + struct.pack("<B", message.flag)


def unpack_round(payload: bytes) -> RoundMessage:
    round_index, worker_id, k, length = struct.unpack_from("<IIII", payload, 1)
    c = np.frombuffer(payload, dtype="<f8", count=k * length, offset=17).reshape(k, length)
    (flag,) = struct.unpack_from("<B", payload, 17 + 8 * k * length)
    return RoundMessage(
        worker_id=worker_id, round=round_index, centroids=CentroidSet(centroids=c), flag=flag
    )


def pack_result(worker_id: int, labels: np.ndarray, wcss: float) -> bytes:
    head = struct.pack("<BII", KIND_RESULT, worker_id, len(labels))
    return head + labels.astype("<u4").tobytes() + struct.pack("<d", wcss)


def unpack_result(payload: bytes):
    worker_id, n = struct.unpack_from("<II", payload, 1)
    labels = np.frombuffer(payload, dtype="<u4", count=n, offset=9).astype(np.int64)
    (wcss,) = struct.unpack_from("<d", payload, 9 + 4 * n)
    return worker_id, labels, wcss


def worker_entry(host: str, port: int) -> None:
    """Worker process: SETUP, first round, then answer broadcasts until STOP."""
    with socket.create_connection((host, port), timeout=_TIMEOUT) as conn:
        payload = _recv_frame(conn)
        if payload[0] != KIND_SETUP:
            raise ProtocolError("expected SETUP")
        worker_id, k, seed, kmeans_iters, rows = unpack_setup(payload)
        features = FeatureMatrix(rows=rows, D_min=0.0, D_max=1.0)  # bounds unused here

        round_index = 1
        incoming = None
        prev = None
        while True:
            message, prev = worker_round(
                features, incoming, k, seed, round_index,
                worker_id=worker_id, prev=prev, max_iters=kmeans_iters,
            )
            _send_frame(conn, pack_round(message))
            payload = _recv_frame(conn)
            if payload[0] == KIND_STOP:
                _send_frame(conn, pack_result(worker_id, prev.labels, prev.wcss))
                return
            if payload[0] != KIND_ROUND:
                raise ProtocolError(f"unexpected frame kind {payload[0]}")
            broadcast = unpack_round(payload)
            incoming = broadcast.centroids
            round_index = broadcast.round


def run_socket_rounds(
    matrices: list[FeatureMatrix],
    k: int,
    seed: int,
    max_rounds: int,
    weight_by_shard_size: bool,
    kmeans_iters: int,
):
    """Coordinator side; same return shape and values as the in-process loop."""
    s = len(matrices)
    shard_sizes = tuple(len(m) for m in matrices) if weight_by_shard_size else None
    master_seed = derive_seed(seed, 0)

    ctx = multiprocessing.get_context(
        "fork" if "fork" in multiprocessing.get_all_start_methods() else "spawn"
    )
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    procs = []
    conns: list[socket.socket] = []
    try:
        listener.bind(("127.0.0.1", 0))
        listener.listen(s)
        listener.settimeout(_TIMEOUT)
        host, port = listener.getsockname()
        for _ in range(s):
            p = ctx.Process(target=worker_entry, args=(host, port), daemon=True)
            p.start()
            procs.append(p)
        for _ in range(s):
            conn, _ = listener.accept()
            conn.settimeout(_TIMEOUT)
            conns.append(conn)
        # the wid-th accepted connection serves shard wid; SETUP pins the identity
        for wid, conn in enumerate(conns, start=1):
            _send_frame(
                conn,
                pack_setup(wid, k, derive_seed(seed, wid), kmeans_iters, matrices[wid - 1].rows),
            )

        consensus: CentroidSet | None = None
        messages: list[RoundMessage] = []
        converged = False
        rounds_used = 0
        for i in range(1, max_rounds + 1):
            gathered: dict[int, RoundMessage] = {}
            for conn in conns:
                payload = _recv_frame(conn)
                if payload[0] != KIND_ROUND:
                    raise ProtocolError(f"unexpected frame kind {payload[0]}")
                message = unpack_round(payload)
                if message.round != i:
                    raise ProtocolError(f"worker {message.worker_id} answered round {message.round}, expected {i}")
                gathered[message.worker_id] = message
            if sorted(gathered) != list(range(1, s + 1)):
                raise ProtocolError("missing worker message(s)")
            messages = [gathered[wid] for wid in range(1, s + 1)]
            rounds_used = i
            if all(m.flag == 0 for m in messages):
                converged = True
                break
            consensus = master_consensus(
                messages, k, master_seed, shard_sizes=shard_sizes, max_iters=kmeans_iters
            )
            if i == max_rounds:
                break
            for wid, conn in enumerate(conns, start=1):
                _send_frame(
                    conn,
                    pack_round(
                        RoundMessage(worker_id=wid, round=i + 1, centroids=consensus, flag=1)
                    ),
                )

        results: dict[int, tuple[np.ndarray, float]] = {}
        for conn in conns:
            _send_frame(conn, struct.pack("<B", KIND_STOP))
        for conn in conns:
            payload = _recv_frame(conn)
            if payload[0] != KIND_RESULT:
                raise ProtocolError(f"unexpected frame kind {payload[0]}")
            worker_id, labels, wcss = unpack_result(payload)
            results[worker_id] = (labels, wcss)
        if sorted(results) != list(range(1, s + 1)):
            raise ProtocolError("missing worker result(s)")

        assert consensus is not None
        assignments = [
            Assignment(labels=results[wid][0], wcss=results[wid][1]) for wid in range(1, s + 1)
        ]
        worker_centroids = tuple(m.centroids for m in messages)
        return assignments, worker_centroids, consensus, rounds_used, converged
    except (OSError, struct.error) as exc:
        raise ProtocolError(f"socket transport failed: {exc}") from exc
    finally:
        for conn in conns:
            conn.close()
        listener.close()
        for p in procs:
            p.join(timeout=10)
            if p.is_alive():
                p.terminate()
