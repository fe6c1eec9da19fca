"""Command-line surface: synthesize data, cluster, sweep K, summarize clusters.

Every flag default can be overridden by an environment variable with the
WALSHSCAPE_ prefix (e.g. WALSHSCAPE_SEED=7 walshscape cluster ...); an
explicit flag always wins.  Commands are deterministic given their flags,
exit non-zero on any error, and leave no partial output files behind.

Exit codes: 0 success, 1 usage error, 2 data error, 3 protocol fault.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .dcc import ProtocolError, elbow_sweep, run_dcc
from .series import DatasetError, generate_synthetic, load_dataset, make_shard_plan, save_dataset
from .summarize import composition_table, minute_proportions

ENV_PREFIX = "WALSHSCAPE_"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROTOCOL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise UsageError(message)


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name, default)


def _add_common(p: _Parser) -> None:
    p.add_argument("--seed", type=int, default=int(_env("SEED", 0)), help="master seed (default 0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="walshscape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic three-archetype dataset")
    p.add_argument("--n", type=int, required=True, help="series per archetype")
    p.add_argument("--T", type=int, default=int(_env("T", 1440)), help="minutes per series")
    p.add_argument("--noise", type=float, default=float(_env("NOISE", 0.05)))
    p.add_argument("--out", required=True, help="output dataset file")
    p.add_argument("--format", choices=["csv", "binary"], default=_env("FORMAT", "csv"))
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("cluster", help="cluster a dataset and write labels/centroids/metrics")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--S", type=int, default=int(_env("S", 1)), help="number of shards/workers")
    p.add_argument("--L", type=int, default=int(_env("L", 100)), help="landscape length")
    p.add_argument("--I", type=int, default=int(_env("I", 100)), help="max protocol rounds")
    p.add_argument("--format", choices=["csv", "binary"], default=_env("FORMAT", "csv"))
    p.add_argument("--transport", choices=["inproc", "socket"], default=_env("TRANSPORT", "inproc"))
    _add_common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("elbow", help="sweep K and write the WCSS/timing table")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--K", required=True, help="K values: '2,3,4' or '2-5'")
    p.add_argument("--S", type=int, default=int(_env("S", 1)))
    p.add_argument("--L", type=int, default=int(_env("L", 100)))
    p.add_argument("--I", type=int, default=int(_env("I", 100)))
    p.add_argument("--format", choices=["csv", "binary"], default=_env("FORMAT", "csv"))
    _add_common(p)
    p.set_defaults(func=cmd_elbow)

    p = sub.add_parser("summarize", help="per-minute proportions and composition tables")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", required=True, help="labels.csv from the cluster command")
    p.add_argument("--attributes", default="", help="comma-separated attribute names")
    p.add_argument("--cluster-names", default="", help="optional display names, e.g. '1=in home,2=night'")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["csv", "binary"], default=_env("FORMAT", "csv"))
    p.set_defaults(func=cmd_summarize)

    return parser


def _parse_k_list(text: str) -> list[int]:
    text = text.strip()
    try:
        if "-" in text and "," not in text:
            lo, hi = text.split("-", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"bad K list {text!r}") from None
    if not values or any(v < 1 for v in values):
        raise UsageError(f"bad K list {text!r}")
    return values


def _write_outputs(out_dir: str, files: dict[str, str | bytes]) -> None:
    """Write all files or none: stage to temp names, then rename."""
    os.makedirs(out_dir, exist_ok=True)
    staged = []
    try:
        for name, content in files.items():
            tmp = os.path.join(out_dir, f".tmp-{os.getpid()}-{name}")
            mode = "wb" if isinstance(content, bytes) else "w"
            with open(tmp, mode) as fh:
                fh.write(content)
            staged.append((tmp, os.path.join(out_dir, name)))
        for tmp, final in staged:
            os.replace(tmp, final)
    except BaseException:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        raise


def _centroid_csv(matrix: np.ndarray) -> str:
    return "\n".join(",".join(f"{v:.17g}" for v in row) for row in matrix) + "\n"


def cmd_synth(args) -> None:
    dataset = generate_synthetic(args.n, args.T, args.noise, args.seed)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    os.makedirs(out_dir, exist_ok=True)
    tmp = os.path.join(out_dir, f".tmp-{os.getpid()}-{os.path.basename(args.out)}")
    try:
        save_dataset(dataset, tmp, format=args.format)
        os.replace(tmp, args.out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    print(f"wrote {dataset.N} series (T={dataset.T}, J={dataset.J}) to {args.out}")


def cmd_cluster(args) -> None:
    dataset = load_dataset(args.input, format=args.format)
    result = run_dcc(
        dataset, k=args.K, s=args.S, length=args.L, seed=args.seed,
        max_rounds=args.I, transport=args.transport,
    )
    plan = make_shard_plan(dataset.N, args.S, args.seed)

    labels_csv = "id,label\n" + "".join(
        f"{s.id},{label}\n" for s, label in zip(dataset.series, result.labels)
    )
    order_csv = "position,original_index\n" + "".join(
        f"{pos},{orig}\n" for pos, orig in enumerate(plan.order)
    )
    metrics = {
        "K": args.K, "S": args.S, "L": args.L, "I": args.I, "seed": args.seed,
        "transport": args.transport, "N": dataset.N,
        "wcss": result.wcss,
        "wcss_per_shard": list(result.wcss_per_shard),
        "rounds_used": result.rounds_used,
        "converged": result.converged,
        "feature_seconds": round(result.feature_seconds, 3),
        "kmeans_seconds": round(result.kmeans_seconds, 3),
    }
    _write_outputs(args.out, {
        "labels.csv": labels_csv,
        "order.csv": order_csv,
        "centroids.csv": _centroid_csv(result.centroids.centroids),
        "metrics.json": json.dumps(metrics, indent=2) + "\n",
    })
    print(f"K={args.K} S={args.S} wcss={result.wcss:.6g} rounds={result.rounds_used} "
          f"converged={result.converged} -> {args.out}")


def cmd_elbow(args) -> None:
    dataset = load_dataset(args.input, format=args.format)
    points = elbow_sweep(
        dataset, _parse_k_list(args.K), s=args.S, length=args.L, seed=args.seed, max_rounds=args.I
    )
    table = "K,wcss,feature_seconds,kmeans_seconds\n" + "".join(
        f"{p.K},{p.wcss:.17g},{p.feature_seconds:.3f},{p.kmeans_seconds:.3f}\n" for p in points
    )
    long_rows = ["K,metric,value"]
    for p in points:
        long_rows += [
            f"{p.K},wcss,{p.wcss:.17g}",
            f"{p.K},feature_seconds,{p.feature_seconds:.3f}",
            f"{p.K},kmeans_seconds,{p.kmeans_seconds:.3f}",
        ]
    _write_outputs(args.out, {
        "elbow.csv": table,
        "elbow_long.csv": "\n".join(long_rows) + "\n",
    })
    for p in points:
        print(f"K={p.K} wcss={p.wcss:.6g} ({p.feature_seconds:.3f}s FE + {p.kmeans_seconds:.3f}s K-means)")


def _read_labels(path: str, dataset) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().strip()
        if header != "id,label":
            raise DatasetError(f"bad labels file header {header!r}")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    if len(rows) != dataset.N:
        raise DatasetError(f"labels file has {len(rows)} rows, dataset has {dataset.N}")
    for row, s in zip(rows, dataset.series):
        if row[0] != s.id:
            raise DatasetError(f"labels file id {row[0]!r} does not match dataset id {s.id!r}")
    return np.array([int(r[1]) for r in rows], dtype=np.int64)


def _parse_names(text: str) -> dict[int, str]:
    names = {}
    for part in text.split(","):
        if part.strip():
            idx, name = part.split("=", 1)
            names[int(idx)] = name
    return names


def cmd_summarize(args) -> None:
    dataset = load_dataset(args.input, format=args.format)
    labels = _read_labels(args.labels, dataset)
    k = int(labels.max(initial=1))
    names = _parse_names(args.cluster_names)

    files: dict[str, str | bytes] = {}
    for cluster, table in minute_proportions(dataset, labels, k).items():
        header = "minute," + ",".join(f"level_{j}" for j in range(dataset.J))
        body = "".join(
            f"{minute}," + ",".join(f"{v:.17g}" for v in row) + "\n"
            for minute, row in enumerate(table)
        )
        title = names.get(cluster, f"cluster{cluster}")
        files[f"proportions_{title}.csv"] = header + "\n" + body

    for attribute in [a for a in args.attributes.split(",") if a.strip()]:
        comp = composition_table(dataset, labels, k, attribute)
        body = "cluster,cluster_name,value,weighted_count,share_within_value,share_within_cluster\n"
        for row in comp.rows:
            body += (
                f"{row.cluster},{names.get(row.cluster, f'cluster{row.cluster}')},{row.value},"
                f"{row.weighted_count:.17g},{row.share_within_value:.17g},"
                f"{row.share_within_cluster:.17g}\n"
            )
        files[f"composition_{attribute}.csv"] = body

    _write_outputs(args.out, files)
    print(f"wrote {len(files)} summary files to {args.out}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProtocolError as exc:
        print(f"protocol fault: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL
    except (DatasetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
