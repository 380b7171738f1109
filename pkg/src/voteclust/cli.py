"""Command-line surface: extract graphs from vote records, solve, run
baselines, compare partitions, generate benchmarks, and bin agreement values.

Exit codes: 0 on success, 2 for input or validation errors, 3 when the
requested data slice has too few documents to score.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
from pathlib import Path

from .agreement import (
    WeightTable,
    agreement_histogram,
    agreement_matrix,
    read_agreement_csv,
    read_weight_table_csv,
    write_agreement_csv,
    write_histogram_csv,
)
from .analysis import generate_synthetic_votes, nmi, planted_partition, SyntheticSpec
from .community import run_baseline, write_dendrogram_csv
from .errors import DataError, InsufficientDocuments
from .graphs import graph_from_agreement, read_signed_edgelist, write_signed_edgelist
from .ils import IlsConfig, solve, write_trace_csv
from .partition import Partition, imbalance, read_partition_csv, write_partition_csv
from .votes import filter_dataset, load_dataset, save_dataset


def _parse_table(text: str) -> WeightTable:
    if text == "half":
        return WeightTable.half_agreement()
    if text == "neutral":
        return WeightTable.neutral_abstain()
    if text.startswith("custom:"):
        return read_weight_table_csv(text[len("custom:"):])
    raise DataError("--table must be 'half', 'neutral', or 'custom:<path>'")


def _parse_date(text: str, flag: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise DataError(f"{flag} expects an ISO date (YYYY-MM-DD), got {text!r}") from None


def _cmd_extract(args) -> int:
    table = _parse_table(args.table)
    ds = load_dataset(args.documents, args.members, args.votes)
    period = None
    if (args.date_from is None) != (args.date_to is None):
        raise DataError("--from and --to must be given together")
    if args.date_from is not None:
        period = (
            _parse_date(args.date_from, "--from"),
            _parse_date(args.date_to, "--to"),
        )
    if args.policy is not None or period is not None:
        ds = filter_dataset(ds, policy=args.policy, period=period)
    m = agreement_matrix(ds, table, both_cast_denominator=args.both_cast_denominator)
    if args.out_matrix:
        write_agreement_csv(m, args.out_matrix)
    g = graph_from_agreement(m)
    write_signed_edgelist(g, args.out_graph)
    pos = sum(1 for *_rest, s in g.links() if s == "+")
    print(
        f"extracted {g.n_nodes} nodes, {pos} positive / {g.n_links - pos} negative links "
        f"from {ds.n_documents} documents -> {args.out_graph}"
    )
    return 0


def _cmd_solve(args) -> int:
    g = read_signed_edgelist(args.graph)
    cfg = IlsConfig(
        neighbor_visit_probability=args.neighbor_prob,
        perturbation_level=args.perturbation,
        max_iterations_without_improvement=args.patience,
        time_limit=args.time_limit,
        rng_seed=args.seed,
        worker_count=args.workers,
    )
    partition, breakdown, trace = solve(g, cfg)
    write_partition_csv(partition, args.out_partition)
    write_trace_csv(trace, args.out_trace)
    print(
        f"best imbalance {breakdown.total:.6f} "
        f"({breakdown.percent_of_total_weight:.2f}% of total weight), "
        f"{partition.k} clusters, {trace.iterations_run} iterations, "
        f"{trace.wall_time:.2f}s"
    )
    return 0


def _cmd_baseline(args) -> int:
    g = read_signed_edgelist(args.graph)
    report = run_baseline(g, args.algo, args.view, args.filler_weight)
    write_partition_csv(report.partition, args.out_partition)
    if args.out_dendrogram:
        write_dendrogram_csv(report.dendrogram, args.out_dendrogram)
    print(
        f"{args.algo} on {args.view}: {report.k} clusters, "
        f"modularity {report.modularity:.6f}, "
        f"signed imbalance {report.imbalance.total:.6f} "
        f"({report.imbalance.percent_of_total_weight:.2f}%)"
    )
    return 0


def _restrict(p: Partition, node_ids) -> Partition:
    mapping = p.as_mapping()
    missing = [n for n in node_ids if n not in mapping]
    if missing:
        raise DataError(f"partition does not cover node {missing[0]!r}")
    return Partition(node_ids, [mapping[n] for n in node_ids]).normalized()


def _cmd_compare(args) -> int:
    g = read_signed_edgelist(args.graph)
    partitions = [
        _restrict(read_partition_csv(path), g.node_ids) for path in args.partition
    ]
    entries = []
    for path, p in zip(args.partition, partitions):
        b = imbalance(g, p)
        entries.append(
            {
                "path": str(path),
                "imbalance_total": b.total,
                "imbalance_percent": b.percent_of_total_weight,
                "uncut_negative_weight": b.uncut_negative_weight,
                "cut_positive_weight": b.cut_positive_weight,
                "k": p.k,
            }
        )
    matrix = [
        [nmi(a, b) for b in partitions]
        for a in partitions
    ]
    report = {
        "graph": str(args.graph),
        "partitions": entries,
        "nmi": {"labels": [str(p) for p in args.partition], "matrix": matrix},
    }
    with open(args.out_report, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    for entry in entries:
        print(
            f"{entry['path']}: imbalance {entry['imbalance_total']:.6f} "
            f"({entry['imbalance_percent']:.2f}%), k={entry['k']}"
        )
    return 0


def _cmd_synth(args) -> int:
    spec = SyntheticSpec(
        n_members=args.members,
        n_docs=args.docs,
        n_blocs=args.blocs,
        cohesion=args.cohesion,
        abstain_rate=args.abstain,
        absence_rate=args.absence,
        rng_seed=args.seed,
    )
    ds = generate_synthetic_votes(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_dataset(ds, out / "documents.csv", out / "members.csv", out / "votes.csv")
    write_partition_csv(planted_partition(spec), out / "planted.partition.csv")
    print(
        f"wrote {spec.n_members} members x {spec.n_docs} documents "
        f"({spec.n_blocs} blocs) to {out}"
    )
    return 0


def _cmd_histogram(args) -> int:
    m = read_agreement_csv(args.matrix)
    bins = agreement_histogram(m, args.bin_width)
    write_histogram_csv(bins, args.out)
    print(f"wrote {len(bins)} bins covering {sum(c for _, c in bins)} pairs to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voteclust",
        description="Signed graphs from roll-call votes and minimum-imbalance partitioning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="build a signed agreement graph from vote CSVs")
    p.add_argument("--members", required=True)
    p.add_argument("--documents", required=True)
    p.add_argument("--votes", required=True)
    p.add_argument("--table", required=True,
                   help="half, neutral, or custom:<csv path>")
    p.add_argument("--policy", default=None)
    p.add_argument("--from", dest="date_from", default=None, metavar="DATE")
    p.add_argument("--to", dest="date_to", default=None, metavar="DATE")
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-matrix", default=None,
                   help="also write the agreement matrix CSV")
    p.add_argument("--both-cast-denominator", action="store_true",
                   help="average over documents where both members voted, "
                        "instead of all documents")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("solve", help="minimize imbalance with iterated local search")
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--neighbor-prob", type=float, default=0.7)
    p.add_argument("--perturbation", type=int, default=15)
    p.add_argument("--patience", type=int, default=50,
                   help="stop after this many iterations without improvement")
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    p.add_argument("--out-partition", required=True)
    p.add_argument("--out-trace", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("baseline", help="run a community-detection baseline")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", required=True, choices=["fastgreedy", "edgebetweenness"])
    p.add_argument("--view", required=True, choices=["positive", "compneg"])
    p.add_argument("--filler-weight", type=float, default=1.0)
    p.add_argument("--out-partition", required=True)
    p.add_argument("--out-dendrogram", default=None)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("compare", help="score partitions on a graph and against each other")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition", action="append", required=True,
                   help="partition CSV; repeat for pairwise NMI")
    p.add_argument("--out-report", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("synth", help="generate a planted-bloc voting benchmark")
    p.add_argument("--members", type=int, required=True)
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--blocs", type=int, required=True)
    p.add_argument("--cohesion", type=float, required=True)
    p.add_argument("--abstain", type=float, default=0.0)
    p.add_argument("--absence", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("histogram", help="bin the entries of an agreement matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--bin-width", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_histogram)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InsufficientDocuments as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
