"""Command-line interface: dataset generation, ground truth, build, tune,
search, benchmarking, instrumentation, and the verification experiments.

Every subcommand is seeded (default 42) and, at --threads 1, its computed
outputs (datasets, graphs, ids, counts) are bit-for-bit reproducible from the
flags and input files; timing fields are wall-clock and hardware-dependent.
Relative paths are resolved against $SNG_DATA_DIR when it is set.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments, instrument, tuner
from .dataset import (
    GroundTruth,
    VecsFormatError,
    brute_force_knn,
    gen_gmm,
    gen_uniform,
    read_fvecs,
    read_ivecs,
    write_fvecs,
    write_ivecs,
)
from .graph import (
    BuildParams,
    GraphFormatError,
    build_full_sng,
    build_vamana,
    load_graph,
    save_graph,
    search_many,
    sng_neighbors,
)

__all__ = ["main"]


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.is_absolute():
        return p
    return Path(os.environ.get("SNG_DATA_DIR", ".")) / p


def _int_list(text: str):
    try:
        values = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _load_dataset(args, attr="data"):
    return read_fvecs(_resolve(getattr(args, attr)))


def cmd_gen_uniform(args) -> int:
    ds = gen_uniform(args.n, args.d, args.rho, seed=args.seed)
    write_fvecs(_resolve(args.out), ds)
    print(f"wrote {ds.n} x {ds.dim} uniform-ball vectors (rho={args.rho}) to {args.out}")
    return 0


def cmd_gen_gmm(args) -> int:
    ds = gen_gmm(args.n, args.d, clusters=args.clusters, spread=args.spread, seed=args.seed)
    write_fvecs(_resolve(args.out), ds)
    print(f"wrote {ds.n} x {ds.dim} GMM vectors ({args.clusters} clusters, spread={args.spread}) to {args.out}")
    return 0


def cmd_gt(args) -> int:
    base = _load_dataset(args, "base")
    queries = _load_dataset(args, "queries")
    gt = brute_force_knn(base, queries, k=args.k, threads=args.threads)
    write_ivecs(_resolve(args.out), gt.ids.astype(np.int32))
    print(f"wrote exact top-{args.k} ids for {queries.n} queries to {args.out}")
    if args.out_dists:
        from .dataset import VectorDataset

        write_fvecs(_resolve(args.out_dists), VectorDataset(gt.distances))
        print(f"wrote squared distances to {args.out_dists}")
    return 0


def cmd_build(args) -> int:
    ds = _load_dataset(args)
    t0 = time.perf_counter()
    if args.kind == "vamana":
        if args.r is None:
            raise ValueError("vamana build requires --r (try `tune` first)")
        g = build_vamana(ds, BuildParams(alpha=args.alpha, r=args.r, l_build=args.l_build, seed=args.seed))
    else:
        g = build_full_sng(ds, alpha=args.alpha)
    dt = time.perf_counter() - t0
    save_graph(_resolve(args.out), g)
    degs = g.out_degrees()
    print(f"built {args.kind} graph on {g.n} points in {dt:.1f}s "
          f"(degrees min/mean/max = {degs.min()}/{degs.mean():.1f}/{degs.max()}, medoid {g.medoid})")
    print(f"wrote {args.out}")
    return 0


def cmd_tune(args) -> int:
    ds = _load_dataset(args)
    t0 = time.perf_counter()
    rep = tuner.optimize_r(ds, args.alpha1, args.alpha2, seed=args.seed,
                           probe_subsample=args.probe_subsample)
    dt = time.perf_counter() - t0
    print(rep.to_json())
    print(f"tuned in {dt:.1f}s: R* = {rep.r_star} (probe mean degree {rep.r_bar:.2f})", file=sys.stderr)
    if args.out:
        _resolve(args.out).write_text(rep.to_json() + "\n")
    return 0


def cmd_search(args) -> int:
    ds = _load_dataset(args)
    g = load_graph(_resolve(args.graph))
    queries = _load_dataset(args, "queries")
    ids, dists, hops = search_many(g, ds, queries, g.medoid, l=args.l, k=args.k, threads=args.threads)
    if args.out:
        write_ivecs(_resolve(args.out), ids.astype(np.int32))
        print(f"wrote top-{args.k} ids for {queries.n} queries to {args.out} "
              f"(mean hops {hops.mean():.2f})")
    else:
        for i in range(queries.n):
            pairs = " ".join(f"{ids[i, j]}:{dists[i, j]:.6g}" for j in range(args.k))
            print(f"query {i} (hops {hops[i]}): {pairs}")
    return 0


def cmd_bench(args) -> int:
    ds = _load_dataset(args)
    queries = _load_dataset(args, "queries")
    if args.gt:
        gt_ids = read_ivecs(_resolve(args.gt)).astype(np.int64)
        if gt_ids.shape[1] < args.k:
            raise ValueError(f"ground truth has {gt_ids.shape[1]} columns, need k={args.k}")
        gt = GroundTruth(ids=gt_ids, distances=np.zeros(gt_ids.shape, dtype=np.float64))
    else:
        print("no --gt given: computing brute-force ground truth", file=sys.stderr)
        gt = brute_force_knn(ds, queries, k=args.k, threads=args.threads)

    summary = {"tuner": args.tuner, "alpha": args.alpha, "k": args.k, "seed": args.seed}
    if args.r is not None:
        r_star, tune_s = args.r, 0.0
    elif args.tuner == "analytic":
        t0 = time.perf_counter()
        rep = tuner.optimize_r(ds, args.alpha, args.alpha, seed=args.seed,
                               probe_subsample=args.probe_subsample)
        tune_s = time.perf_counter() - t0
        r_star = rep.r_star
        summary["probe_r_bar"] = rep.r_bar
    else:
        r_hi = min(args.r_hi, ds.n - 1)
        t0 = time.perf_counter()
        gold = tuner.golden_section_tune(ds, queries, gt, alpha=args.alpha,
                                         l_search=max(args.l_values), k=args.k,
                                         r_lo=args.r_lo, r_hi=r_hi,
                                         seed=args.seed, threads=args.threads)
        tune_s = time.perf_counter() - t0
        r_star = gold.r_star
        summary["tuner_builds"] = len(gold.evaluations)
    summary.update({"r_star": r_star, "tune_s": tune_s})

    t0 = time.perf_counter()
    g = build_vamana(ds, BuildParams(alpha=args.alpha, r=r_star, seed=args.seed))
    summary["build_s"] = time.perf_counter() - t0

    rows = experiments.bench_sweep(g, ds, queries, gt, args.l_values, k=args.k, threads=args.threads)
    print(f"# tuner={args.tuner} r_star={r_star} tune_s={tune_s:.2f} build_s={summary['build_s']:.2f}")
    print("# latency columns are wall-clock microseconds (hardware-dependent)")
    header = ["l", "recall_at_k", "qps", "mean_latency_us", "p99_latency_us"]
    print(" ".join(f"{h:>16}" for h in header))
    for row in rows:
        print(f"{row['l']:>16d} {row['recall_at_k']:>16.4f} {row['qps']:>16.0f} "
              f"{row['mean_latency_us']:>16.1f} {row['p99_latency_us']:>16.1f}")
    if args.csv:
        with open(_resolve(args.csv), "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=header)
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {args.csv}")
    if args.json:
        summary["sweep"] = rows
        instrument.write_json_summary(_resolve(args.json), summary)
        print(f"wrote {args.json}")
    return 0


def cmd_trace(args) -> int:
    ds = _load_dataset(args)
    traces = []
    for owner in args.owners:
        if not 0 <= owner < ds.n:
            raise ValueError(f"owner {owner} out of range [0, {ds.n})")
        tr = instrument.PruningTrace(owner=owner)
        nbrs = sng_neighbors(ds, owner, args.alpha, r_cap=args.r_cap, trace=tr)
        traces.append(tr)
        status = "complete" if tr.is_complete() else "capped"
        print(f"owner {owner}: degree {nbrs.size}, {len(tr)} iterations ({status})")
    instrument.write_trace_csv(_resolve(args.out), traces)
    print(f"wrote {args.out}")
    return 0


def cmd_degrees(args) -> int:
    g = load_graph(_resolve(args.graph))
    st = instrument.degree_stats(g)
    instrument.write_degree_csv(_resolve(args.out), st)
    print(f"degrees over {g.n} nodes: min {st.min}, mean {st.mean:.2f}, max {st.max}")
    print(f"wrote {args.out}")
    return 0


def cmd_paths(args) -> int:
    ds = _load_dataset(args)
    g = load_graph(_resolve(args.graph))
    queries = _load_dataset(args, "queries")
    st = instrument.path_length_stats(g, ds, queries, l=args.l, threads=args.threads)
    instrument.write_paths_csv(_resolve(args.out), st.hops)
    print(f"hops over {queries.n} queries: mean {st.mean_hops:.2f}, p99 {st.p99_hops:.1f}")
    print(f"wrote {args.out}")
    return 0


def cmd_verify(args) -> int:
    artifacts = _resolve(args.artifacts)
    results = experiments.run_criteria(args.criteria, seed=args.seed, artifacts_dir=artifacts)
    for res in results:
        print(experiments.format_result(res))
    artifacts.mkdir(parents=True, exist_ok=True)
    instrument.write_json_summary(artifacts / "verify_results.json", {"results": results})
    print(f"wrote {artifacts / 'verify_results.json'}")
    failed = [r["criterion"] for r in results if not r["passed"]]
    if failed:
        print(f"FAILED criteria: {failed}", file=sys.stderr)
        return 1
    print(f"all {len(results)} criteria passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sng",
        description="Sparse neighborhood graph index: build, tune, search, verify.",
        epilog="Relative paths resolve against $SNG_DATA_DIR when set.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--seed", type=int, default=42, help="rng seed (default 42)")
        return p

    p = add("gen-uniform", cmd_gen_uniform, "sample vectors uniformly from a ball")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--rho", type=float, default=1.0, help="ball radius (default 1.0)")
    p.add_argument("--out", required=True, help="output .fvecs path")

    p = add("gen-gmm", cmd_gen_gmm, "sample vectors from an isotropic Gaussian mixture")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--clusters", type=int, default=10)
    p.add_argument("--spread", type=float, default=0.05, help="per-cluster sigma (default 0.05)")
    p.add_argument("--out", required=True, help="output .fvecs path")

    p = add("gt", cmd_gt, "exact brute-force nearest neighbors")
    p.add_argument("--base", required=True, help="base .fvecs")
    p.add_argument("--queries", required=True, help="query .fvecs")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True, help="output .ivecs of neighbor ids")
    p.add_argument("--out-dists", help="optional .fvecs of squared distances")
    p.add_argument("--threads", type=int, default=1)

    p = add("build", cmd_build, "construct a graph index")
    p.add_argument("--data", required=True, help="base .fvecs")
    p.add_argument("--kind", choices=["vamana", "full-sng"], default="vamana")
    p.add_argument("--alpha", type=float, required=True, help="pruning parameter (>= 1)")
    p.add_argument("--r", type=int, help="degree cap (vamana; required there)")
    p.add_argument("--l-build", type=int, help="build beam width (default max(2R, 50))")
    p.add_argument("--out", required=True, help="output .sng graph path")

    p = add("tune", cmd_tune, "pick the degree cap R* from a probe build")
    p.add_argument("--data", required=True, help="base .fvecs")
    p.add_argument("--alpha1", type=float, required=True, help="probe pruning parameter")
    p.add_argument("--alpha2", type=float, required=True, help="target pruning parameter")
    p.add_argument("--probe-subsample", type=int,
                   help="tune on a seeded m-point subsample (cheaper; default: full data)")
    p.add_argument("--out", help="also write the report JSON here")

    p = add("search", cmd_search, "beam-search queries against a built graph")
    p.add_argument("--graph", required=True, help=".sng graph path")
    p.add_argument("--data", required=True, help="base .fvecs the graph was built on")
    p.add_argument("--queries", required=True, help="query .fvecs")
    p.add_argument("--l", type=int, required=True, help="beam width (>= k)")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="write ids as .ivecs instead of printing")

    p = add("bench", cmd_bench, "tune + build + recall/latency sweep over beam widths")
    p.add_argument("--data", required=True, help="base .fvecs")
    p.add_argument("--queries", required=True, help="query .fvecs")
    p.add_argument("--gt", help="ground-truth .ivecs (computed brute-force when omitted)")
    p.add_argument("--alpha", type=float, default=1.2)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--l-values", type=_int_list, default=[10, 20, 50],
                   help="comma-separated beam widths (default 10,20,50)")
    p.add_argument("--tuner", choices=["analytic", "binary-search"], default="analytic",
                   help="how to pick R (binary-search = golden-section over full builds)")
    p.add_argument("--r", type=int, help="skip tuning and use this cap")
    p.add_argument("--probe-subsample", type=int, help="analytic tuner probe size")
    p.add_argument("--r-lo", type=int, default=8, help="binary-search lower bound")
    p.add_argument("--r-hi", type=int, default=96, help="binary-search upper bound")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv", help="write the sweep table as CSV")
    p.add_argument("--json", help="write a JSON summary")

    p = add("trace", cmd_trace, "record pruning-construction traces for owners")
    p.add_argument("--data", required=True, help="base .fvecs")
    p.add_argument("--owners", type=_int_list, required=True, help="comma-separated owner ids")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--r-cap", type=int, help="optional truncation cap")
    p.add_argument("--out", required=True, help="output CSV (owner,t,s_size,delta,rho)")

    p = add("degrees", cmd_degrees, "out-degree histogram of a built graph")
    p.add_argument("--graph", required=True, help=".sng graph path")
    p.add_argument("--out", required=True, help="output CSV (degree,count)")

    p = add("paths", cmd_paths, "search hop counts from the medoid per query")
    p.add_argument("--graph", required=True, help=".sng graph path")
    p.add_argument("--data", required=True, help="base .fvecs")
    p.add_argument("--queries", required=True, help="query .fvecs")
    p.add_argument("--l", type=int, default=50, help="beam width")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV (query,hops)")

    p = add("verify", cmd_verify, "run the acceptance experiments")
    p.add_argument("--criteria", type=_int_list, help="subset, e.g. 1,2,6 (default: all)")
    p.add_argument("--artifacts", default="artifacts", help="directory for emitted CSV/JSON")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VecsFormatError, GraphFormatError) as exc:
        print(f"error: unreadable input file: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
