#!/usr/bin/env python3
"""Do searches take logarithmically many hops as the dataset grows?

Build a tuned index at doubling dataset sizes and count, per query, how many
times the beam search strictly improves its best candidate on the way from
the medoid to the answer. If navigation cost scales with ln n, doubling the
data should add a roughly constant number of hops — the fitted line against
ln n should be nearly perfect and its increments nearly equal.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from sngraph.dataset import gen_uniform
from sngraph.graph import BuildParams, build_vamana
from sngraph.instrument import path_length_stats, write_paths_csv
from sngraph.tuner import optimize_r


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="demo_out")
    ap.add_argument("--sizes", default="2000,4000,8000,16000")
    ap.add_argument("--queries", type=int, default=300)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--alpha", type=float, default=1.2)
    ap.add_argument("--probe-subsample", type=int, default=1000)
    ap.add_argument("--l", type=int, default=50, help="search beam width")
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sizes = [int(s) for s in args.sizes.split(",")]

    rows = []
    for i, n in enumerate(sizes):
        base = gen_uniform(n, args.d, 1.0, seed=args.seed + i)
        queries = gen_uniform(args.queries, args.d, 1.0, seed=args.seed + 500 + i)
        rep = optimize_r(base, args.alpha, args.alpha, seed=args.seed,
                         probe_subsample=min(args.probe_subsample, n))
        g = build_vamana(base, BuildParams(alpha=args.alpha, r=rep.r_star, seed=args.seed))
        st = path_length_stats(g, base, queries, l=args.l)
        rows.append({"n": n, "r_star": rep.r_star, "mean_hops": st.mean_hops,
                     "p99_hops": st.p99_hops})
        print(f"n={n:6d}: tuned R={rep.r_star:3d}, mean hops {st.mean_hops:.2f}, "
              f"p99 {st.p99_hops:.0f}")
        write_paths_csv(out_dir / f"hops_n{n}.csv", st.hops)

    means = [r["mean_hops"] for r in rows]
    ln_n = np.log(sizes)
    b, a = np.polyfit(ln_n, means, 1)
    fitted = a + b * ln_n
    r2 = 1 - np.sum((means - fitted) ** 2) / np.sum((means - np.mean(means)) ** 2)
    print(f"\nfit: mean_hops = {a:.2f} + {b:.3f} * ln(n), R^2 = {r2:.4f}")
    increments = ", ".join(f"{d:.3f}" for d in np.diff(means))
    print(f"per-doubling increments: [{increments}]"
          f" (a clean log law would add {b * np.log(2):.3f} each time)")

    path = out_dir / "path_growth.csv"
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=["n", "r_star", "mean_hops", "p99_hops"])
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {path} and per-size hop CSVs")


if __name__ == "__main__":
    main()
