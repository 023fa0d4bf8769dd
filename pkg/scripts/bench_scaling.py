"""Inference time against edge count at fixed node count, with a linear fit.

The default grid is the desk-scale check; pass larger lists for a manual run
(e.g. --nodes 10000000 --edges 100000000 on a big machine).
"""

import argparse

import numpy as np

from isirgn import TrainConfig, store, train
from isirgn.cli import bench_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model")
    ap.add_argument("--nodes", type=int, default=10_000)
    ap.add_argument("--edges", type=int, nargs="+", default=[100_000, 200_000, 400_000, 800_000])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--threads", type=int)
    args = ap.parse_args()

    model = store.load(args.model) if args.model else train(
        TrainConfig(g=20, m=1000, d=10, c=100, p=100))
    rows = list(bench_rows(model, [args.nodes], args.edges, args.repeats, threads=args.threads))
    print("n_nodes,n_edges,seconds")
    for n, e, s in rows:
        print(f"{n},{e},{s:.4f}")
    e = np.array([r[1] for r in rows], dtype=float)
    s = np.array([r[2] for r in rows])
    slope, intercept = np.polyfit(e, s, 1)
    print(f"# fit: seconds = {intercept:.4f} + {slope * 1e6:.4f} * |E| / 1e6")
    print(f"# per-doubling ratios: {np.round(s[1:] / s[:-1], 3).tolist()}")


if __name__ == "__main__":
    main()
