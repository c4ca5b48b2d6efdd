"""Wall time of the NR2 greedy loop against k on a large sparse graph.

The factorization is timed once; each k reuses it, so the loop cost should
grow linearly in k.
"""

import argparse
import time

import numpy as np

from nr2rank.graph import PlantedPartitionSpec, generate_planted_partition
from nr2rank.rankers import RankParams, nr2_factorize, nr2_rank


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--clusters", type=int, default=50)
    ap.add_argument("--size", type=int, default=100)
    ap.add_argument("--p-in", type=float, default=0.08)
    ap.add_argument("--p-out", type=float, default=0.0004)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--ks", default="5,10,20,40,80")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    g = generate_planted_partition(PlantedPartitionSpec(args.clusters, args.size, args.p_in, args.p_out, args.seed))
    print(f"n={g.n} mean degree={(g.num_edges - g.n) / g.n:.2f}")
    t0 = time.perf_counter()
    f = nr2_factorize(g, 0.85)
    print(f"factorization: {time.perf_counter() - t0:.3f} s")
    r = np.full(g.n, 1.0 / g.n)
    ks = [int(k) for k in args.ks.split(",")]
    times = []
    for k in ks:
        best = min(_timed(g, r, k, f) for _ in range(args.repeats))
        times.append(best)
        print(f"k={k:<4} loop {best * 1e3:8.1f} ms  ({best / k * 1e3:.2f} ms/pick)")
    slope, intercept = np.polyfit(ks, times, 1)
    pred = slope * np.array(ks) + intercept
    r2 = 1 - np.sum((np.array(times) - pred) ** 2) / np.sum((np.array(times) - np.mean(times)) ** 2)
    print(f"linear fit: {slope * 1e3:.2f} ms per pick, R^2={r2:.4f}")


def _timed(g, r, k, f):
    t0 = time.perf_counter()
    nr2_rank(g, r, RankParams(k=k), f)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
