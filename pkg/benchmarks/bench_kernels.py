"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (degree-preserving edge shuffle, exposure
counting) on synthetic graphs of increasing size. The backend is picked
per-call here, bypassing the HCAT_DISABLE_NUMBA process-level switch,
so one process times both.

Usage: python benchmarks/bench_kernels.py [--edges 1000000] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hcat.cascade import INF_TIME
from hcat.kernels import njit_kernels, numpy_kernels
from hcat.synthdata import random_directed_graph


def _shuffle_args(graph, seed):
    src = graph.edge_sources().copy()
    dst = graph.targets.copy()
    cls = graph.covid_flag[dst].astype(np.int8)
    return src, dst, cls


def bench_shuffle(kern, graph, factor, seed):
    src, dst, cls = _shuffle_args(graph, seed)
    attempts = int(round(factor * graph.n_edges))
    t0 = time.perf_counter()
    accepted = kern.shuffle_edges(
        src, dst, cls, np.int64(graph.n_nodes), np.int64(attempts), np.uint64(seed)
    )
    return time.perf_counter() - t0, int(accepted)


def bench_exposure(kern, graph, seed):
    rng = np.random.Generator(np.random.PCG64(seed))
    n = graph.n_nodes
    t_act = np.full(n, INF_TIME, dtype=np.int64)
    active = rng.random(n) < 0.2
    t_act[active] = rng.integers(0, 1000, size=int(active.sum()))
    cutoff = np.full(n, 1000, dtype=np.int64)
    cutoff[active] = t_act[active]
    mask = active.astype(np.uint8)
    src = graph.targets
    dst = graph.edge_sources()
    t0 = time.perf_counter()
    out = kern.exposure_counts(src, dst, mask, t_act, cutoff, np.int64(n))
    return time.perf_counter() - t0, int(out.sum())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edges", type=int, default=1_000_000)
    ap.add_argument("--nodes", type=int, default=100_000)
    ap.add_argument("--factor", type=float, default=10.0)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"graph: {args.nodes} nodes, {args.edges} edges; "
          f"shuffle budget {args.factor} x edges")
    graph = random_directed_graph(args.nodes, args.edges, seed=args.seed)

    backends = (("numba", njit_kernels), ("numpy", numpy_kernels))
    # first numba call includes jit compilation; warm it outside the timing
    njit_kernels.shuffle_edges(
        *_shuffle_args(graph, 0)[:3], np.int64(graph.n_nodes), np.int64(16), np.uint64(1)
    )

    print(f"{'kernel':<10} {'backend':<8} {'best_s':>10} {'per_item_ns':>12}  detail")
    for name, kern in backends:
        best, acc = min(
            bench_shuffle(kern, graph, args.factor, args.seed + r)
            for r in range(args.repeat)
        )
        per = best / (args.factor * args.edges) * 1e9
        print(f"{'shuffle':<10} {name:<8} {best:>10.3f} {per:>12.1f}  accepted={acc}")
    for name, kern in backends:
        best, total = min(
            bench_exposure(kern, graph, args.seed + r) for r in range(args.repeat)
        )
        per = best / args.edges * 1e9
        print(f"{'exposure':<10} {name:<8} {best:>10.3f} {per:>12.1f}  exposures={total}")


if __name__ == "__main__":
    main()
