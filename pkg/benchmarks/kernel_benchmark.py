"""Times the compiled epoch kernel against the pure-numpy fallback.

Usage: python3 benchmarks/kernel_benchmark.py [--n 1000] [--dim 10]
       [--inner 4096] [--repeats 5]

Both engines run the identical inner loop on the identical inputs; the
report shows per-engine wall time and the speedup ratio.
"""

import argparse
import time

import numpy as np

from rssvrg import kernels
from rssvrg.ranking import generate_instance, to_problem
from rssvrg.rng import epoch_stream, index_stream
from rssvrg.smoothing import make_distribution, sample_batch


def build_inputs(n, dim, inner, m=5, seed=0):
    problem = to_problem(generate_instance(n, dim, seed))
    dist = make_distribution("gaussian", dim)
    radius = 0.125
    batch = sample_batch(dist, m, radius, epoch_stream(seed, 1), epoch=1)
    U = problem.hinge_diffs
    Z = batch.samples
    x = np.zeros(dim)
    uz = np.ascontiguousarray(U @ Z.T)
    counts = ((U @ x)[:, None] + radius * uz < 1.0).sum(axis=1)
    anchor_coefs = -counts / m
    g_full = U.T @ anchor_coefs / n
    idx = index_stream(seed).integers(0, n, size=inner).astype(np.int64)
    gamma = radius / (25.0 * problem.lipschitz_l0 * np.sqrt(dim))
    return dict(U=U, uz=uz, anchor_coefs=anchor_coefs, g_full=g_full,
                idx=idx, gamma=gamma, radius=radius, lam1=0.01, lam2=0.0)


def time_engine(engine, inputs, repeats):
    dim = inputs["U"].shape[1]
    best = float("inf")
    for _ in range(repeats):
        x = np.zeros(dim)
        x_sum = np.zeros(dim)
        t0 = time.perf_counter()
        bad = engine.svrg_epoch(inputs["U"], inputs["uz"],
                                inputs["anchor_coefs"], inputs["g_full"],
                                inputs["idx"], x, x_sum, inputs["gamma"],
                                inputs["radius"], inputs["lam1"],
                                inputs["lam2"])
        elapsed = time.perf_counter() - t0
        assert bad < 0
        best = min(best, elapsed)
    return best, x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--dim", type=int, default=10)
    ap.add_argument("--inner", type=int, default=4096)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    inputs = build_inputs(args.n, args.dim, args.inner)
    results = {}
    for name in kernels.available_backends():
        engine = kernels.get_engine(name)
        best, x_final = time_engine(engine, inputs, args.repeats)
        results[name] = (best, x_final)
        print(f"{name:8s} {best * 1e3:9.3f} ms "
              f"({args.inner / best:,.0f} steps/s)")

    if len(results) == 2:
        t_np, x_np = results["numpy"]
        t_cy, x_cy = results["cython"]
        drift = float(np.max(np.abs(x_np - x_cy)))
        print(f"speedup  {t_np / t_cy:9.2f}x   max|dx| {drift:.3e}")
    else:
        print("compiled backend unavailable; timed numpy only")


if __name__ == "__main__":
    main()
