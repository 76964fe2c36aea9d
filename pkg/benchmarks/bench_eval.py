"""Benchmark the numba kernel against the pure-numpy fallback.

The workload is the package's real hot loop: evaluating per-party
generator products (the spanning sets behind the rank oracles and
invariance checks) on batches of random states.

    python3 benchmarks/bench_eval.py [--states 2000] [--repeat 3]
"""

import argparse
import time

import numpy as np

from invforge import SystemShape, luip_space
from invforge.kernels import HAS_NUMBA, eval_polys, pack_polys
from invforge.lu import party_products


def run_case(label, polys, states, repeat):
    packed = pack_polys(polys)
    n_terms = int(packed.term_ptr[-1])
    results = {}
    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    for backend in backends:
        eval_polys(packed, states[:8], backend=backend)  # warm up / compile
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            out = eval_polys(packed, states, backend=backend)
            best = min(best, time.perf_counter() - t0)
        results[backend] = (best, out)
    print(
        f"{label:34s} polys={packed.num_polys:5d} terms={n_terms:6d} "
        f"states={states.shape[0]:5d}"
    )
    for backend, (best, _) in results.items():
        evals = packed.num_polys * states.shape[0]
        print(f"    {backend:6s} {best * 1e3:9.1f} ms   {evals / best / 1e6:8.2f} M evals/s")
    if len(results) == 2:
        diff = np.abs(results["numba"][1] - results["numpy"][1]).max()
        speedup = results["numpy"][0] / results["numba"][0]
        print(f"    numba speedup {speedup:5.1f}x   max |difference| {diff:.2e}")
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--states", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not HAS_NUMBA:
        print("numba not available; timing the numpy fallback only\n")

    rng = np.random.default_rng(0)
    cases = [
        ("three-qubit products, half degree 2", SystemShape((2, 2, 2)), 2),
        ("three-qubit products, half degree 3", SystemShape((2, 2, 2)), 3),
    ]
    for label, shape, m in cases:
        polys = party_products(shape, 0, m)
        D = shape.total_dim
        states = rng.standard_normal((args.states, D)) + 1j * rng.standard_normal(
            (args.states, D)
        )
        run_case(label, polys, states, args.repeat)

    shape = SystemShape((2, 2, 2))
    basis = luip_space(shape, 3)
    states = rng.standard_normal((args.states, 8)) + 1j * rng.standard_normal(
        (args.states, 8)
    )
    run_case("degree-6 invariant basis rows", list(basis.polys), states, args.repeat)


if __name__ == "__main__":
    main()
