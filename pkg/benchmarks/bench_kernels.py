"""Time the compiled and numpy weight-space kernels against each other.

    python3 benchmarks/bench_kernels.py [--space fine] [--workers 1] [--repeat 3]

Runs a full top-3 frequency pass over the bundled 11-VM fixture for every
available backend, checks the counts agree and prints the best wall time.
"""
import argparse
import time

import numpy as np

from vmrank._kernels import BACKENDS
from vmrank.catalog import DEFAULT_CATALOG, DEFAULT_RUNS, load_matrix
from vmrank.weightspace import WeightSpaceSpec, top_k_frequency


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--space", choices=["aggregate", "fine_grain", "fine"], default="fine_grain")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    space = "fine_grain" if args.space == "fine" else args.space

    matrix = load_matrix(DEFAULT_CATALOG, DEFAULT_RUNS)
    card = WeightSpaceSpec(space).cardinality
    print(f"{space}: {card:,} weight vectors, {len(matrix.vms)} VMs, {len(matrix.attributes)} attributes, "
          f"{args.workers} worker(s)")
    print(f"{'mode':<5}{'execution':<12}{'backend':<9}{'best s':>9}{'vectors/s':>14}")

    for mode in ("P", "PC"):
        for execution in ("sequential", "parallel"):
            reference = None
            for name in sorted(BACKENDS):
                times = []
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    ft = top_k_frequency(matrix, None, space, mode, execution, 3, workers=args.workers, backend=name)
                    times.append(time.perf_counter() - t0)
                if reference is None:
                    reference = ft.counts
                elif not np.array_equal(reference, ft.counts):
                    raise SystemExit(f"backend {name} disagrees on {mode}/{execution}")
                best = min(times)
                print(f"{mode:<5}{execution:<12}{name:<9}{best:>9.3f}{card / best:>14,.0f}")
    if len(BACKENDS) < 2:
        print("compiled kernels not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
