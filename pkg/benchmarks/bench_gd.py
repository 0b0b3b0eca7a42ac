"""Benchmark the gradient-descent kernels against each other.

Runs the same full-batch descent on identical planted low-rank problems with
every available backend (the compiled extension and the NumPy fallback),
checks that their outputs agree bitwise-closely, and prints a timing table.

    python3 benchmarks/bench_gd.py
    python3 benchmarks/bench_gd.py --sizes 30x40 120x160 --iterations 400
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from reqrank._kernels import available_backends


def planted_problem(n_stake: int, n_req: int, rank: int, density: float,
                    n_features: int, seed: int):
    rng = np.random.default_rng(seed)
    grid = rng.uniform(0, 1, (n_stake, rank)) @ rng.uniform(0, 1, (rank, n_req))
    grid = 5.0 * (grid / grid.max())
    mask = rng.random((n_stake, n_req)) < density
    rows, cols = np.nonzero(mask)
    values = grid[rows, cols]
    theta = rng.uniform(-0.05, 0.05, (n_stake, n_features))
    x = rng.uniform(-0.05, 0.05, (n_req, n_features))
    return theta, x, rows, cols, values


def run_backend(module, problem, learning_rate, regularization, iterations):
    theta, x, rows, cols, values = problem
    start = time.perf_counter()
    out_theta, out_x, costs, status = module.run_gd(
        theta.copy(), x.copy(), rows, cols, values,
        learning_rate, regularization, 0.0, iterations)
    elapsed = time.perf_counter() - start
    return out_theta, out_x, costs, status, elapsed


def check_agreement(reference, candidate) -> float:
    worst = 0.0
    for a, b in zip(reference[:2], candidate[:2]):
        worst = max(worst, float(np.max(np.abs(a - b))))
    worst = max(worst, float(np.max(np.abs(
        np.asarray(reference[2]) - np.asarray(candidate[2])))))
    if reference[3] != candidate[3]:
        raise SystemExit(f"status mismatch: {reference[3]} vs {candidate[3]}")
    return worst


def parse_size(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected ROWSxCOLS, e.g. 62x82, got {text!r}") from None


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", nargs="+", type=parse_size,
                        default=[(31, 41), (62, 82), (124, 164), (248, 328)],
                        metavar="RxC", help="matrix sizes (default four scales)")
    parser.add_argument("--rank", type=int, default=3)
    parser.add_argument("--n-features", type=int, default=3)
    parser.add_argument("--density", type=float, default=0.5)
    parser.add_argument("--iterations", type=int, default=500)
    parser.add_argument("--learning-rate", type=float, default=0.002)
    parser.add_argument("--regularization", type=float, default=0.02)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timing repeats; the best run is reported")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}   iterations: {args.iterations}   "
          f"density: {args.density}")
    header = f"{'size':>10} {'cells':>8}"
    for name in backends:
        header += f" {name + ' (s)':>14}"
    if len(backends) > 1:
        header += f" {'speedup':>9} {'max |diff|':>11}"
    print(header)

    for n_stake, n_req in args.sizes:
        problem = planted_problem(n_stake, n_req, args.rank, args.density,
                                  args.n_features, args.seed)
        results = {}
        timings = {}
        for name, module in backends.items():
            best = None
            for _ in range(args.repeats):
                out = run_backend(module, problem, args.learning_rate,
                                  args.regularization, args.iterations)
                best = out if best is None or out[4] < best[4] else best
            results[name] = best
            timings[name] = best[4]
        row = f"{f'{n_stake}x{n_req}':>10} {len(problem[4]):>8}"
        for name in backends:
            row += f" {timings[name]:>14.4f}"
        if len(backends) > 1:
            names = list(backends)
            diff = check_agreement(results[names[0]], results[names[1]])
            row += f" {timings['python'] / timings['compiled']:>8.1f}x"
            row += f" {diff:>11.2e}"
        print(row)


if __name__ == "__main__":
    main()
