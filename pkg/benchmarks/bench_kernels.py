"""Timing comparison of the compiled kernels against their numpy twins.

Run as a script:

    python3 benchmarks/bench_kernels.py [--samples 20000] [--problems 40]

Times the two hot paths -- noisy-angle projector averaging and the
likelihood-ascent reconstruction -- on identical inputs through both
backends.  Set SPINTOMO_NO_NUMBA=1 to confirm the numpy fallback is the
one the package would select.
"""

import argparse
import time

import numpy as np

from spintomo import _kernels
from spintomo.gates import KIND_CODES, GateKind
from spintomo.measure import MeasurementPlan, simulate_counts
from spintomo.qmath import SINGLET, random_density
from spintomo.quorum import mub_quorum, pmatrix
from spintomo.reconstruct import frequencies_of, linear_from_frequencies, seed_square_root


def _time(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_average(samples: int):
    rng = np.random.default_rng(0)
    kinds = [GateKind.EXCHANGE_PULSE, GateKind.GRADIENT_Z, GateKind.ESR_X_QUBIT1]
    codes = np.array([KIND_CODES[k] for k in kinds], dtype=np.int64)
    angles = rng.normal(0.3, 0.4, size=(samples, len(kinds)))
    base = SINGLET.projector()

    rows = []
    t_np = _time(lambda: _kernels.average_conjugated_numpy(codes, angles, base))
    rows.append(("numpy", t_np))
    if _kernels.average_conjugated_numba is not None:
        _kernels.average_conjugated_numba(codes, angles[:8], base)  # JIT warm-up
        t_nb = _time(lambda: _kernels.average_conjugated_numba(codes, angles, base))
        rows.append(("numba", t_nb))
    return rows


def bench_mle(problems: int):
    q = mub_quorum()
    pm = pmatrix(q)
    projs = np.ascontiguousarray(q.matrices())
    nw = np.full(15, 1.0 / 15.0)
    cases = []
    for seed in range(problems):
        rho = random_density(seed)
        records = simulate_counts(rho, MeasurementPlan(q.projectors, 500, seed))
        m = frequencies_of(records)
        t0 = seed_square_root(linear_from_frequencies(m, pm))
        cases.append((m, t0))

    def run(fn):
        for m, t0 in cases:
            fn(projs, m, nw, t0, 1e-8, 10000)

    rows = []
    t_np = _time(lambda: run(_kernels.mle_ascend_numpy), repeats=3)
    rows.append(("numpy", t_np))
    if _kernels.mle_ascend_numba is not None:
        m0, t00 = cases[0]
        _kernels.mle_ascend_numba(projs, m0, nw, t00, 1e-8, 100)  # JIT warm-up
        t_nb = _time(lambda: run(_kernels.mle_ascend_numba), repeats=3)
        rows.append(("numba", t_nb))
    return rows


def _print_table(title, rows, unit_note):
    print(f"\n{title} ({unit_note})")
    base = dict(rows).get("numpy")
    for name, t in rows:
        speed = f"  ({base / t:.1f}x vs numpy)" if name == "numba" else ""
        print(f"  {name:<6} {t * 1e3:9.2f} ms{speed}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20000,
                        help="angle samples for the averaging kernel")
    parser.add_argument("--problems", type=int, default=40,
                        help="reconstruction problems for the ascent kernel")
    args = parser.parse_args()

    print(f"active backend: {_kernels.ACTIVE_BACKEND}")
    if _kernels.average_conjugated_numba is None:
        print("numba path unavailable; timing the numpy path only")

    _print_table(
        "noisy-angle projector averaging",
        bench_average(args.samples),
        f"{args.samples} samples, 3 gates, best of 5",
    )
    _print_table(
        "likelihood-ascent reconstruction",
        bench_mle(args.problems),
        f"{args.problems} problems at 500 shots, best of 3",
    )


if __name__ == "__main__":
    main()
