"""End-to-end acceptance checks, one summary line per criterion.

Each test measures one contracted property at its stated tolerance,
prints a single PASS/FAIL line (visible with ``pytest -s``), and then
asserts.  Runtime-capped criteria time themselves and fail on overrun.
"""

import time

import numpy as np

from spintomo.dotmodel import (
    DotParams,
    exact_exchange_splitting,
    exchange_J,
    hamiltonian6,
    min_singlet_gap,
)
from spintomo.gates import Circuit, Gate, GateKind, evolve_projector
from spintomo.measure import (
    born_probabilities,
    degrade_projector,
    plan_shots,
    sample_frequencies,
)
from spintomo.qmath import (
    SINGLET,
    UP_DOWN,
    UP_UP,
    DensityMatrix,
    pauli_assemble,
    pauli_expand,
    random_density,
    random_pure,
    state_fidelity,
    stream,
)
from spintomo.quorum import (
    DET_UPPER_BOUND,
    Projector,
    Quorum,
    _closed_form_matrix,
    constrained_random_state,
    james_quorum,
    mub_bases,
    mub_preparations,
    mub_quorum,
    orthogonality_witness,
    pmatrix,
    pmatrix_entries,
)
from spintomo.reconstruct import (
    covariance_bound,
    covariance_predict,
    degraded_marginal_rho4,
    linear_from_frequencies,
    mle_from_frequencies,
    mle_reconstruct,
)
from spintomo.measure import ShotRecord
from spintomo.quorum import accessible_subspace_dimension


def _report(num: int, passed: bool, detail: str) -> None:
    print(f"{'PASS' if passed else 'FAIL'} criterion {num:02d}: {detail}")
    assert passed, f"criterion {num:02d}: {detail}"


def test_criterion_01_quorum_determinants():
    t0 = time.perf_counter()
    d_mub = abs(pmatrix(mub_quorum()).det)
    d_james = abs(pmatrix(james_quorum()).det)
    elapsed = time.perf_counter() - t0
    dev = max(abs(d_mub - 1.0 / 32.0), abs(d_james - 1.0 / 512.0))
    ok = dev <= 1e-12 and elapsed < 1.0
    _report(
        1,
        ok,
        f"|det| deviations from 1/32 and 1/512: {dev:.2e} (tol 1e-12); "
        f"{elapsed:.2f} s (cap 1 s)",
    )


def test_criterion_02_circuit_projector_cross_check():
    dev = 0.0
    budget_ok = True
    for j, prep in enumerate(mub_preparations(), start=1):
        circuit_proj = prep.prepared_state().projector()
        dev = max(dev, float(np.max(np.abs(circuit_proj - _closed_form_matrix(j)))))
        esr = [g for g in prep.circuit.gates if g.kind == GateKind.ESR_X_QUBIT1]
        if j <= 3:
            budget_ok &= not esr
        else:
            budget_ok &= len(esr) == 1 and abs(esr[0].angle) == np.pi / 4
    ok = dev <= 1e-12 and budget_ok
    _report(
        2,
        ok,
        f"circuit vs closed-form projectors: max dev {dev:.2e} (tol 1e-12); "
        f"one pi/4 resonant pulse each for states 4-15: {budget_ok}",
    )


def test_criterion_03_unbiased_basis_overlaps():
    bases = mub_bases()
    worst = 0.0
    for bi in range(5):
        for si in range(4):
            for bj in range(5):
                for sj in range(4):
                    ov = abs(bases[bi][si].overlap(bases[bj][sj])) ** 2
                    target = (1.0 if si == sj else 0.0) if bi == bj else 0.25
                    worst = max(worst, abs(ov - target))
    ok = worst <= 1e-12
    _report(3, ok, f"400 pairwise overlaps: max dev {worst:.2e} (tol 1e-12)")


def test_criterion_04_tau_witness_and_strict_det_bound():
    family = [UP_UP] + [constrained_random_state(s) for s in range(1000)]
    report = orthogonality_witness(family)
    sums_dev = report.max_sum_deviation
    dets = [
        abs(np.linalg.det(pmatrix_entries(mub_quorum()))),
        abs(np.linalg.det(pmatrix_entries(james_quorum()))),
    ]
    for trial in range(100):
        projs = tuple(
            Projector(random_pure(1000 + 100 * trial + i).projector(), f"R{i:02d}")
            for i in range(15)
        )
        dets.append(abs(np.linalg.det(pmatrix_entries(Quorum("random", projs)))))
    worst_det = max(dets)
    ok = sums_dev <= 1e-10 and worst_det < DET_UPPER_BOUND
    _report(
        4,
        ok,
        f"tau partial sums vs 3/8 over 1000 constrained states: "
        f"max dev {sums_dev:.2e} (tol 1e-10); "
        f"max |det| {worst_det:.4f} < {DET_UPPER_BOUND:.4f} (strict)",
    )


def test_criterion_05_accessible_subspace_dimensions():
    no_esr = accessible_subspace_dimension(esr_allowed=False)
    with_esr = accessible_subspace_dimension(esr_allowed=True)
    ok = no_esr == 5 and with_esr == 15
    _report(5, ok, f"operator-span ranks: {no_esr} (want 5), {with_esr} (want 15)")


def test_criterion_06_evolution_closed_forms():
    worst = 0.0
    for angle in (0.0, np.pi / 4, np.pi / 2, np.pi):
        u = Circuit((Gate(GateKind.EXCHANGE_PULSE, angle),)).unitary()
        lhs = evolve_projector(u, UP_DOWN.projector())
        coeffs = np.zeros(16)
        coeffs[0] = 0.5
        coeffs[15] = -0.5
        coeffs[12] = 0.5 * np.cos(angle)
        coeffs[3] = -0.5 * np.cos(angle)
        coeffs[6] = 0.5 * np.sin(angle)
        coeffs[9] = -0.5 * np.sin(angle)
        worst = max(worst, float(np.max(np.abs(lhs - pauli_assemble(coeffs)))))

        u = Circuit((Gate(GateKind.GRADIENT_Z, angle),)).unitary()
        lhs = evolve_projector(u, SINGLET.projector())
        coeffs = np.zeros(16)
        coeffs[0] = 0.5
        coeffs[15] = -0.5
        coeffs[5] = -0.5 * np.cos(angle)
        coeffs[10] = -0.5 * np.cos(angle)
        coeffs[6] = -0.5 * np.sin(angle)
        coeffs[9] = 0.5 * np.sin(angle)
        worst = max(worst, float(np.max(np.abs(lhs - pauli_assemble(coeffs)))))
    ok = worst <= 1e-12
    _report(
        6,
        ok,
        f"exchange and gradient conjugation closed forms at four angles: "
        f"max dev {worst:.2e} (tol 1e-12)",
    )


def test_criterion_07_round_trip_and_rms_slope():
    t0 = time.perf_counter()
    q = mub_quorum()
    pm = pmatrix(q)
    worst = 0.0
    for seed in range(100):
        rho = random_density(seed)
        m = born_probabilities(rho, q.projectors)
        worst = max(
            worst,
            float(np.max(np.abs(linear_from_frequencies(m, pm) - rho.matrix))),
        )
    rho = random_density(42)
    true_c = pauli_expand(rho.matrix)[1:]
    shot_grid = (10**3, 10**4, 10**5)
    rms = []
    for n in shot_grid:
        freqs = sample_frequencies(rho, q.projectors, n, seed=7, reps=60)
        coeffs = (freqs - 0.25) @ pm.inverse.T
        rms.append(float(np.sqrt(np.mean((coeffs - true_c[None, :]) ** 2))))
    slope = float(np.polyfit(np.log10(shot_grid), np.log10(rms), 1)[0])
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and abs(slope + 0.5) <= 0.1 and elapsed < 60.0
    _report(
        7,
        ok,
        f"100 exact round trips: max entry error {worst:.2e} (tol 1e-10); "
        f"RMS error slope vs shots {slope:.3f} (want -0.5 +/- 0.1); "
        f"{elapsed:.1f} s (cap 60 s)",
    )


def test_criterion_08_covariance_prediction():
    t0 = time.perf_counter()
    q = mub_quorum()
    pm = pmatrix(q)
    rho = random_density(5)
    n, reps = 1000, 10000
    freqs = sample_frequencies(rho, q.projectors, n, seed=3, reps=reps)
    coeffs = (freqs - 0.25) @ pm.inverse.T
    emp = np.cov(coeffs, rowvar=False, ddof=1)
    pred = covariance_predict(rho, pm, n)
    rel = float(np.max(np.abs(np.diag(emp) - np.diag(pred)) / np.diag(pred)))
    bound = covariance_bound(pm, n)
    max_entry = max(float(np.max(np.abs(emp))), float(np.max(np.abs(pred))))
    elapsed = time.perf_counter() - t0
    ok = rel <= 0.10 and max_entry <= bound and elapsed < 120.0
    _report(
        8,
        ok,
        f"empirical vs predicted covariance diagonal ({reps} reps, {n} shots): "
        f"max rel dev {rel:.3f} (tol 0.10); max |entry| {max_entry:.2e} <= "
        f"bound {bound:.2e}; {elapsed:.1f} s (cap 120 s)",
    )


def test_criterion_09_degradation_and_planning():
    q = mub_quorum()
    erase_dev = max(
        float(np.max(np.abs(degrade_projector(p, 0.5).matrix - np.eye(4) / 4.0)))
        for p in q.projectors
    )

    rho = random_density(7)
    truth = pauli_expand(rho.matrix)[4]
    f = 0.8
    pa = float(np.trace(degrade_projector(q.projectors[3], f).matrix @ rho.matrix).real)
    pb = float(np.trace(degrade_projector(q.projectors[5], f).matrix @ rho.matrix).real)
    n, reps = 1000, 1000
    rng = stream("acceptance-marginal", 0)
    sa = rng.binomial(n, pa, size=reps) / n
    sb = rng.binomial(n, pb, size=reps) / n
    ests = np.array([degraded_marginal_rho4(a, b, f) for a, b in zip(sa, sb)])
    bias = abs(float(np.mean(ests)) - truth)
    se = float(np.std(ests, ddof=1)) / np.sqrt(reps)

    planned = plan_shots(0.05, 0.05, 1.0)
    ok = erase_dev == 0.0 and bias <= 3.0 * se and planned == 1476
    _report(
        9,
        ok,
        f"half-fidelity readout erases exactly (dev {erase_dev:.1e}); "
        f"marginal coefficient bias {bias:.2e} <= 3 se = {3 * se:.2e} "
        f"({reps} reps); planned runs {planned} (want 1476)",
    )


def test_criterion_10_dot_model_physics():
    gap_probe = DotParams(0.0, 1.0, 1e-3, (0, 0, 0), (0, 0, 0))
    gap = min_singlet_gap(gap_probe, (0.9, 1.1))
    gap_dev = abs(gap - 2.0 * np.sqrt(2.0) * 1e-3)

    # relative error of the perturbative exchange scales as (t/U)^2;
    # 12 bounds the measured ratio constant at this detuning (about 8.9)
    ratios = []
    for t in np.logspace(-4, -1.5, 8):
        p = DotParams(0.5, 1.0, float(t), (0, 0, 0), (0, 0, 0))
        rel = abs(exchange_J(p) - exact_exchange_splitting(p)) / exact_exchange_splitting(p)
        ratios.append(rel / (t / p.U) ** 2)
    max_ratio = float(np.max(ratios))

    triplet_dev = 0.0
    for t in (0.01, 0.05, 0.2):
        p = DotParams(0.0, 1.0, float(t), (0, 0, 0), (0, 0, 0))
        vals = np.sort(np.abs(np.linalg.eigvalsh(hamiltonian6(p))))
        triplet_dev = max(triplet_dev, float(vals[2]))

    ok = gap_dev <= 1e-8 and max_ratio <= 12.0 and triplet_dev <= 1e-12
    _report(
        10,
        ok,
        f"anticrossing gap dev {gap_dev:.2e} (tol 1e-8); "
        f"exchange rel error / (t/U)^2 max {max_ratio:.2f} (bound 12); "
        f"triplet drift with hopping {triplet_dev:.2e} (tol 1e-12)",
    )


def test_criterion_11_mle_physicality_and_fidelity():
    q = mub_quorum()
    worst_eig = 0.0
    worst_trace = 0.0
    for successes in (0, 50):
        records = [
            ShotRecord.from_counts(p.label, 50, successes) for p in q.projectors
        ]
        res = mle_reconstruct(records, q)
        mat = res.rho_mle.matrix  # DensityMatrix construction validates
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(mat)[0]))
        worst_trace = max(worst_trace, abs(float(np.trace(mat).real) - 1.0))

    worst_fid = 1.0
    for truth in (
        DensityMatrix(random_pure(0).projector()),
        DensityMatrix(random_pure(3).projector()),
        random_density(12),
    ):
        m = born_probabilities(truth, q.projectors)
        res = mle_from_frequencies(m, 10**6, q)
        worst_fid = min(worst_fid, state_fidelity(res.rho_mle, truth))

    ok = worst_eig >= -1e-12 and worst_trace <= 1e-12 and worst_fid > 1.0 - 1e-6
    _report(
        11,
        ok,
        f"degenerate all-zero/all-success records stay physical "
        f"(min eig {worst_eig:.1e}, trace dev {worst_trace:.1e}); "
        f"exact-input fidelity {worst_fid:.9f} > 1 - 1e-6",
    )
