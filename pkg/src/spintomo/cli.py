"""Command line front end.

Subcommands
-----------
spectrum    six-level energy curves along a detuning sweep (CSV)
quorum      projector set export: Pauli coefficients, P matrix, circuits
tomography  simulate a full tomography run and reconstruct the state
plan        Hoeffding-based run-count table over (delta, p_limit, fidelity)
verify      structural self-checks, one PASS/FAIL line each

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
Every output file carries the tool version and a sha256 of the
canonicalized configuration, so results can be traced to their inputs.
CSV floats are printed with 17 significant digits; JSON numbers are
exact shortest round-trip representations of the same doubles.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .dotmodel import DotParams, spectrum_sweep
from .gates import GateKind
from .measure import (
    MeasurementPlan,
    NoiseModel,
    average_projector,
    born_probabilities,
    degrade_projector,
    plan_shots,
    sample_frequencies,
    simulate_counts,
)
from .qmath import (
    DOWN_DOWN,
    DOWN_UP,
    SINGLET,
    TRIPLET_ZERO,
    UP_DOWN,
    UP_UP,
    DensityMatrix,
    pauli_expand,
    random_density,
    state_fidelity,
    trace_distance,
)
from .quorum import (
    DET_UPPER_BOUND,
    Projector,
    Quorum,
    QuorumDegenerateError,
    _closed_form_matrix,
    accessible_subspace_dimension,
    constrained_random_state,
    gram_schmidt_det_check,
    james_quorum,
    mub_bases,
    mub_preparations,
    mub_quorum,
    orthogonality_witness,
    pmatrix,
    pmatrix_entries,
    quorum_records,
)
from .reconstruct import covariance_predict, mle_from_frequencies, psd_project

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class ConfigError(Exception):
    """Bad or missing configuration; maps to exit code 2."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _round17(x: float) -> float:
    return float(_fmt(float(x)))


def _config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _meta(cfg: dict) -> dict:
    return {
        "tool": "spintomo",
        "version": __version__,
        "config_sha256": _config_hash(cfg),
    }


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        raise ConfigError("this subcommand requires --config")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _check_fields(cfg: dict, required: dict, optional: dict, where: str) -> None:
    unknown = set(cfg) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown {where} fields: {sorted(unknown)}")
    for name in required:
        if name not in cfg:
            raise ConfigError(f"missing {where} field: {name}")
    for name, types in {**required, **optional}.items():
        if name in cfg and not isinstance(cfg[name], types):
            raise ConfigError(f"{where} field {name!r} has the wrong type")


def _write_csv(path: Path, meta: dict, header: str, rows) -> None:
    lines = [f"# {k}={v}" for k, v in meta.items()]
    lines.append(header)
    for row in rows:
        lines.append(",".join(_fmt(x) if isinstance(x, float) else str(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _round_tree(obj):
    """Apply the 17-significant-digit float policy recursively."""
    if isinstance(obj, float):
        return _round17(obj)
    if isinstance(obj, dict):
        return {k: _round_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_tree(v) for v in obj]
    return obj


# ------------------------------------------------------------------ spectrum


def cmd_spectrum(cfg: dict, out: Path) -> int:
    _check_fields(
        cfg,
        required={"dot": dict, "eps_start": (int, float), "eps_stop": (int, float), "eps_count": int},
        optional={},
        where="spectrum config",
    )
    try:
        params = DotParams.from_json(cfg["dot"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg["eps_count"] < 1:
        raise ConfigError("eps_count must be positive")
    grid = np.linspace(float(cfg["eps_start"]), float(cfg["eps_stop"]), cfg["eps_count"])
    levels = spectrum_sweep(params, grid)
    rows = [[float(e)] + [float(x) for x in row] for e, row in zip(grid, levels)]
    _write_csv(out / "spectrum.csv", _meta(cfg), "eps,E1,E2,E3,E4,E5,E6", rows)
    print(f"wrote {out / 'spectrum.csv'} ({len(grid)} detuning points)")
    return EXIT_OK


# -------------------------------------------------------------------- quorum


def _quorum_by_name(name: str) -> Quorum:
    if name == "mub":
        return mub_quorum()
    if name == "james":
        return james_quorum()
    raise ConfigError(f"unknown quorum name {name!r} (expected 'mub' or 'james')")


def cmd_quorum(cfg: dict, out: Path) -> int:
    _check_fields(cfg, required={"name": str}, optional={}, where="quorum config")
    q = _quorum_by_name(cfg["name"])
    pm = pmatrix(q)
    meta = _meta(cfg)

    payload = dict(meta)
    payload["name"] = q.name
    payload["determinant"] = _round17(pm.det)
    payload["abs_determinant"] = _round17(abs(pm.det))
    payload["projectors"] = _round_tree(quorum_records(q))
    _write_json(out / "quorum.json", payload)

    _write_csv(
        out / "pmatrix.csv",
        meta,
        ",".join(f"k{k}" for k in range(1, 16)),
        [[float(x) for x in row] for row in pm.entries],
    )

    if q.name == "mub":
        circuits = []
        for prep in mub_preparations():
            circuits.append(
                {
                    "label": prep.label,
                    "base_state": prep.base_label,
                    "esr_gate_count": prep.circuit.esr_gate_count(),
                    "gates": prep.circuit.to_records(),
                }
            )
        _write_json(out / "circuits.json", dict(meta, circuits=_round_tree(circuits)))

    print(f"quorum {q.name}: |det P| = {_fmt(abs(pm.det))}")
    print(f"wrote {out / 'quorum.json'}, {out / 'pmatrix.csv'}"
          + (f", {out / 'circuits.json'}" if q.name == "mub" else ""))
    return EXIT_OK


# ---------------------------------------------------------------- tomography

_NAMED_STATES = {
    "singlet": SINGLET,
    "triplet_zero": TRIPLET_ZERO,
    "up_up": UP_UP,
    "up_down": UP_DOWN,
    "down_up": DOWN_UP,
    "down_down": DOWN_DOWN,
}


def _truth_from_config(state_cfg: dict) -> DensityMatrix:
    _check_fields(
        state_cfg,
        required={"kind": str},
        optional={"name": str, "seed": int, "rank": int},
        where="state config",
    )
    kind = state_cfg["kind"]
    if kind == "named":
        name = state_cfg.get("name")
        if name == "maximally_mixed":
            return DensityMatrix(np.eye(4) / 4.0)
        if name not in _NAMED_STATES:
            known = sorted(_NAMED_STATES) + ["maximally_mixed"]
            raise ConfigError(f"unknown state name {name!r}; known: {known}")
        return DensityMatrix(_NAMED_STATES[name].projector())
    if kind == "random":
        return random_density(state_cfg.get("seed", 0), state_cfg.get("rank", 4))
    raise ConfigError(f"state kind must be 'named' or 'random', got {kind!r}")


def _effective_quorum(cfg: dict, seed: int) -> tuple:
    """Ideal quorum plus the projectors the detector actually realizes."""
    q = mub_quorum()
    effective = list(q.projectors)
    altered = False
    noise_cfg = cfg.get("noise")
    if noise_cfg is not None:
        try:
            noise = NoiseModel.from_json(noise_cfg)
        except ValueError as exc:
            raise ConfigError(f"bad noise model: {exc}") from exc
        effective = []
        for prep, ideal in zip(mub_preparations(), q.projectors):
            base_proj = Projector(prep.base_state.projector(), prep.base_label)
            avg = average_projector(
                prep.measurement_circuit(), base_proj, noise, seed=seed
            )
            effective.append(
                Projector(avg.projector.matrix, ideal.label, ideal.basis_index,
                          kind="averaged")
            )
        altered = True
    fidelity = cfg.get("readout_fidelity")
    if fidelity is not None:
        effective = [degrade_projector(p, float(fidelity)) for p in effective]
        altered = True
    name = "mub-effective" if altered else q.name
    return q, Quorum(name, tuple(effective), q.states)


def cmd_tomography(cfg: dict, out: Path, seed: int, reps: int, exact: bool) -> int:
    _check_fields(
        cfg,
        required={"state": dict, "shots": (int, list)},
        optional={"readout_fidelity": (int, float), "noise": dict},
        where="tomography config",
    )
    truth = _truth_from_config(cfg["state"])
    fidelity = cfg.get("readout_fidelity")
    if fidelity is not None and not 0.5 < float(fidelity) <= 1.0:
        raise ConfigError("readout_fidelity must lie in (1/2, 1]")

    ideal_q, eff_q = _effective_quorum(cfg, seed)
    pm = pmatrix(eff_q)
    shots = cfg["shots"]
    if isinstance(shots, list):
        if len(shots) != 15 or not all(isinstance(n, int) and n >= 1 for n in shots):
            raise ConfigError("shots list must hold 15 positive integers")
        shots_arr = np.array(shots, dtype=np.int64)
    else:
        if shots < 1:
            raise ConfigError("shots must be positive")
        shots_arr = np.full(15, shots, dtype=np.int64)

    meta = _meta(cfg)
    if exact:
        freqs = born_probabilities(truth, eff_q.projectors)
        records = None
    else:
        plan = MeasurementPlan(eff_q.projectors, tuple(int(n) for n in shots_arr), seed)
        records = simulate_counts(truth, plan)
        freqs = np.array([r.estimate for r in records])

    # both estimators, always: fast linear inversion and the physical MLE
    result = mle_from_frequencies(freqs, shots_arr, eff_q)
    rho_mle = result.rho_mle.matrix
    rho_lin = result.rho_linear
    linear_psd = result.linear_psd
    covariance = result.covariance_predicted

    payload = dict(meta)
    payload["exact"] = bool(exact)
    payload["rho_real"] = _round_tree([[float(x) for x in row] for row in rho_mle.real])
    payload["rho_imag"] = _round_tree([[float(x) for x in row] for row in rho_mle.imag])
    payload["pauli_coeffs"] = _round_tree(
        [float(x) for x in result.rho_mle.pauli_coeffs]
    )
    payload["loglik"] = _round17(result.loglik)
    payload["psd_flag"] = True
    payload["converged"] = result.converged
    payload["iterations"] = result.iterations

    lin_projected = psd_project(rho_lin)
    payload["linear"] = {
        "rho_real": _round_tree([[float(x) for x in row] for row in rho_lin.real]),
        "rho_imag": _round_tree([[float(x) for x in row] for row in rho_lin.imag]),
        "pauli_coeffs": _round_tree(
            [float(x) for x in pauli_expand(0.5 * (rho_lin + rho_lin.conj().T))]
        ),
        "loglik": _round17(_binomial_loglik(freqs, shots_arr, eff_q, rho_lin)),
        "psd_flag": bool(linear_psd),
        "psd_projection_real": _round_tree(
            [[float(x) for x in row] for row in lin_projected.real]
        ),
        "psd_projection_imag": _round_tree(
            [[float(x) for x in row] for row in lin_projected.imag]
        ),
    }

    diag = {
        "mle_trace_distance_to_truth": trace_distance(rho_mle, truth.matrix),
        "mle_fidelity_to_truth": state_fidelity(rho_mle, truth.matrix),
        "linear_max_entry_error": float(np.max(np.abs(rho_lin - truth.matrix))),
        "linear_fidelity_to_truth": (
            state_fidelity(rho_lin, truth.matrix) if linear_psd else None
        ),
    }
    payload["diagnostics"] = _round_tree(diag)

    if records is not None:
        _write_csv(
            out / "records.csv",
            meta,
            "projector_label,trials,successes,estimate",
            [[r.projector_label, r.trials, r.successes, float(r.estimate)] for r in records],
        )
    _write_csv(
        out / "covariance_predicted.csv",
        meta,
        ",".join(f"k{k}" for k in range(1, 16)),
        [[float(x) for x in row] for row in covariance],
    )

    if reps > 0:
        coeff_rows = _repeat_linear(truth, eff_q, pm, shots_arr, seed, reps)
        emp = np.cov(coeff_rows, rowvar=False, ddof=1)
        _write_csv(
            out / "covariance_empirical.csv",
            meta,
            ",".join(f"k{k}" for k in range(1, 16)),
            [[float(x) for x in row] for row in emp],
        )
        pred = covariance_predict(truth.matrix, pm, shots_arr)
        rel = np.abs(np.diag(emp) - np.diag(pred)) / np.abs(np.diag(pred))
        payload["covariance_study"] = _round_tree(
            {
                "repetitions": reps,
                "max_diag_relative_deviation": float(np.max(rel)),
            }
        )

    _write_json(out / "result.json", payload)
    print(
        f"mle fidelity_to_truth={diag['mle_fidelity_to_truth']:.6f} "
        f"linear_psd={linear_psd} converged={result.converged}"
    )
    print(f"wrote {out / 'result.json'}")
    return EXIT_OK


def _binomial_loglik(freqs, shots, q: Quorum, rho_hat) -> float:
    # raw traces, no PSD validation: the linear estimate may sit outside
    # the state set, so clamp its predicted probabilities instead
    probs = np.einsum("jab,ba->j", q.matrices(), rho_hat).real
    probs = np.clip(probs, 1e-12, 1 - 1e-12)
    n = np.asarray(shots, dtype=np.float64)
    m = np.asarray(freqs, dtype=np.float64)
    return float(np.sum(n * (m * np.log(probs) + (1 - m) * np.log1p(-probs))))


def _repeat_linear(truth, eff_q, pm, shots_arr, seed, reps) -> np.ndarray:
    freqs = sample_frequencies(truth, eff_q.projectors, shots_arr, seed, reps)
    return (freqs - 0.25) @ pm.inverse.T


# ---------------------------------------------------------------------- plan


def cmd_plan(cfg: dict, out: Path) -> int:
    _check_fields(
        cfg,
        required={"delta": (list, int, float), "p_limit": (list, int, float)},
        optional={"fidelity": (list, int, float)},
        where="plan config",
    )

    def as_list(v):
        return [float(x) for x in (v if isinstance(v, list) else [v])]

    deltas = as_list(cfg["delta"])
    p_limits = as_list(cfg["p_limit"])
    fidelities = as_list(cfg.get("fidelity", 1.0))
    rows = []
    for d in deltas:
        for pl in p_limits:
            for f in fidelities:
                try:
                    n = plan_shots(d, pl, f)
                    rows.append([float(d), float(pl), float(f), n])
                except ValueError:
                    rows.append([float(d), float(pl), float(f), "unplannable"])
    _write_csv(out / "plan.csv", _meta(cfg), "delta,p_limit,fidelity,n_runs", rows)
    print(f"wrote {out / 'plan.csv'} ({len(rows)} combinations)")
    return EXIT_OK


# -------------------------------------------------------------------- verify


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""


def _check(check_id, measured, threshold, passed=None, detail="") -> CheckResult:
    if passed is None:
        passed = measured <= threshold
    return CheckResult(check_id, bool(passed), float(measured), float(threshold), detail)


def run_verification(mub: Optional[Quorum] = None, james: Optional[Quorum] = None) -> list:
    """Structural self-checks; quorum overrides exist for fault injection."""
    results = []

    def guarded(check_id, threshold, fn, detail=""):
        try:
            results.append(_check(check_id, fn(), threshold, detail=detail))
        except Exception as exc:  # noqa: BLE001 - report, do not crash the list
            results.append(CheckResult(check_id, False, float("nan"), threshold, str(exc)))

    q_mub = mub if mub is not None else mub_quorum()
    q_james = james if james is not None else james_quorum()

    guarded("det_mub", 1e-12,
            lambda: abs(abs(np.linalg.det(pmatrix_entries(q_mub))) - 1.0 / 32.0),
            "| |det P| - 1/32 |")
    guarded("det_james", 1e-12,
            lambda: abs(abs(np.linalg.det(pmatrix_entries(q_james))) - 1.0 / 512.0),
            "| |det P| - 1/512 |")

    def cross_check():
        mats = q_mub.matrices()
        return max(
            float(np.max(np.abs(mats[j - 1] - _closed_form_matrix(j)))) for j in range(1, 16)
        )

    guarded("quorum_cross_check", 1e-12, cross_check,
            "projectors vs closed-form Pauli terms")

    def esr_budget():
        worst = 0.0
        for j, prep in enumerate(mub_preparations(), start=1):
            esr = [g for g in prep.circuit.gates if g.kind == GateKind.ESR_X_QUBIT1]
            expected = 0 if j <= 3 else 1
            worst = max(worst, abs(len(esr) - expected))
            if esr:
                worst = max(worst, max(abs(g.angle) - np.pi / 4 for g in esr))
        return worst

    guarded("esr_budget", 1e-12, esr_budget, "one pi/2 resonant pulse max, states 4..15")

    def mub_condition():
        bases = mub_bases()
        worst = 0.0
        for bi in range(5):
            for si in range(4):
                for bj in range(5):
                    for sj in range(4):
                        ov = abs(bases[bi][si].overlap(bases[bj][sj])) ** 2
                        target = (1.0 if si == sj else 0.0) if bi == bj else 0.25
                        worst = max(worst, abs(ov - target))
        return worst

    guarded("mub_condition", 1e-12, mub_condition, "all 400 basis-pair overlaps")

    try:
        family = [UP_UP] + [constrained_random_state(s) for s in range(200)]
        report = orthogonality_witness(family)
        results.append(_check(
            "tau_partial_sums", max(report.max_m1, report.max_sum_deviation), 1e-10,
            detail="m1 = 0 and equal 3/8 partial sums, 200 constrained states"))
        results.append(_check(
            "tau_ratio", report.max_ratio_deviation, 1e-10,
            detail="unit ratio of the two tau-subspace partial sums"))
    except Exception as exc:  # noqa: BLE001
        for cid in ("tau_partial_sums", "tau_ratio"):
            results.append(CheckResult(cid, False, float("nan"), 1e-10, str(exc)))

    def gram_schmidt():
        report = gram_schmidt_det_check(q_mub)
        expected = np.sqrt(np.array([3.0 / 4.0, 2.0 / 3.0, 1.0 / 2.0]))
        dev = float(np.max(np.abs(report.lengths - expected[None, :])))
        return max(dev, abs(report.det_product - 1.0 / 32.0))

    guarded("gram_schmidt_lengths", 1e-10, gram_schmidt,
            "per-triple lengths sqrt(3/4), sqrt(2/3), sqrt(1/2); product 1/32")

    def det_bound():
        dets = [abs(np.linalg.det(pmatrix_entries(q_mub))),
                abs(np.linalg.det(pmatrix_entries(q_james)))]
        from .qmath import random_pure
        from .quorum import Projector

        for trial in range(100):
            states = [random_pure(1000 + 100 * trial + i) for i in range(15)]
            projs = tuple(
                Projector(s.projector(), f"R{i:02d}") for i, s in enumerate(states)
            )
            dets.append(abs(np.linalg.det(pmatrix_entries(Quorum("random", projs)))))
        return float(max(dets))

    try:
        worst_det = det_bound()
        results.append(
            CheckResult(
                "det_upper_bound_strict",
                worst_det < DET_UPPER_BOUND,
                worst_det,
                DET_UPPER_BOUND,
                "largest |det P| over mub, james, 100 random quorums (strict <)",
            )
        )
    except Exception as exc:  # noqa: BLE001
        results.append(
            CheckResult("det_upper_bound_strict", False, float("nan"),
                        DET_UPPER_BOUND, str(exc))
        )

    guarded("subspace_no_esr", 0.0,
            lambda: abs(accessible_subspace_dimension(esr_allowed=False) - 5),
            "rank 5 without the resonant pulse")
    guarded("subspace_with_esr", 0.0,
            lambda: abs(accessible_subspace_dimension(esr_allowed=True) - 15),
            "rank 15 with the resonant pulse")

    def evolution_exchange():
        from .gates import Circuit, Gate, evolve_projector
        from .qmath import pauli_assemble

        worst = 0.0
        for phi in (0.0, np.pi / 4, np.pi / 2, np.pi):
            u = Circuit((Gate(GateKind.EXCHANGE_PULSE, phi),)).unitary()
            lhs = evolve_projector(u, UP_DOWN.projector())
            coeffs = np.zeros(16)
            coeffs[0] = 0.5
            coeffs[15] = -0.5
            coeffs[12] = 0.5 * np.cos(phi)
            coeffs[3] = -0.5 * np.cos(phi)
            coeffs[6] = 0.5 * np.sin(phi)
            coeffs[9] = -0.5 * np.sin(phi)
            worst = max(worst, float(np.max(np.abs(lhs - pauli_assemble(coeffs)))))
        return worst

    guarded("evolution_exchange", 1e-12, evolution_exchange,
            "exchange conjugation of P_ud, closed form")

    def evolution_gradient():
        from .gates import Circuit, Gate, evolve_projector
        from .qmath import pauli_assemble

        worst = 0.0
        for theta in (0.0, np.pi / 4, np.pi / 2, np.pi):
            u = Circuit((Gate(GateKind.GRADIENT_Z, theta),)).unitary()
            lhs = evolve_projector(u, SINGLET.projector())
            coeffs = np.zeros(16)
            coeffs[0] = 0.5
            coeffs[15] = -0.5
            coeffs[5] = -0.5 * np.cos(theta)
            coeffs[10] = -0.5 * np.cos(theta)
            coeffs[6] = -0.5 * np.sin(theta)
            coeffs[9] = 0.5 * np.sin(theta)
            worst = max(worst, float(np.max(np.abs(lhs - pauli_assemble(coeffs)))))
        return worst

    guarded("evolution_gradient", 1e-12, evolution_gradient,
            "gradient conjugation of P_S, closed form")

    return results


def cmd_verify(out: Optional[Path]) -> int:
    results = run_verification()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.check_id}: measured={r.measured:.3e} "
              f"threshold={r.threshold:.3e} ({r.detail})")
    if out is not None:
        payload = _meta({})
        payload["checks"] = [
            {
                "check_id": r.check_id,
                "passed": r.passed,
                "measured": _round17(r.measured),
                "threshold": _round17(r.threshold),
                "detail": r.detail,
            }
            for r in results
        ]
        payload["all_passed"] = all(r.passed for r in results)
        _write_json(out / "verify.json", payload)
        print(f"wrote {out / 'verify.json'}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


# ---------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spintomo",
        description="two-spin-qubit tomography: quorum construction, "
        "measurement simulation, reconstruction",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", help="path to a JSON configuration file")
        p.add_argument("--out", default=".", help="output directory (created if absent)")

    p_spec = sub.add_parser("spectrum", help="detuning sweep of the six-level model")
    add_common(p_spec)

    p_quorum = sub.add_parser("quorum", help="export a measurement quorum")
    add_common(p_quorum)

    p_tomo = sub.add_parser("tomography", help="simulate and reconstruct")
    add_common(p_tomo)
    p_tomo.add_argument("--seed", type=int, default=0, help="sampling seed")
    p_tomo.add_argument("--reps", type=int, default=0,
                        help="extra repetitions for the covariance study")
    p_tomo.add_argument("--exact", action="store_true",
                        help="feed exact Born probabilities instead of sampled counts")

    p_plan = sub.add_parser("plan", help="Hoeffding run-count table")
    add_common(p_plan)

    p_verify = sub.add_parser("verify", help="structural self-checks")
    p_verify.add_argument("--out", default=None,
                          help="directory for the machine-readable report")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            out = None
            if args.out is not None:
                out = Path(args.out)
                out.mkdir(parents=True, exist_ok=True)
            return cmd_verify(out)

        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        cfg = _load_config(args.config)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out)
        if args.command == "quorum":
            return cmd_quorum(cfg, out)
        if args.command == "tomography":
            return cmd_tomography(cfg, out, args.seed, args.reps, args.exact)
        if args.command == "plan":
            return cmd_plan(cfg, out)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuorumDegenerateError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
