"""Measurement simulation: shot noise, readout degradation, gate noise.

Counts are binomial draws of the Born probabilities.  Every draw gets
its own counter-based random stream keyed by (seed, projector index,
repetition index), so simulated experiments are reproducible and
order-independent no matter how repetitions are scheduled.

Readout infidelity contracts a projector toward the maximally mixed
operator; coherent gate-angle errors are handled by Monte Carlo
averaging of the circuit-conjugated readout operator over Gaussian
angle draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .gates import Circuit, GateKind, KIND_CODES
from .qmath import as_operator, stream
from .quorum import Projector

PROBABILITY_SLACK = 1e-10


@dataclass(frozen=True)
class MeasurementPlan:
    """Projectors to measure, shots per projector, base seed."""

    projectors: tuple
    shots: tuple
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "projectors", tuple(self.projectors))
        shots = tuple(int(n) for n in np.atleast_1d(np.asarray(self.shots)))
        if len(shots) == 1:
            shots = shots * len(self.projectors)
        if len(shots) != len(self.projectors):
            raise ValueError("shots must be scalar or one entry per projector")
        if any(n < 1 for n in shots):
            raise ValueError("every projector needs at least one shot")
        object.__setattr__(self, "shots", shots)


@dataclass(frozen=True)
class ShotRecord:
    projector_label: str
    trials: int
    successes: int
    estimate: float

    def __post_init__(self):
        if not (0 <= self.successes <= self.trials):
            raise ValueError("successes must lie in [0, trials]")

    @classmethod
    def from_counts(cls, label: str, trials: int, successes: int) -> "ShotRecord":
        return cls(label, int(trials), int(successes), successes / trials)


def born_probabilities(rho, projectors: Sequence[Projector]) -> np.ndarray:
    """tr(P_j rho) for each projector, validated against [0, 1] and clipped."""
    mat = as_operator(rho)
    probs = np.array(
        [np.einsum("ab,ba->", p.matrix, mat).real for p in projectors]
    )
    if np.any(probs < -PROBABILITY_SLACK) or np.any(probs > 1.0 + PROBABILITY_SLACK):
        raise ValueError(f"Born probability outside [0, 1]: {probs}")
    return np.clip(probs, 0.0, 1.0)


def simulate_counts(rho, plan: MeasurementPlan, repetition: int = 0) -> list:
    """One simulated run of the plan: a ShotRecord per projector.

    Identical (rho, plan, repetition) always gives identical records.
    """
    probs = born_probabilities(rho, plan.projectors)
    records = []
    for j, (proj, n) in enumerate(zip(plan.projectors, plan.shots)):
        rng = stream("shots", plan.seed, j, repetition)
        k = int(rng.binomial(n, probs[j]))
        records.append(ShotRecord.from_counts(proj.label, n, k))
    return records


def sample_frequencies(
    rho, projectors: Sequence[Projector], shots, seed: int, reps: int
) -> np.ndarray:
    """Frequency estimates over many repetitions, shape (reps, n_projectors).

    Row r uses the same per-(seed, projector, repetition) streams as
    simulate_counts with repetition=r.
    """
    probs = born_probabilities(rho, projectors)
    shots_arr = np.broadcast_to(np.asarray(shots, dtype=np.int64), (len(projectors),))
    out = np.empty((reps, len(projectors)))
    for j in range(len(projectors)):
        n = int(shots_arr[j])
        p = probs[j]
        for r in range(reps):
            out[r, j] = stream("shots", seed, j, r).binomial(n, p) / n
    return out


def degrade_projector(proj: Projector, fidelity: float) -> Projector:
    """Readout-infidelity contraction toward the maximally mixed operator.

    P' = (1 - f^2)/3 * I + (4 f^2 - 1)/3 * P for f in [1/2, 1]; f = 1
    returns P unchanged, f = 1/2 erases all information (P' = I/4).
    """
    if not 0.5 <= fidelity <= 1.0:
        raise ValueError("readout fidelity must lie in [1/2, 1]")
    f2 = fidelity * fidelity
    m = ((1.0 - f2) / 3.0) * np.eye(4) + ((4.0 * f2 - 1.0) / 3.0) * proj.matrix
    return Projector(m, f"{proj.label}~f={fidelity:g}", proj.basis_index, kind="degraded")


@dataclass(frozen=True)
class AngleNoise:
    mean_rad: float
    std_rad: float

    def __post_init__(self):
        if not (np.isfinite(self.mean_rad) and np.isfinite(self.std_rad)):
            raise ValueError("noise parameters must be finite")
        if self.std_rad < 0:
            raise ValueError("std_rad must be nonnegative")


@dataclass(frozen=True)
class NoiseModel:
    """Additive Gaussian angle error per gate instance, by gate kind.

    Kinds absent from the table are noise-free.  ``samples`` sets the
    Monte Carlo budget for projector averaging.
    """

    gates: dict = field(default_factory=dict)
    samples: int = 10000

    def __post_init__(self):
        fixed = {}
        for kind, noise in self.gates.items():
            kind = GateKind(kind)
            if not isinstance(noise, AngleNoise):
                noise = AngleNoise(**noise)
            fixed[kind] = noise
        object.__setattr__(self, "gates", fixed)
        if self.samples < 2:
            raise ValueError("samples must be at least 2")

    @classmethod
    def from_json(cls, data: dict) -> "NoiseModel":
        data = dict(data)
        samples = data.pop("samples", 10000)
        gates = {}
        for key, params in data.items():
            kind = GateKind(key)  # raises on unknown gate names
            extra = set(params) - {"mean_rad", "std_rad"}
            if extra:
                raise ValueError(f"unknown noise fields for {key}: {sorted(extra)}")
            gates[kind] = AngleNoise(
                float(params.get("mean_rad", 0.0)), float(params.get("std_rad", 0.0))
            )
        return cls(gates, int(samples))

    def to_json(self) -> dict:
        out = {
            kind.value: {"mean_rad": n.mean_rad, "std_rad": n.std_rad}
            for kind, n in self.gates.items()
        }
        out["samples"] = self.samples
        return out

    def for_kind(self, kind: GateKind) -> AngleNoise:
        return self.gates.get(kind, AngleNoise(0.0, 0.0))


@dataclass(frozen=True)
class AveragedProjector:
    projector: Projector
    max_standard_error: float
    samples: int


def average_projector(
    circuit: Circuit,
    base: Projector,
    noise: NoiseModel,
    seed: int = 0,
    target_se: Optional[float] = None,
) -> AveragedProjector:
    """Monte Carlo mean of U(alpha)^dag P_base U(alpha) over noisy angles.

    ``circuit`` is the gate sequence the device applies before the base
    readout; each gate's angle is perturbed by its kind's Gaussian
    error, freshly per sample.  The mean is symmetrized and trace
    renormalized.  With all stds at zero this reproduces
    evolve_projector(circuit.unitary()^dag, base) exactly.

    The entrywise standard error of the matrix mean is reported;
    if target_se is given and not reached, raises RuntimeError.
    """
    gates = circuit.gates
    nsamp = noise.samples
    codes = np.array([KIND_CODES[g.kind] for g in gates], dtype=np.int64)
    angles = np.empty((nsamp, len(gates)), dtype=np.float64)
    for gi, g in enumerate(gates):
        an = noise.for_kind(g.kind)
        rng = stream("angle-noise", seed, circuit.label, gi)
        angles[:, gi] = g.angle + an.mean_rad + an.std_rad * rng.standard_normal(nsamp)
    acc, acc2 = _kernels.average_conjugated(codes, angles, base.matrix)
    mean = acc / nsamp
    var = np.maximum(acc2 - nsamp * (np.abs(mean) ** 2), 0.0) / max(nsamp - 1, 1)
    max_se = float(np.sqrt(np.max(var) / nsamp))
    if target_se is not None and max_se > target_se:
        raise RuntimeError(
            f"standard error {max_se:.3e} above target {target_se:.3e}; "
            "increase the sample budget"
        )
    sym = 0.5 * (mean + mean.conj().T)
    sym /= np.trace(sym).real
    proj = Projector(sym, f"{base.label}~avg", base.basis_index, kind="averaged")
    return AveragedProjector(proj, max_se, nsamp)


def calibration_matrix(projectors: Sequence[Projector]) -> np.ndarray:
    """Gram matrix M_ij = tr(P_i P_j) of (possibly imperfect) projectors."""
    mats = np.stack([p.matrix for p in projectors])
    return np.einsum("iab,jba->ij", mats, mats).real


def tail_bound(n_runs: int, delta: float) -> float:
    """Two-sided Hoeffding bound 2 exp(-2 n delta^2) on |m - p| > delta."""
    return 2.0 * math.exp(-2.0 * n_runs * delta * delta)


def plan_shots(delta: float, p_limit: float, fidelity: float = 1.0) -> int:
    """Smallest run count guaranteeing coefficient error below delta.

    A frequency error delta' propagates to a reconstructed-coefficient
    error of 3 sqrt(2) delta' / (4 f^2 - 1), so the frequency must be
    pinned to delta' = (4 f^2 - 1) delta / (3 sqrt(2)); Hoeffding then
    bounds the failure probability by 2 exp(-2 N delta'^2).  Returns
    the smallest integer N with the bound strictly below p_limit.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < p_limit < 1.0:
        raise ValueError("p_limit must lie in (0, 1)")
    if not 0.5 <= fidelity <= 1.0:
        raise ValueError("readout fidelity must lie in [1/2, 1]")
    contrast = 4.0 * fidelity * fidelity - 1.0
    if contrast <= 0.0:
        raise ValueError("no sensitivity at fidelity 1/2: cannot plan")
    delta_prime = contrast * delta / (3.0 * math.sqrt(2.0))
    bound = math.log(2.0 / p_limit) / (2.0 * delta_prime * delta_prime)
    return int(math.floor(bound)) + 1
