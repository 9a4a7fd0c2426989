"""Gate set available in the double-dot device, and circuits built from it.

Every gate is generated by one control knob:

* exchange pulse  exp(i phi P_S), P_S the singlet projector
  (phi = pi is SWAP, phi = pi/2 the entangling square root of SWAP)
* single-qubit z rotations  exp(i theta sigma_{1z}), exp(i theta sigma_{2z})
  and their uniform combination exp(i theta (sigma_{1z} + sigma_{2z}))
* magnetic-field-gradient rotation  exp(i (v/4) (sigma_{1z} - sigma_{2z}))
* resonant x rotation of qubit 1  exp(i theta sigma_{1x})

Circuits list gates in execution order: the leftmost gate acts first.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .qmath import SINGLET, PureState, is_hermitian, two_qubit_pauli

UNITARY_ATOL = 1e-10


class GateKind(str, Enum):
    EXCHANGE_PULSE = "exchange_pulse"
    Z_ROT_QUBIT1 = "z_rot_qubit1"
    Z_ROT_QUBIT2 = "z_rot_qubit2"
    Z_ROT_BOTH = "z_rot_both"
    GRADIENT_Z = "gradient_z"
    ESR_X_QUBIT1 = "esr_x_qubit1"


#: integer codes shared with the compiled kernels
KIND_CODES = {kind: code for code, kind in enumerate(GateKind)}

_SINGLET_PROJECTOR = SINGLET.projector()
_SIGMA_1X = two_qubit_pauli(1, 0)

# z-type generators are diagonal; table of diagonal phase multipliers
_DIAG_GENERATORS = {
    GateKind.Z_ROT_QUBIT1: np.array([1.0, 1.0, -1.0, -1.0]),
    GateKind.Z_ROT_QUBIT2: np.array([1.0, -1.0, 1.0, -1.0]),
    GateKind.Z_ROT_BOTH: np.array([2.0, 0.0, 0.0, -2.0]),
    GateKind.GRADIENT_Z: np.array([0.0, 0.5, -0.5, 0.0]),
}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    angle: float

    def __post_init__(self):
        if not isinstance(self.kind, GateKind):
            object.__setattr__(self, "kind", GateKind(self.kind))
        if not np.isfinite(self.angle):
            raise ValueError("gate angle must be finite")

    def to_record(self) -> dict:
        return {"kind": self.kind.value, "angle_radians": float(self.angle)}

    @classmethod
    def from_record(cls, rec: dict) -> "Gate":
        extra = set(rec) - {"kind", "angle_radians"}
        if extra:
            raise ValueError(f"unknown gate record fields: {sorted(extra)}")
        return cls(GateKind(rec["kind"]), float(rec["angle_radians"]))


def gate_unitary(gate: Gate) -> np.ndarray:
    """4x4 unitary of a single gate, from the closed form exp(i angle G)."""
    return gate_matrix(gate.kind, gate.angle)


def gate_matrix(kind: GateKind, angle: float) -> np.ndarray:
    if kind == GateKind.EXCHANGE_PULSE:
        return np.eye(4, dtype=np.complex128) + (np.exp(1j * angle) - 1.0) * _SINGLET_PROJECTOR
    if kind == GateKind.ESR_X_QUBIT1:
        return np.cos(angle) * np.eye(4, dtype=np.complex128) + 1j * np.sin(angle) * _SIGMA_1X
    mult = _DIAG_GENERATORS[GateKind(kind)]
    return np.diag(np.exp(1j * angle * mult))


def gate_matrix_stack(kind: GateKind, angles: np.ndarray) -> np.ndarray:
    """Unitaries of one gate kind for a whole vector of angles, shape (n, 4, 4)."""
    angles = np.asarray(angles, dtype=np.float64)
    n = angles.shape[0]
    if kind == GateKind.EXCHANGE_PULSE:
        out = np.broadcast_to(np.eye(4, dtype=np.complex128), (n, 4, 4)).copy()
        out += (np.exp(1j * angles) - 1.0)[:, None, None] * _SINGLET_PROJECTOR
        return out
    if kind == GateKind.ESR_X_QUBIT1:
        return (
            np.cos(angles)[:, None, None] * np.eye(4, dtype=np.complex128)
            + 1j * np.sin(angles)[:, None, None] * _SIGMA_1X
        )
    mult = _DIAG_GENERATORS[GateKind(kind)]
    out = np.zeros((n, 4, 4), dtype=np.complex128)
    phases = np.exp(1j * angles[:, None] * mult)
    idx = np.arange(4)
    out[:, idx, idx] = phases
    return out


@dataclass(frozen=True)
class Circuit:
    """Ordered gate sequence; gates[0] acts first."""

    gates: tuple
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if not isinstance(g, Gate):
                raise TypeError("Circuit gates must be Gate instances")

    def unitary(self) -> np.ndarray:
        return circuit_unitary(self)

    def adjoint(self) -> "Circuit":
        """Inverse circuit: reversed order, negated angles."""
        rev = tuple(Gate(g.kind, -g.angle) for g in reversed(self.gates))
        label = f"{self.label}^dag" if self.label else ""
        return Circuit(rev, label)

    def extended(self, more: Iterable[Gate], label: str = "") -> "Circuit":
        return Circuit(self.gates + tuple(more), label or self.label)

    def esr_gate_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == GateKind.ESR_X_QUBIT1)

    def to_records(self) -> list:
        return [g.to_record() for g in self.gates]

    @classmethod
    def from_records(cls, records, label: str = "") -> "Circuit":
        return cls(tuple(Gate.from_record(r) for r in records), label)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Product of the gate unitaries; the leftmost listed gate acts first."""
    u = np.eye(4, dtype=np.complex128)
    for g in circuit.gates:
        u = gate_unitary(g) @ u
    return u


def circuit_apply(circuit: Circuit, state: PureState) -> PureState:
    """Run the circuit on a state; output carries the canonical phase."""
    return PureState.from_amplitudes(circuit_unitary(circuit) @ state.amplitudes)


def evolve_projector(u: np.ndarray, projector: np.ndarray) -> np.ndarray:
    """Heisenberg conjugation U P U^dag with a unitarity check on U."""
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (4, 4):
        raise ValueError("expected a 4x4 unitary")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(4)))
    if dev > UNITARY_ATOL:
        raise ValueError(f"matrix is not unitary (deviation {dev!r})")
    projector = np.asarray(projector, dtype=np.complex128)
    if not is_hermitian(projector):
        raise ValueError("projector must be Hermitian")
    return u @ projector @ u.conj().T
