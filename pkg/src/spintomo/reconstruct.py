"""State reconstruction from quorum frequencies.

Linear inversion is exact on exact probabilities and fast enough to run
in Monte Carlo loops, but its output can have (slightly) negative
eigenvalues at finite shot counts.  The likelihood route reparametrizes
rho = T^dag T / tr(T^dag T), which is PSD by construction, and ascends
the binomial log-likelihood; it is seeded from the PSD-projected linear
estimate, so on clean data it starts essentially converged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from . import _kernels
from .measure import ShotRecord
from .qmath import DensityMatrix, pauli_assemble, pauli_expand
from .quorum import PMatrix, Quorum, pmatrix

#: adjugate-route constant 15 (3/4)^14 / 4 in the covariance bound
COVARIANCE_BOUND_NUMERATOR = 15.0 * 0.75**14 / 4.0

_SEED_EIGENVALUE_FLOOR = 1e-9
_REVERSAL = np.fliplr(np.eye(4))


def frequencies_of(records: Sequence[ShotRecord]) -> np.ndarray:
    return np.array([r.estimate for r in records], dtype=np.float64)


def linear_from_frequencies(m: np.ndarray, pm: PMatrix) -> np.ndarray:
    """Invert tr(P_j rho) = 1/4 + sum_k P_jk rho_k for the 15 coefficients.

    The unit-trace coefficient is fixed at 1/2; the output is Hermitian
    with exact unit trace but not necessarily PSD.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (15,):
        raise ValueError("expected 15 frequencies")
    coeffs = pm.inverse @ (m - 0.25)
    return pauli_assemble(np.concatenate(([0.5], coeffs)))


def linear_reconstruct(records: Sequence[ShotRecord], pm: PMatrix) -> np.ndarray:
    if len(records) != 15:
        raise ValueError("expected 15 records, one per quorum projector")
    return linear_from_frequencies(frequencies_of(records), pm)


def is_psd(matrix: np.ndarray, slack: float = 1e-10) -> bool:
    return bool(np.linalg.eigvalsh(matrix)[0] >= -slack)


def degraded_marginal_rho4(p4: float, p6: float, fidelity: float) -> float:
    """Single Pauli coefficient rho_4 from two degraded-readout probabilities.

    With ideal readout rho_4 = (2 (p4 + p6) - 1) / 2; readout fidelity f
    rescales the traceless signal by (4 f^2 - 1)/3, giving
    rho_4 = 3 (2 (p4 + p6) - 1) / (2 (4 f^2 - 1)).
    """
    if not 0.5 < fidelity <= 1.0:
        raise ValueError("fidelity must lie in (1/2, 1]: no signal at 1/2")
    contrast = 4.0 * fidelity * fidelity - 1.0
    return 3.0 * (2.0 * (p4 + p6) - 1.0) / (2.0 * contrast)


def covariance_predict(rho, pm: PMatrix, shots) -> np.ndarray:
    """Covariance of the linearly reconstructed coefficients.

    Independent binomial frequencies have variance p(1-p)/N, so
    C = Pinv diag(p_j (1 - p_j) / N_j) Pinv^T.
    """
    shots = np.broadcast_to(np.asarray(shots, dtype=np.float64), (15,))
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    probs = 0.25 + pm.entries @ pauli_expand(mat)[1:]
    b = np.diag(probs * (1.0 - probs) / shots)
    return pm.inverse @ b @ pm.inverse.T


def covariance_bound(pm: PMatrix, n_shots: float) -> float:
    """Uniform bound on |C_kl| for equal shot counts: 15 (3/4)^14 / (4 N det^2)."""
    return COVARIANCE_BOUND_NUMERATOR / (n_shots * pm.det**2)


def psd_project(matrix: np.ndarray, floor: float = 0.0) -> np.ndarray:
    """Nearest physical state: clip negative eigenvalues, renormalize trace.

    The optional floor lifts eigenvalues strictly above zero (used to
    seed the likelihood ascent, whose square-root parametrization needs
    a nonsingular starting point).
    """
    sym = 0.5 * (np.asarray(matrix, dtype=np.complex128) + np.asarray(matrix).conj().T)
    vals, vecs = np.linalg.eigh(sym)
    vals = np.clip(vals, floor, None)
    rho = (vecs * vals) @ vecs.conj().T
    return rho / np.trace(rho).real


def seed_square_root(rho_linear: np.ndarray) -> np.ndarray:
    """Lower-triangular T with T^dag T equal to the PSD projection of the input.

    Eigenvalues are floored at 1e-9 and the trace renormalized, then the
    reversed-permutation Cholesky trick produces the lower-triangular
    factor of the T^dag T (rather than T T^dag) convention.
    """
    rho = psd_project(rho_linear, floor=_SEED_EIGENVALUE_FLOOR)
    upper = scipy.linalg.cholesky(_REVERSAL @ rho @ _REVERSAL, lower=False)
    return _REVERSAL @ upper @ _REVERSAL


@dataclass(frozen=True)
class ReconstructionResult:
    rho_linear: np.ndarray
    rho_mle: DensityMatrix
    covariance_predicted: np.ndarray
    loglik: float
    iterations: int
    converged: bool
    linear_psd: bool


def mle_from_frequencies(
    m: np.ndarray,
    shots,
    quorum: Quorum,
    gtol: float = 1e-8,
    max_iter: int = 10000,
) -> ReconstructionResult:
    """Likelihood-ascent reconstruction from frequency estimates.

    Accepts fractional frequencies, so exact Born probabilities can be
    fed through the same path as counted data.  Non-convergence within
    max_iter returns the best iterate, flagged.
    """
    m = np.asarray(m, dtype=np.float64)
    shots = np.broadcast_to(np.asarray(shots, dtype=np.float64), m.shape).copy()
    if np.any(shots < 1):
        raise ValueError("every frequency needs a positive trial count")
    pm = pmatrix(quorum)
    rho_linear = linear_from_frequencies(m, pm)
    t0 = seed_square_root(rho_linear)
    projs = quorum.matrices()
    weights = shots / shots.sum()
    t_mat, lik_scaled, iters, converged = _kernels.mle_ascend(
        projs, m, weights, t0, gtol, max_iter
    )
    rho = t_mat.conj().T @ t_mat
    rho = rho / np.trace(rho).real
    rho = 0.5 * (rho + rho.conj().T)
    result_rho = DensityMatrix(rho)
    cov = covariance_predict(result_rho, pm, shots)
    return ReconstructionResult(
        rho_linear=rho_linear,
        rho_mle=result_rho,
        covariance_predicted=cov,
        loglik=float(lik_scaled * shots.sum()),
        iterations=int(iters),
        converged=bool(converged),
        linear_psd=is_psd(rho_linear),
    )


def mle_reconstruct(
    records: Sequence[ShotRecord],
    quorum: Quorum,
    gtol: float = 1e-8,
    max_iter: int = 10000,
) -> ReconstructionResult:
    """Reconstruction from counted shots; see mle_from_frequencies."""
    if len(records) != 15:
        raise ValueError("expected 15 records, one per quorum projector")
    m = frequencies_of(records)
    shots = np.array([r.trials for r in records], dtype=np.float64)
    return mle_from_frequencies(m, shots, quorum, gtol=gtol, max_iter=max_iter)
