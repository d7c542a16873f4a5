"""Probability schedules and the ergodic channel.

The dynamical map studied throughout the package is the ergodic channel

    L_t(rho) = p_t rho + (1 - p_t) tau,

an affine contraction toward a fixed state ``tau`` (diagonal in the
computational basis) driven by a scalar probability schedule ``p_t``
with p_0 = 1.  Operator-sum realizations (qubit Pauli form, prime-
dimension MUB form) are provided as structural cross-checks; the affine
form is canonical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularScheduleError
from .matkernel import PAULI, DensityMatrix, eig_hermitian, matrix_sqrt_psd

__all__ = [
    "EPS_P",
    "SCHEDULE_KINDS",
    "ErgodicChannel",
    "ProbabilitySchedule",
    "apply_ergodic",
    "apply_ergodic_kraus_qubit",
    "apply_ergodic_mub",
    "diagonalize_fixed_point",
    "eval_schedule",
    "is_prime",
    "mub_bases",
    "mub_unitaries",
    "weyl_operator",
]

#: Probability floor below which the channel is treated as non-invertible.
EPS_P = 1e-9

SCHEDULE_KINDS = ("exponential", "cosine_squared", "damped_cosine", "constant")


@dataclass(frozen=True)
class ProbabilitySchedule:
    """Dynamic probability p_t with p(0) = 1 and 0 <= p_t <= 1.

    Supported families:

    * ``exponential``:    p = exp(-gamma t)
    * ``cosine_squared``: p = cos^2(omega t)
    * ``damped_cosine``:  p = exp(-gamma t) cos^2(omega t)
    * ``constant``:       p = 1
    """

    kind: str
    gamma: float = 0.0
    omega: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}, expected one of {SCHEDULE_KINDS}")
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if self.omega < 0.0:
            raise ValueError("omega must be nonnegative")

    def evaluate(self, t: float) -> tuple[float, float]:
        """Return (p, dp/dt) at time t >= 0."""
        if t < 0.0:
            raise ValueError(f"schedule is defined for t >= 0, got t = {t}")
        if self.kind == "constant":
            return 1.0, 0.0
        if self.kind == "exponential":
            p = np.exp(-self.gamma * t)
            return float(p), float(-self.gamma * p)
        if self.kind == "cosine_squared":
            c = np.cos(self.omega * t)
            return float(c * c), float(-self.omega * np.sin(2.0 * self.omega * t))
        # damped_cosine, by the product rule
        e = np.exp(-self.gamma * t)
        c = np.cos(self.omega * t)
        p = e * c * c
        pdot = e * (-self.gamma * c * c - self.omega * np.sin(2.0 * self.omega * t))
        return float(p), float(pdot)

    def evaluate_many(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`evaluate` over an array of times."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and float(np.min(ts)) < 0.0:
            raise ValueError("schedule is defined for t >= 0")
        if self.kind == "constant":
            return np.ones_like(ts), np.zeros_like(ts)
        if self.kind == "exponential":
            p = np.exp(-self.gamma * ts)
            return p, -self.gamma * p
        if self.kind == "cosine_squared":
            c = np.cos(self.omega * ts)
            return c * c, -self.omega * np.sin(2.0 * self.omega * ts)
        e = np.exp(-self.gamma * ts)
        c = np.cos(self.omega * ts)
        return e * c * c, e * (-self.gamma * c * c - self.omega * np.sin(2.0 * self.omega * ts))

    def p(self, t: float) -> float:
        return self.evaluate(t)[0]

    def log_derivative(self, t: float, eps_p: float = EPS_P) -> float:
        """Return pdot/p, raising if the schedule is singular at t."""
        p, pdot = self.evaluate(t)
        if p <= eps_p:
            raise SingularScheduleError(f"schedule probability p({t}) = {p:.3e} <= {eps_p:g}")
        return pdot / p

    def is_singular(self, t: float, eps_p: float = EPS_P) -> bool:
        return self.evaluate(t)[0] <= eps_p


def eval_schedule(schedule: ProbabilitySchedule, t: float) -> tuple[float, float]:
    """Functional form of :meth:`ProbabilitySchedule.evaluate`."""
    return schedule.evaluate(t)


class ErgodicChannel:
    """Ergodic channel with fixed point ``tau`` and schedule ``p_t``.

    ``tau`` must be diagonal in the computational basis (use
    :func:`diagonalize_fixed_point` to rotate a general state first).
    """

    __slots__ = ("tau", "schedule", "dim")

    def __init__(self, tau: DensityMatrix, schedule: ProbabilitySchedule):
        if not tau.is_diagonal(tol=1e-12):
            raise ValueError("fixed point must be diagonal in the computational basis")
        self.tau = tau
        self.schedule = schedule
        self.dim = tau.dim

    def __repr__(self) -> str:
        return f"ErgodicChannel(dim={self.dim}, schedule={self.schedule.kind})"

    def apply(self, t: float, rho0: DensityMatrix) -> DensityMatrix:
        return apply_ergodic(self, t, rho0)

    def apply_with_probability(self, p: float, rho0: DensityMatrix) -> DensityMatrix:
        if rho0.dim != self.dim:
            raise ValueError(f"dimension mismatch: state {rho0.dim}, channel {self.dim}")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability must lie in [0, 1], got {p}")
        return DensityMatrix(p * rho0.matrix + (1.0 - p) * self.tau.matrix)


def apply_ergodic(channel: ErgodicChannel, t: float, rho0: DensityMatrix) -> DensityMatrix:
    """Evaluate p_t rho0 + (1 - p_t) tau."""
    p, _ = channel.schedule.evaluate(t)
    return channel.apply_with_probability(p, rho0)


def diagonalize_fixed_point(tau: DensityMatrix) -> tuple[DensityMatrix, np.ndarray]:
    """Rotate a general fixed point to its eigenbasis.

    Returns ``(tau_diag, basis)`` with ``tau = basis @ tau_diag @ basis^dagger``
    and eigenvalues of ``tau_diag`` in descending order.  States evolve in
    the rotated frame as ``basis^dagger rho basis``.
    """
    values, vectors = eig_hermitian(tau.matrix)
    return DensityMatrix.from_diagonal(np.clip(values, 0.0, None)), vectors


def apply_ergodic_kraus_qubit(tau: DensityMatrix, p: float, rho0: DensityMatrix) -> DensityMatrix:
    """Operator-sum form of the qubit channel: p rho + (1-p) sum_a A s_a rho s_a A^dagger.

    ``A = sqrt(tau/2)``; the Pauli twirl satisfies
    ``sum_a s_a rho s_a = 2 tr(rho) I`` so this must agree with the
    affine form to round-off.  Verification aid, d = 2 only.
    """
    if tau.dim != 2 or rho0.dim != 2:
        raise ValueError("Kraus form of the ergodic channel is implemented for qubits only")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    a = matrix_sqrt_psd(tau.matrix / 2.0)
    reset = sum(a @ s @ rho0.matrix @ s @ a.conj().T for s in PAULI)
    return DensityMatrix(p * rho0.matrix + (1.0 - p) * reset)


def weyl_operator(d: int, k: int, l: int) -> np.ndarray:
    """Weyl shift-and-phase unitary W_{kl} = X^l Z^k on dimension d.

    With X the cyclic shift and Z = diag(1, w, ..., w^(d-1)),
    w = exp(2 pi i / d), these satisfy
    ``W_{kl} W_{rs} = w^{ks} W_{k+r, l+s}`` (indices mod d) and
    ``W_{kl}^dagger = w^{kl} W_{-k,-l}``.  W_{01} = s1 and W_{10} = s3
    for d = 2.
    """
    if d < 2:
        raise ValueError(f"Weyl operators need dimension >= 2, got {d}")
    k %= d
    l %= d
    omega = np.exp(2.0j * np.pi / d)
    w = np.zeros((d, d), dtype=complex)
    for m in range(d):
        w[(m + l) % d, m] = omega ** (m * k)
    return w


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def mub_bases(d: int) -> list[np.ndarray]:
    """Complete set of d+1 mutually unbiased bases for prime d.

    Each entry is a unitary whose columns are the basis vectors; entry 0
    is the computational basis.  For odd primes the construction is
    ``<m|psi_j^(a)> = w^(a m^2 + j m)/sqrt(d)``; for d = 2 the
    eigenbases of s3, s1, s2 are returned.  Non-prime dimensions are
    unsupported.
    """
    if not is_prime(d):
        raise ValueError(f"mutually unbiased bases are implemented for prime dimensions only, got {d}")
    if d == 2:
        s1_basis = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
        s2_basis = np.array([[1.0, 1.0], [1.0j, -1.0j]], dtype=complex) / np.sqrt(2.0)
        return [np.eye(2, dtype=complex), s1_basis, s2_basis]
    omega = np.exp(2.0j * np.pi / d)
    m = np.arange(d)
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        cols = [omega ** ((a * m * m + j * m) % d) / np.sqrt(d) for j in range(d)]
        bases.append(np.stack(cols, axis=1))
    return bases


def mub_unitaries(d: int) -> list[np.ndarray]:
    """The d+1 unitaries U_a = sum_l w^l |psi_l^(a)><psi_l^(a)| for prime d."""
    omega = np.exp(2.0j * np.pi / d)
    phases = omega ** np.arange(d)
    return [(b * phases) @ b.conj().T for b in mub_bases(d)]


def apply_ergodic_mub(tau: DensityMatrix, p: float, rho0: DensityMatrix,
                      weights: np.ndarray | None = None) -> DensityMatrix:
    """Operator-sum form of the ergodic channel built from MUB conjugations.

    The reset part conjugates by all nontrivial powers of the d+1 MUB
    unitaries (plus the identity term) and compresses with
    ``A = sqrt(tau/d)``:

        R(rho) = A (rho + sum_{a} sum_{k=1..d-1} U_a^k rho U_a^{-k}) A^dagger

    which collapses to tr(rho) tau by the MUB projector completeness
    identity.  ``weights``, when given, re-weights the d+1 conjugation
    orbits; only uniform weights reproduce the affine channel exactly
    (deviations can be probed with :func:`mub_affine_deviation`).
    Prime d only.
    """
    d = tau.dim
    if rho0.dim != d:
        raise ValueError(f"dimension mismatch: state {rho0.dim}, fixed point {d}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    unitaries = mub_unitaries(d)
    if weights is None:
        weights = np.ones(len(unitaries))
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(unitaries),):
        raise ValueError(f"expected {len(unitaries)} weights, got shape {weights.shape}")
    a = matrix_sqrt_psd(tau.matrix / d)
    twirl = rho0.matrix.astype(complex).copy()
    for wgt, u in zip(weights, unitaries):
        uk = np.eye(d, dtype=complex)
        for _ in range(1, d):
            uk = uk @ u
            twirl = twirl + wgt * (uk @ rho0.matrix @ uk.conj().T)
    reset = a @ twirl @ a.conj().T
    reset = reset / np.trace(reset).real
    return DensityMatrix(p * rho0.matrix + (1.0 - p) * reset)


def mub_affine_deviation(tau: DensityMatrix, p: float, rho0: DensityMatrix,
                         weights: np.ndarray | None = None) -> float:
    """Max elementwise deviation between the MUB form and the affine channel."""
    mub = apply_ergodic_mub(tau, p, rho0, weights=weights)
    affine = p * rho0.matrix + (1.0 - p) * tau.matrix
    return float(np.max(np.abs(mub.matrix - affine)))
