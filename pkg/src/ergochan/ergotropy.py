"""Ergotropy under ergodic dynamics and the derived non-Markovianity measure.

Ergotropy W_e(rho) = tr(rho H) - tr(rho_p H) is the unitarily extractable
work, with rho_p the passive state (descending eigenvalues placed on
ascending energy levels).  For a qubit channel with passive fixed point
the evolved-state ergotropy has a closed form in the initial Bloch
vector, and its maximum over input states W_max(t) is monotone under
Markovian schedules.  The rate sigma_W = d W_max/dt, positive exactly on
backflow windows, integrates to the normalized measure
N_W/(1 + N_W).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .channels import ErgodicChannel
from .matkernel import BlochVector, DensityMatrix

__all__ = [
    "ErgotropyTrace",
    "Hamiltonian",
    "SigmaWSample",
    "anti_ergotropy",
    "energy",
    "ergotropy",
    "ergotropy_qubit_closed",
    "max_ergotropy_state",
    "nm_measure",
    "passive_state",
    "sigma_w",
    "w_max_comparison_form",
]

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Hamiltonian:
    """Diagonal Hamiltonian with ascending energies in the computational basis."""

    energies: tuple[float, ...]

    def __post_init__(self) -> None:
        e = tuple(float(x) for x in self.energies)
        if len(e) < 2:
            raise ValueError("Hamiltonian needs at least two levels")
        if any(b < a for a, b in zip(e, e[1:])):
            raise ValueError(f"energies must be non-decreasing, got {e}")
        object.__setattr__(self, "energies", e)

    @property
    def dim(self) -> int:
        return len(self.energies)

    def matrix(self) -> np.ndarray:
        return np.diag(np.asarray(self.energies, dtype=complex))

    @classmethod
    def qubit(cls, e: float = 1.0) -> "Hamiltonian":
        """H = e |1><1| with gap e > 0."""
        if e <= 0:
            raise ValueError("energy gap must be positive")
        return cls((0.0, e))


@dataclass(frozen=True)
class ErgotropyTrace:
    """Time series of the maximal-input ergotropy and its backflow measure."""

    times: tuple[float, ...]
    w_max: tuple[float, ...]
    sigma_w: tuple[float, ...]
    n_w_cumulative: tuple[float, ...]
    script_n_w: float


class SigmaWSample(NamedTuple):
    """Measure value max(0, dW_max/dt) together with the raw derivative."""

    measure: float
    derivative: float


def _check_dims(rho: DensityMatrix, hamiltonian: Hamiltonian) -> None:
    if rho.dim != hamiltonian.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, Hamiltonian {hamiltonian.dim}")


def energy(rho: DensityMatrix, hamiltonian: Hamiltonian) -> float:
    """Average energy tr(rho H)."""
    _check_dims(rho, hamiltonian)
    return float(np.sum(np.diag(rho.matrix).real * np.asarray(hamiltonian.energies)))


def passive_state(rho: DensityMatrix, hamiltonian: Hamiltonian) -> DensityMatrix:
    """Minimal-energy state unitarily reachable from rho.

    Eigenvalues of rho in descending order are placed on the ascending
    energy eigenbasis; the result commutes with H and the operation is
    idempotent.
    """
    _check_dims(rho, hamiltonian)
    values = rho.eigenvalues()
    return DensityMatrix.from_diagonal(np.clip(values, 0.0, None))


def ergotropy(rho: DensityMatrix, hamiltonian: Hamiltonian) -> float:
    """W_e = tr(rho H) - tr(rho_p H); nonnegative, zero iff rho is passive."""
    w = energy(rho, hamiltonian) - energy(passive_state(rho, hamiltonian), hamiltonian)
    return max(0.0, float(w))


def anti_ergotropy(rho: DensityMatrix, hamiltonian: Hamiltonian) -> float:
    """Maximal unitarily addable energy: pair eigenvalues ascending with
    ascending energies and subtract the current energy."""
    _check_dims(rho, hamiltonian)
    values = rho.eigenvalues()[::-1]  # ascending
    active_energy = float(np.sum(values * np.asarray(hamiltonian.energies)))
    return max(0.0, active_energy - energy(rho, hamiltonian))


def passive_energy_bruteforce(rho: DensityMatrix, hamiltonian: Hamiltonian) -> float:
    """Oracle: minimize tr(P rho_diag P^T H) over all level permutations.

    Exponential in d; intended for tests at small dimension.
    """
    _check_dims(rho, hamiltonian)
    values = rho.eigenvalues()
    energies = np.asarray(hamiltonian.energies)
    return min(float(np.sum(values[list(perm)] * energies)) for perm in permutations(range(rho.dim)))


def ergotropy_qubit_closed(r: BlochVector, z_tau: float, p: float, e: float = 1.0) -> float:
    """Closed-form ergotropy of the evolved qubit state under
    rho -> p rho + (1-p) tau with passive tau = (I + z_tau s3)/2 and
    H = e |1><1|.

    The evolved Bloch vector is (p x, p y, p z + (1-p) z_tau), so

        W_e = (e/2) [ sqrt(p^2 (r^2 - z^2) + (p z + (1-p) z_tau)^2)
                      - p z - (1-p) z_tau ].
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    if e <= 0:
        raise ValueError("energy gap must be positive")
    if not 0.0 <= z_tau <= 1.0:
        raise ValueError(f"fixed point is not passive for this Hamiltonian: z_tau = {z_tau}")
    r2 = r.x**2 + r.y**2 + r.z**2
    z_evolved = p * r.z + (1.0 - p) * z_tau
    radical = p * p * (r2 - r.z**2) + z_evolved**2
    return 0.5 * e * (float(np.sqrt(max(radical, 0.0))) - z_evolved)


def _w_pure(z: float, z_tau: float, p: float, e: float) -> float:
    # Closed form restricted to pure states (r = 1).
    z_evolved = p * z + (1.0 - p) * z_tau
    radical = p * p * (1.0 - z * z) + z_evolved**2
    return 0.5 * e * (np.sqrt(max(radical, 0.0)) - z_evolved)


def max_ergotropy_state(z_tau: float, p: float, e: float = 1.0) -> tuple[float, float]:
    """Maximize the evolved-state ergotropy over input states.

    The closed form is nondecreasing in the Bloch length at fixed z, so
    the search runs over pure states z in [-1, 1]: a 1001-point grid
    followed by golden-section refinement to 1e-10, with the interval
    endpoints evaluated exactly.  Returns (z_opt, W_max).
    """
    if not 0.0 <= z_tau <= 1.0:
        raise ValueError(f"fixed point is not passive for this Hamiltonian: z_tau = {z_tau}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    zs = np.linspace(-1.0, 1.0, 1001)
    z_evolved = p * zs + (1.0 - p) * z_tau
    ws = 0.5 * e * (np.sqrt(np.clip(p * p * (1.0 - zs * zs) + z_evolved**2, 0.0, None)) - z_evolved)
    i = int(np.argmax(ws))
    lo = zs[max(0, i - 1)]
    hi = zs[min(zs.size - 1, i + 1)]
    # Golden-section refinement on the bracketing cell.
    a, b = float(lo), float(hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _w_pure(c, z_tau, p, e)
    fd = _w_pure(d, z_tau, p, e)
    while b - a > 1e-10:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _w_pure(c, z_tau, p, e)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _w_pure(d, z_tau, p, e)
    z_refined = 0.5 * (a + b)
    candidates = np.array([-1.0, 1.0, z_refined, float(zs[i])])
    values = np.array([_w_pure(z, z_tau, p, e) for z in candidates])
    best = int(np.argmax(values))
    return float(candidates[best]), float(values[best])


def _qubit_channel_params(channel: ErgodicChannel, hamiltonian: Hamiltonian) -> tuple[float, float]:
    """(z_tau, energy gap) of a qubit channel whose fixed point is passive."""
    if channel.dim != 2 or hamiltonian.dim != 2:
        raise ValueError("the ergotropy measure is implemented for qubit channels")
    gap = hamiltonian.energies[1] - hamiltonian.energies[0]
    if gap <= 0:
        raise ValueError("qubit Hamiltonian must be nondegenerate")
    z_tau = float(channel.tau.matrix[0, 0].real - channel.tau.matrix[1, 1].real)
    if z_tau < -1e-12:
        raise ValueError(f"fixed point is not passive for this Hamiltonian: z_tau = {z_tau:.3e}")
    return max(0.0, z_tau), float(gap)


def w_max_at(channel: ErgodicChannel, hamiltonian: Hamiltonian, t: float) -> float:
    """Maximal-input ergotropy W_max(t) by numeric maximization."""
    z_tau, gap = _qubit_channel_params(channel, hamiltonian)
    p, _ = channel.schedule.evaluate(t)
    return max_ergotropy_state(z_tau, p, gap)[1]


def sigma_w(channel: ErgodicChannel, hamiltonian: Hamiltonian, t: float) -> SigmaWSample:
    """Rate of change of W_max(t) by central difference (step 1e-6 max(1, t)).

    The maximized ergotropy is a smooth function of p, including through
    p = 0, so no singularity gating is needed; a one-sided difference is
    used next to t = 0.  Returns the measure max(0, derivative) together
    with the raw derivative.
    """
    z_tau, gap = _qubit_channel_params(channel, hamiltonian)
    step = 1e-6 * max(1.0, abs(t))

    def w_of(ti: float) -> float:
        p, _ = channel.schedule.evaluate(ti)
        return max_ergotropy_state(z_tau, p, gap)[1]

    if t >= step:
        derivative = (w_of(t + step) - w_of(t - step)) / (2.0 * step)
    else:
        derivative = (w_of(t + step) - w_of(t)) / step
    return SigmaWSample(measure=max(0.0, derivative), derivative=derivative)


def nm_measure(channel: ErgodicChannel, hamiltonian: Hamiltonian,
               times: np.ndarray) -> ErgotropyTrace:
    """Ergotropy-based non-Markovianity trace over a time grid.

    N_W is the trapezoid integral of max(0, sigma_W); the normalized
    measure N_W/(1 + N_W) lies in [0, 1).
    """
    ts = np.asarray(times, dtype=float)
    if ts.ndim != 1 or ts.size < 2:
        raise ValueError("time grid must contain at least two points")
    w_vals = np.array([w_max_at(channel, hamiltonian, t) for t in ts])
    measures = np.array([sigma_w(channel, hamiltonian, t).measure for t in ts])
    cumulative = np.concatenate([[0.0], cumulative_trapezoid(measures, ts)])
    n_w = float(cumulative[-1])
    return ErgotropyTrace(
        times=tuple(float(t) for t in ts),
        w_max=tuple(float(w) for w in w_vals),
        sigma_w=tuple(float(m) for m in measures),
        n_w_cumulative=tuple(float(c) for c in cumulative),
        script_n_w=n_w / (1.0 + n_w),
    )


def w_max_comparison_form(p: float, z_tau: float, e: float = 1.0) -> float:
    """Unverified comparison curve for the maximized ergotropy.

    Implements the expression (e/2) ((2 p^2 - 1) z_tau
    + sqrt((p+1)/(1-p) + z_tau^2)) / (p+1), whose maximizing input is
    unstated and which diverges as p -> 1.  It disagrees with the
    numeric maximization and is provided only so that the disagreement
    can be inspected; the numeric route is authoritative.
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("comparison form requires p in [0, 1)")
    inner = (p + 1.0) / (1.0 - p) + z_tau**2
    return 0.5 * e * ((2.0 * p * p - 1.0) * z_tau + float(np.sqrt(inner))) / (p + 1.0)
