"""Divisibility (RHP) and information-backflow (BLP) non-Markovianity rates.

The RHP rate probes complete positivity of the instantaneous propagator
id + delta*L through the trace norm of its Choi state; for the ergodic
channel it is positive exactly on windows where pdot > 0 and there has
the closed form (3/2)|pdot/p| for qubits.  The BLP rate is the maximal
time derivative of the trace distance over initial state pairs, which
the affine channel contracts exactly by p_t, giving the closed form
pdot.  Both vanish together, on the same windows.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf

import numpy as np
from scipy.optimize import brentq

from .channels import EPS_P, ErgodicChannel, ProbabilitySchedule
from .errors import SingularScheduleError
from .lindblad import Superoperator, ergodic_generator_family
from .matkernel import BlochVector, bloch_to_density, random_pure_state, trace_distance

__all__ = [
    "DIVERGENCE_P",
    "BlpResult",
    "RhpResult",
    "backflow_windows",
    "blp_integrated",
    "blp_rate",
    "fibonacci_sphere",
    "rhp_closed",
    "rhp_closed_qubit",
    "rhp_rate",
    "rhp_rate_checked",
    "rhp_result",
]

#: Below this channel probability the RHP rate is reported as +inf.
DIVERGENCE_P = 1e-6

#: Raw rates in (-RHP_CLAMP, 0) are round-off and clamped to zero.
RHP_CLAMP = 1e-8


@dataclass(frozen=True)
class RhpResult:
    """RHP rate at one time: numeric value, closed form, and the delta used."""

    t: float
    g_numeric: float
    g_closed: float
    delta_used: float


@dataclass(frozen=True)
class BlpResult:
    """BLP rate at one time.

    ``b_numeric`` is the sampled maximum of d/dt D over initial pairs,
    ``b_closed`` the supremum pdot (attained as D(0) -> 1), and
    ``maximizing_pair`` the Bloch vectors of the best sampled pair
    (qubits only).
    """

    t: float
    b_numeric: float
    b_closed: float
    maximizing_pair: tuple[BlochVector, BlochVector] | None = None

    def backflow(self) -> float:
        """The reported measure value max(0, b_numeric)."""
        return max(0.0, self.b_numeric)


def _maximally_entangled(d: int) -> np.ndarray:
    phi = np.zeros(d * d, dtype=complex)
    for i in range(d):
        phi[i * d + i] = 1.0
    return phi / np.sqrt(d)


def rhp_rate(generator: Superoperator, d: int, delta: float = 1e-6) -> float:
    """Numeric RHP rate (||C||_1 - 1)/delta of the instantaneous propagator.

    ``C = (id (x) (id + delta L)) |phi><phi|`` with |phi> the maximally
    entangled state in d x d.  Values in (-1e-8, 0) are clamped to 0.
    """
    if not 0.0 < delta <= 1e-3:
        raise ValueError(f"delta must lie in (0, 1e-3], got {delta}")
    if generator.dim != d:
        raise ValueError(f"generator dimension {generator.dim} does not match d = {d}")
    phi = _maximally_entangled(d)
    choi = np.outer(phi, phi.conj())
    # Apply id (x) (id + delta L) blockwise on the second factor:
    # the (i, j) block of the Choi state is <i| . |j> (x) |i><j| / d.
    basis_op = np.zeros((d, d), dtype=complex)
    out = choi.copy()
    for i in range(d):
        for j in range(d):
            basis_op[:, :] = 0.0
            basis_op[i, j] = 1.0 / d
            block = generator.apply(basis_op)
            out[i * d:(i + 1) * d, j * d:(j + 1) * d] += delta * block
    out = 0.5 * (out + out.conj().T)
    tn = float(np.sum(np.abs(np.linalg.eigvalsh(out))))
    g = (tn - 1.0) / delta
    if -RHP_CLAMP < g < 0.0:
        return 0.0
    return g


def rhp_rate_checked(generator: Superoperator, d: int, delta: float = 1e-6,
                     richardson_tol: float = 1e-5) -> float:
    """RHP rate with a delta-halving consistency check.

    The discrete rate at delta and delta/2 must agree within
    ``richardson_tol`` (absolute, scaled by the value for large rates);
    disagreement signals that delta is too coarse for the queried time.
    """
    g1 = rhp_rate(generator, d, delta)
    g2 = rhp_rate(generator, d, delta / 2.0)
    if abs(g1 - g2) > max(richardson_tol, richardson_tol * abs(g2)):
        raise ValueError(
            f"RHP rate not converged in delta: g({delta:g}) = {g1:.8e}, g({delta / 2:g}) = {g2:.8e}"
        )
    return g2


def rhp_closed_qubit(p: float, pdot: float) -> float:
    """Closed-form qubit RHP rate: (3/2)|pdot/p| when pdot > 0, else 0.

    Independent of the fixed point.
    """
    return rhp_closed(p, pdot, 2)


def rhp_closed(p: float, pdot: float, d: int) -> float:
    """Closed-form RHP rate for the d-dimensional ergodic channel.

    The Choi spectrum of id + delta*L gives the prefactor
    2(d^2 - 1)/d^2 on |pdot/p| (3/2 for qubits); the rate vanishes for
    pdot <= 0.
    """
    if p <= EPS_P:
        raise SingularScheduleError(f"channel probability p = {p:.3e} <= {EPS_P:g}")
    if pdot <= 0.0:
        return 0.0
    return float(2.0 * (d**2 - 1) / d**2 * pdot / p)


def rhp_result(channel: ErgodicChannel, t: float, delta: float = 1e-6,
               check: bool = False) -> RhpResult:
    """Numeric and closed RHP rates for an ergodic channel at time t.

    Near channel singularities (p < 1e-6) both entries are reported as
    +inf markers; the rate genuinely diverges there.
    """
    p, pdot = channel.schedule.evaluate(t)
    if p < DIVERGENCE_P:
        return RhpResult(t=t, g_numeric=inf, g_closed=inf, delta_used=delta)
    generator = ergodic_generator_family(channel)(t)
    if check:
        g_num = rhp_rate_checked(generator, channel.dim, delta)
    else:
        g_num = rhp_rate(generator, channel.dim, delta)
    return RhpResult(t=t, g_numeric=g_num, g_closed=rhp_closed(p, pdot, channel.dim), delta_used=delta)


def fibonacci_sphere(n: int) -> np.ndarray:
    """n approximately uniform unit vectors on S^2 (golden-angle spiral)."""
    if n < 1:
        raise ValueError("need at least one direction")
    k = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * k + 1.0) / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = k * np.pi * (3.0 - np.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def blp_rate(channel: ErgodicChannel, t: float, n_samples: int = 512,
             seed: int = 42) -> BlpResult:
    """Sampled BLP rate max over initial pairs of d/dt D(rho1(t), rho2(t)).

    The channel contracts trace distance exactly by p_t, so the
    derivative for a pair is pdot * D(rho1(0), rho2(0)) and the
    supremum over pairs is pdot (antipodal pure states, D(0) = 1).  For
    qubits the sampler enumerates ``n_samples`` antipodal pure pairs on
    a Fibonacci sphere; for d > 2 it draws seeded Haar-random pure
    pairs.
    """
    if n_samples < 2:
        raise ValueError("need at least two sampled pairs")
    _, pdot = channel.schedule.evaluate(t)
    if channel.dim == 2:
        directions = fibonacci_sphere(n_samples)
        best = None
        best_pair = None
        for v in directions:
            b1 = BlochVector(*v)
            b2 = b1.negated()
            dist0 = trace_distance(bloch_to_density(b1), bloch_to_density(b2))
            derivative = pdot * dist0
            if best is None or derivative > best:
                best = derivative
                best_pair = (b1, b2)
        return BlpResult(t=t, b_numeric=float(best), b_closed=pdot, maximizing_pair=best_pair)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_samples):
        rho1 = random_pure_state(rng, channel.dim)
        rho2 = random_pure_state(rng, channel.dim)
        derivative = pdot * trace_distance(rho1, rho2)
        if best is None or derivative > best:
            best = derivative
    return BlpResult(t=t, b_numeric=float(best), b_closed=pdot, maximizing_pair=None)


def backflow_windows(schedule: ProbabilitySchedule, t_max: float,
                     grid_points: int = 10_000) -> list[tuple[float, float]]:
    """Maximal intervals of [0, t_max] on which pdot > 0.

    Sign changes of pdot are located on a dense grid and refined by
    root bracketing; subintervals are classified by the sign of pdot at
    their midpoint.
    """
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    ts = np.linspace(0.0, t_max, grid_points)
    pdots = np.array([schedule.evaluate(t)[1] for t in ts])

    def pdot_at(t: float) -> float:
        return schedule.evaluate(t)[1]

    boundaries = [0.0]
    for k in range(ts.size - 1):
        a, b = pdots[k], pdots[k + 1]
        if a == 0.0 or a * b >= 0.0:
            continue
        boundaries.append(float(brentq(pdot_at, ts[k], ts[k + 1], xtol=1e-12)))
    boundaries.append(t_max)

    windows: list[tuple[float, float]] = []
    for a, b in zip(boundaries[:-1], boundaries[1:]):
        if b - a <= 0.0:
            continue
        if pdot_at(0.5 * (a + b)) > 0.0:
            windows.append((a, b))
    return windows


def blp_integrated(channel: ErgodicChannel, times: np.ndarray) -> float:
    """Trapezoid integral of max(0, pdot) over the grid.

    Convenience quantity: the time-integrated backflow of the
    trace-distance derivative for the maximizing (antipodal) pair.
    """
    ts = np.asarray(times, dtype=float)
    rates = np.array([max(0.0, channel.schedule.evaluate(t)[1]) for t in ts])
    return float(np.trapezoid(rates, ts))
