"""Lindblad-type generators for ergodic channels and their integration.

The channel L_t(rho) = p_t rho + (1-p_t) tau with diagonal tau obeys the
elementwise master equation

    d rho_ij / dt = (pdot/p) (rho_ij - tau_ij),

which is realized here in three interchangeable ways: the explicit qubit
generator (dephasing on s3 plus raising/lowering jumps), the
d-dimensional generator (projector dephasing plus |i><j| jumps weighted
by tau populations), and the elementwise superoperator that serves as
the reference oracle for both.  A classical RK4 integrator and the
transfer-matrix extraction route L(t) = Fdot(t) F(t)^-1 in a Hermitian
operator basis complete the module.

Vectorization is column-stacking throughout: vec(A X B) = (B^T (x) A) vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channels import EPS_P, ErgodicChannel
from .errors import InvariantViolationError, NonInvertibleMapError, SingularScheduleError
from .matkernel import (PAULI, SIGMA_MINUS, SIGMA_PLUS, DensityMatrix,
                        project_to_state, unvec, vec)

__all__ = [
    "HermitianBasis",
    "LindbladTerm",
    "Superoperator",
    "assemble_generator",
    "dissipator_superop",
    "ergodic_generator_family",
    "ergodic_map_family",
    "extract_generator",
    "generator_ddim",
    "generator_elementwise",
    "generator_qubit",
    "hamiltonian_superop",
    "hermitian_basis",
    "integrate",
    "lindblad_terms_ddim",
    "lindblad_terms_qubit",
]


@dataclass(frozen=True)
class Superoperator:
    """A d^2 x d^2 matrix acting on column-vectorized d x d operators."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = self.matrix
        if not (isinstance(m, np.ndarray) and m.dtype == np.complex128 and not m.flags.writeable):
            m = np.asarray(m, dtype=complex).copy()
            m.flags.writeable = False
        if m.shape != (self.dim**2, self.dim**2):
            raise ValueError(f"superoperator for dim {self.dim} must be {self.dim**2} x {self.dim**2}, got {m.shape}")
        object.__setattr__(self, "matrix", m)

    def apply(self, operator: np.ndarray) -> np.ndarray:
        """Apply to a d x d operator and return the resulting d x d operator."""
        op = np.asarray(operator, dtype=complex)
        if op.shape != (self.dim, self.dim):
            raise ValueError(f"operator must be {self.dim} x {self.dim}, got {op.shape}")
        return unvec(self.matrix @ vec(op), self.dim)

    def scaled(self, factor: float) -> "Superoperator":
        out = factor * self.matrix
        out.flags.writeable = False
        return Superoperator(self.dim, out)


@dataclass(frozen=True)
class LindbladTerm:
    """One dissipator channel: rate gamma and jump operator A."""

    rate: float
    operator: np.ndarray


@dataclass(frozen=True)
class HermitianBasis:
    """Hermitian orthonormal operator basis {G_n} with G_0 = I/sqrt(d).

    All elements except G_0 are traceless and Tr[G_m G_n] = delta_mn.
    """

    dim: int
    elements: tuple[np.ndarray, ...]

    def matrix(self) -> np.ndarray:
        """Unitary basis-change matrix whose columns are vec(G_n)."""
        return np.stack([vec(g) for g in self.elements], axis=1)


def dissipator_superop(operator: np.ndarray) -> Superoperator:
    """Superoperator of D[A](rho) = A rho A^dagger - {A^dagger A, rho}/2."""
    a = np.asarray(operator, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"jump operator must be square, got shape {a.shape}")
    d = a.shape[0]
    eye = np.eye(d, dtype=complex)
    ada = a.conj().T @ a
    m = np.kron(a.conj(), a) - 0.5 * (np.kron(eye, ada) + np.kron(ada.T, eye))
    return Superoperator(d, m)


def hamiltonian_superop(hamiltonian: np.ndarray) -> Superoperator:
    """Superoperator of the coherent part -i[H, rho].

    The ergodic-channel generators carry no coherent part; this slot
    exists so that assembled generators can be extended with one.
    """
    h = np.asarray(hamiltonian, dtype=complex)
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    return Superoperator(d, -1.0j * (np.kron(eye, h) - np.kron(h.T, eye)))


def assemble_generator(terms: Sequence[LindbladTerm],
                       hamiltonian: np.ndarray | None = None) -> Superoperator:
    """Sum rate-weighted dissipators plus an optional coherent part."""
    if not terms and hamiltonian is None:
        raise ValueError("generator needs at least one term")
    dim = (terms[0].operator.shape[0] if terms else hamiltonian.shape[0])
    total = np.zeros((dim**2, dim**2), dtype=complex)
    for term in terms:
        total = total + term.rate * dissipator_superop(term.operator).matrix
    if hamiltonian is not None:
        total = total + hamiltonian_superop(hamiltonian).matrix
    return Superoperator(dim, total)


def _log_derivative(p: float, pdot: float, eps_p: float = EPS_P) -> float:
    if p <= eps_p:
        raise SingularScheduleError(f"channel probability p = {p:.3e} <= {eps_p:g}; generator undefined")
    return pdot / p


def lindblad_terms_qubit(tau: DensityMatrix, p: float, pdot: float) -> list[LindbladTerm]:
    """Rates and operators of the qubit generator.

    Dephasing at rate -(pdot/p)/4 on s3, a lowering jump at rate
    -(pdot/p) tau_11 on (s1 - i s2)/2 and a raising jump at rate
    -(pdot/p) tau_00 on (s1 + i s2)/2.  All rates are nonnegative
    exactly when pdot <= 0.
    """
    if tau.dim != 2:
        raise ValueError("qubit generator requires a 2-dimensional fixed point")
    if not tau.is_diagonal(tol=1e-12):
        raise ValueError("fixed point must be diagonal")
    c = _log_derivative(p, pdot)
    t00 = float(tau.matrix[0, 0].real)
    t11 = float(tau.matrix[1, 1].real)
    return [
        LindbladTerm(-0.25 * c, PAULI[3]),
        LindbladTerm(-t11 * c, SIGMA_MINUS),
        LindbladTerm(-t00 * c, SIGMA_PLUS),
    ]


def generator_qubit(tau: DensityMatrix, p: float, pdot: float) -> Superoperator:
    """Qubit master-equation generator; annihilates tau."""
    return assemble_generator(lindblad_terms_qubit(tau, p, pdot))


def lindblad_terms_ddim(tau: DensityMatrix, p: float, pdot: float) -> list[LindbladTerm]:
    """Rates and operators of the d-dimensional generator.

    Jump terms |i><j| at rate -(pdot/p) tau_ii for every ordered pair
    i != j, plus projector dephasing |k><k| at rate -(pdot/p) tau_kk.
    The projector terms act only on coherences, where they contribute
    the increment (pdot/p) (tau_ii + tau_jj)/2 rho_ij, so together with
    the jump part every component obeys
    d rho_ij/dt = (pdot/p)(rho_ij - tau_ij).
    """
    if not tau.is_diagonal(tol=1e-12):
        raise ValueError("fixed point must be diagonal")
    c = _log_derivative(p, pdot)
    d = tau.dim
    pops = np.diag(tau.matrix).real
    terms: list[LindbladTerm] = []
    for k in range(d):
        proj = np.zeros((d, d), dtype=complex)
        proj[k, k] = 1.0
        terms.append(LindbladTerm(-c * float(pops[k]), proj))
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            jump = np.zeros((d, d), dtype=complex)
            jump[i, j] = 1.0
            terms.append(LindbladTerm(-c * float(pops[i]), jump))
    return terms


def generator_ddim(tau: DensityMatrix, p: float, pdot: float) -> Superoperator:
    """d-dimensional master-equation generator; agrees with
    :func:`generator_qubit` for d = 2 and with
    :func:`generator_elementwise` for every d."""
    return assemble_generator(lindblad_terms_ddim(tau, p, pdot))


def generator_elementwise(tau: DensityMatrix, p: float, pdot: float) -> Superoperator:
    """Reference generator: L(rho) = (pdot/p) (rho - tr(rho) tau)."""
    c = _log_derivative(p, pdot)
    d = tau.dim
    eye = np.eye(d**2, dtype=complex)
    m = c * (eye - np.outer(vec(tau.matrix), vec(np.eye(d))))
    return Superoperator(d, m)


class ScalarScaledFamily:
    """Generator family of the form L(t) = c(t) * L0 with fixed structure.

    Callable like any map ``t -> Superoperator``; :func:`integrate`
    recognizes the fixed structure and avoids rebuilding the matrix at
    every substep.  ``scalar_many``, when present, evaluates c on a whole
    time grid at once.
    """

    def __init__(self, structure: Superoperator, scalar: Callable[[float], float],
                 scalar_many: Callable[[np.ndarray], np.ndarray] | None = None):
        self.structure = structure
        self.scalar = scalar
        self.scalar_many = scalar_many

    def __call__(self, t: float) -> Superoperator:
        return self.structure.scaled(self.scalar(t))


def ergodic_generator_family(channel: ErgodicChannel) -> ScalarScaledFamily:
    """Time-dependent generator t -> L(t) of an ergodic channel.

    The generator depends on time only through the scalar pdot/p, so the
    structural superoperator is built once (from the d-dimensional form)
    and rescaled per query.  Raises ``SingularScheduleError`` at times
    where p(t) is below the invertibility floor.
    """
    structure = generator_ddim(channel.tau, 1.0, 1.0)  # pdot/p = 1
    schedule = channel.schedule

    def scalar_many(ts: np.ndarray) -> np.ndarray:
        p, pdot = schedule.evaluate_many(ts)
        bad = np.flatnonzero(p <= EPS_P)
        if bad.size:
            t_bad = float(np.asarray(ts, dtype=float)[bad[0]])
            raise SingularScheduleError(
                f"channel probability p({t_bad:.9g}) = {p[bad[0]]:.3e} <= {EPS_P:g}")
        return pdot / p

    return ScalarScaledFamily(structure, schedule.log_derivative, scalar_many)


def ergodic_map_family(channel: ErgodicChannel) -> Callable[[float], Superoperator]:
    """Dynamical-map superoperators t -> Omega_t with Omega_0 = id."""
    d = channel.dim
    eye = np.eye(d**2, dtype=complex)
    reset = np.outer(vec(channel.tau.matrix), vec(np.eye(d)))

    def family(t: float) -> Superoperator:
        p, _ = channel.schedule.evaluate(t)
        return Superoperator(d, p * eye + (1.0 - p) * reset)

    return family


def integrate(generator: Superoperator | Callable[[float], Superoperator],
              rho0: DensityMatrix,
              times: np.ndarray,
              projection_atol: float = 1e-9) -> list[DensityMatrix]:
    """Integrate d rho/dt = L(t) rho with classical RK4 on a uniform grid.

    The generator is re-evaluated at the half and full substeps of each
    interval; every grid-point state is re-projected onto the
    density-matrix manifold (symmetrize, clip eigenvalues, renormalize).
    Raises ``SingularScheduleError`` naming the offending time if the
    schedule becomes singular inside the grid and
    ``InvariantViolationError`` on NaN.
    """
    grid = np.asarray(times, dtype=float)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("time grid must be a 1-d array with at least one point")
    if grid.size >= 2:
        steps = np.diff(grid)
        h = steps[0]
        if h <= 0 or np.max(np.abs(steps - h)) > 1e-9 * max(abs(h), 1.0):
            raise ValueError("time grid must be uniform and increasing")

    out = [rho0]
    state = vec(rho0.matrix)

    def advance(state: np.ndarray, k1: np.ndarray, k2: np.ndarray, k3: np.ndarray,
                k4: np.ndarray, h: float, t_next: float) -> np.ndarray:
        new = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(new)):
            raise InvariantViolationError(f"NaN/inf in trajectory at t = {t_next:.9g}")
        try:
            projected = project_to_state(unvec(new, rho0.dim), atol=projection_atol, strict=False)
        except ValueError as exc:
            raise InvariantViolationError(
                f"trajectory left the state manifold at t = {t_next:.9g}: {exc}"
            ) from exc
        out.append(DensityMatrix._wrap_projected(projected))
        return vec(projected)

    def stiffness_error(t: float, stiffness: float) -> SingularScheduleError:
        # A near-singular schedule makes the generator stiff long before
        # p reaches the hard floor; RK4 output would be garbage.
        return SingularScheduleError(
            f"generator too stiff for the grid step at t = {t:.9g} "
            f"(|h L| = {stiffness:.3g}); schedule is near-singular inside the grid"
        )

    if isinstance(generator, ScalarScaledFamily):
        base = generator.structure.matrix
        base_scale = float(np.max(np.abs(base)))
        try:
            if generator.scalar_many is not None:
                c_grid = np.asarray(generator.scalar_many(grid), dtype=float)
                mids = grid[:-1] + 0.5 * np.diff(grid)
                c_mid = np.asarray(generator.scalar_many(mids), dtype=float)
            else:
                c_grid = np.array([generator.scalar(t) for t in grid])
                c_mid = np.array([generator.scalar(t + 0.5 * (grid[k + 1] - t))
                                  for k, t in enumerate(grid[:-1])])
        except SingularScheduleError as exc:
            raise SingularScheduleError(f"singular schedule inside integration grid: {exc}") from exc

        for k in range(grid.size - 1):
            t = grid[k]
            h = grid[k + 1] - t
            c0, cm, c1 = c_grid[k], c_mid[k], c_grid[k + 1]
            stiffness = h * max(abs(c0), abs(cm), abs(c1)) * base_scale
            if stiffness > 2.0:
                raise stiffness_error(t, stiffness)
            k1 = c0 * (base @ state)
            k2 = cm * (base @ (state + 0.5 * h * k1))
            k3 = cm * (base @ (state + 0.5 * h * k2))
            k4 = c1 * (base @ (state + h * k3))
            state = advance(state, k1, k2, k3, k4, h, grid[k + 1])
        return out

    if isinstance(generator, Superoperator):
        family: Callable[[float], Superoperator] = lambda _t: generator
    else:
        family = generator

    def rhs(t: float) -> np.ndarray:
        try:
            return family(t).matrix
        except SingularScheduleError as exc:
            raise SingularScheduleError(f"singular schedule inside integration grid at t = {t:.9g}: {exc}") from exc

    for k in range(grid.size - 1):
        t = grid[k]
        h = grid[k + 1] - t
        l0 = rhs(t)
        lh = rhs(t + 0.5 * h)
        l1 = rhs(t + h)
        stiffness = h * max(np.max(np.abs(l0)), np.max(np.abs(lh)), np.max(np.abs(l1)))
        if stiffness > 2.0:
            raise stiffness_error(t, stiffness)
        k1 = l0 @ state
        k2 = lh @ (state + 0.5 * h * k1)
        k3 = lh @ (state + 0.5 * h * k2)
        k4 = l1 @ (state + h * k3)
        state = advance(state, k1, k2, k3, k4, h, grid[k + 1])
    return out


def hermitian_basis(d: int) -> HermitianBasis:
    """Hermitian orthonormal basis: I/sqrt(d), diagonal and off-diagonal
    generalized Gell-Mann matrices (d^2 elements)."""
    if d < 2:
        raise ValueError(f"basis needs dimension >= 2, got {d}")
    elements: list[np.ndarray] = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -float(l)
        elements.append(np.diag(diag.astype(complex)) / np.sqrt(l * (l + 1)))
    for i in range(d):
        for j in range(i + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[i, j] = sym[j, i] = 1.0 / np.sqrt(2.0)
            elements.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[i, j] = -1.0j / np.sqrt(2.0)
            asym[j, i] = 1.0j / np.sqrt(2.0)
            elements.append(asym)
    return HermitianBasis(d, tuple(elements))


def map_to_transfer_matrix(superop: Superoperator, basis: HermitianBasis) -> np.ndarray:
    """F_mn = Tr[G_m Omega[G_n]] for a map given in the vec representation.

    Real for Hermiticity-preserving maps; the imaginary part is checked
    and discarded.
    """
    b = basis.matrix()
    f = b.conj().T @ superop.matrix @ b
    imag = float(np.max(np.abs(f.imag)))
    if imag > 1e-10:
        raise InvariantViolationError(f"transfer matrix has imaginary part {imag:.3e}; map is not Hermiticity-preserving")
    return f.real


def extract_generator(map_family: Callable[[float], Superoperator],
                      t: float,
                      dt: float = 1e-5,
                      basis: HermitianBasis | None = None,
                      cond_max: float = 1e12) -> Superoperator:
    """Recover the generator L(t) = Fdot(t) F(t)^-1 from a map family.

    ``map_family`` must return the dynamical map Omega_t (vec
    representation) with Omega_0 = id.  F is the transfer matrix of the
    map in the Hermitian operator basis, differentiated by central
    difference with step ``dt``.  Raises ``NonInvertibleMapError`` when
    F(t) has condition number above ``cond_max``.
    """
    if dt <= 0:
        raise ValueError("finite-difference step must be positive")
    omega = map_family(t)
    if basis is None:
        basis = hermitian_basis(omega.dim)
    f_now = map_to_transfer_matrix(omega, basis)
    cond = np.linalg.cond(f_now)
    if not np.isfinite(cond) or cond > cond_max:
        raise NonInvertibleMapError(f"transfer matrix at t = {t:.9g} has condition number {cond:.3e} > {cond_max:.1e}")
    t_minus = max(t - dt, 0.0)
    f_plus = map_to_transfer_matrix(map_family(t + dt), basis)
    f_minus = map_to_transfer_matrix(map_family(t_minus), basis)
    f_dot = (f_plus - f_minus) / (t + dt - t_minus)
    l_basis = f_dot @ np.linalg.inv(f_now)
    b = basis.matrix()
    return Superoperator(omega.dim, b @ l_basis @ b.conj().T)
