"""Dense complex-matrix kernel used by every other module.

Provides Hermitian eigendecomposition with a deterministic ordering
convention, trace norm / trace distance, PSD matrix square roots,
column-stacking vectorization, Bloch-vector conversions and the
``DensityMatrix`` value type.

Conventions fixed here and relied on everywhere else:

* eigenvalues are returned in descending order;
* ``vec`` stacks columns, so ``vec(A X B) = (B^T (x) A) vec(X)``;
* the qubit Bloch convention is ``rho = (I + x s1 + y s2 + z s3)/2``
  with ``s3 = diag(1, -1)``, hence z = +1 is the ground state ``|0>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolationError

__all__ = [
    "PAULI",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "BlochVector",
    "DensityMatrix",
    "bloch_to_density",
    "density_to_bloch",
    "eig_hermitian",
    "matrix_sqrt_psd",
    "random_density_matrix",
    "random_pure_state",
    "trace_distance",
    "trace_norm",
    "unvec",
    "vec",
]

#: Pauli matrices (identity included as element 0).
PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

#: Lowering operator (s1 - i s2)/2 = |1><0|.
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)
#: Raising operator (s1 + i s2)/2 = |0><1|.
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

# Default tolerances of the kernel.
HERMITICITY_TOL = 1e-10
EIGEN_CLIP_TOL = 1e-12


def _as_square(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def _hermiticity_deviation(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector: vec(A)[i + j*d] = A[i, j]."""
    return np.asarray(matrix).T.reshape(-1)

def unvec(vector: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(vector).reshape(-1)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    if dim * dim != v.size:
        raise ValueError(f"vector of length {v.size} is not a vectorized square matrix")
    return v.reshape(dim, dim).T


def eig_hermitian(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized to (M + M^dagger)/2 before decomposition;
    inputs that deviate from Hermiticity by more than ``tol`` are
    rejected.  Returns ``(values, vectors)`` with eigenvectors in the
    columns, ordered by descending eigenvalue.  Ordering is made
    deterministic by fixing each eigenvector's global phase (largest
    component real positive) and, within degenerate clusters, sorting
    lexicographically on the real parts of the vectors.
    """
    m = _as_square(matrix)
    dev = _hermiticity_deviation(m)
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian within {tol:g} (deviation {dev:.3e})")
    m = 0.5 * (m + m.conj().T)
    values, vectors = np.linalg.eigh(m)
    values = values[::-1]
    vectors = vectors[:, ::-1]

    # Deterministic phase: make the largest-magnitude entry of each column
    # real and positive.
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if np.abs(pivot) > 0:
            vectors[:, k] = col * (np.conj(pivot) / np.abs(pivot))

    # Deterministic order inside (numerically) degenerate clusters.
    k = 0
    n = values.size
    while k < n:
        j = k + 1
        while j < n and abs(values[j] - values[k]) <= 1e-14 * max(1.0, abs(values[k])):
            j += 1
        if j - k > 1:
            block = vectors[:, k:j]
            order = np.lexsort(block.real[::-1])
            vectors[:, k:j] = block[:, order]
        k = j
    return values, vectors


def trace_norm(matrix: np.ndarray) -> float:
    """Trace norm ||M||_1 = sum of singular values."""
    m = _as_square(matrix)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def _trace_norm_hermitian(m: np.ndarray) -> float:
    # For Hermitian input the singular values are |eigenvalues|.
    return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (m + m.conj().T)))))


def trace_distance(rho1: "DensityMatrix", rho2: "DensityMatrix") -> float:
    """Trace distance D(rho1, rho2) = ||rho1 - rho2||_1 / 2, in [0, 1]."""
    if rho1.dim != rho2.dim:
        raise ValueError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    d = _trace_norm_hermitian(rho1.matrix - rho2.matrix) / 2.0
    return float(min(max(d, 0.0), 1.0))


def matrix_sqrt_psd(matrix: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Hermitian PSD square root R of a PSD matrix M, with R @ R = M.

    Eigenvalues in [-tol, 0) are treated as round-off and clipped to
    zero; anything more negative is an error.
    """
    m = _as_square(matrix)
    values, vectors = eig_hermitian(m, tol=tol)
    if values[-1] < -tol:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {values[-1]:.3e}")
    values = np.clip(values, 0.0, None)
    root = (vectors * np.sqrt(values)) @ vectors.conj().T
    return 0.5 * (root + root.conj().T)


@dataclass(frozen=True)
class BlochVector:
    """Real 3-vector (x, y, z) with norm at most 1 (up to round-off)."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if self.norm() > 1.0 + 1e-12:
            raise ValueError(f"Bloch vector has norm {self.norm():.12f} > 1")

    def norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def negated(self) -> "BlochVector":
        return BlochVector(-self.x, -self.y, -self.z)


def project_to_state(matrix: np.ndarray, atol: float = EIGEN_CLIP_TOL,
                     strict: bool = True) -> np.ndarray:
    """Project a near-state matrix onto the density-matrix manifold.

    Symmetrizes, clips eigenvalues in [-atol, 0) to zero and renormalizes
    the trace; rejects inputs whose Hermiticity deviation, trace error or
    negativity exceed the acceptance budget.  ``strict=False`` skips the
    Hermiticity-deviation check (for integrator-internal states that are
    Hermitian by construction).  Positivity is certified cheaply via a
    Gershgorin bound or a Cholesky factorization where possible; only
    genuinely borderline matrices pay for an eigendecomposition.
    """
    m = _as_square(matrix, "density matrix")
    if strict:
        dev = _hermiticity_deviation(m)
        # Accept round-off sized deviations only; symmetrize in all cases.
        if dev > max(1e-8, atol):
            raise ValueError(f"density matrix is not Hermitian (deviation {dev:.3e})")
    m = 0.5 * (m + m.conj().T)
    tr = float(m.diagonal().real.sum())
    if abs(tr - 1.0) > max(1e-6, atol):
        raise ValueError(f"density matrix has trace {tr:.9f}, expected 1")
    diag = m.diagonal().real
    radii = np.abs(m).sum(axis=1) - np.abs(m.diagonal())
    certified = bool(np.min(diag - radii) >= 0.0)
    if not certified:
        try:
            np.linalg.cholesky(m)
            certified = True
        except np.linalg.LinAlgError:
            certified = False
    if not certified:
        values = np.linalg.eigvalsh(m)
        if values[0] < -atol:
            raise ValueError(f"density matrix has negative eigenvalue {values[0]:.3e}")
        if values[0] < 0.0:
            values_full, vectors = np.linalg.eigh(m)
            values_full = np.clip(values_full, 0.0, None)
            m = (vectors * values_full) @ vectors.conj().T
            m = 0.5 * (m + m.conj().T)
            tr = float(m.diagonal().real.sum())
    m = m / tr
    m.flags.writeable = False
    return m


class DensityMatrix:
    """A d x d Hermitian, unit-trace, PSD state.

    Construction projects the input onto the density-matrix manifold:
    the matrix is symmetrized, eigenvalues in [-atol, 0) are clipped to
    zero and the trace is renormalized.  Violations beyond ``atol`` are
    rejected.  The stored array is read-only.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix: np.ndarray, atol: float = EIGEN_CLIP_TOL):
        object.__setattr__(self, "_matrix", project_to_state(matrix, atol))

    @classmethod
    def _wrap_projected(cls, matrix: np.ndarray) -> "DensityMatrix":
        # Internal: matrix must already be the output of project_to_state.
        obj = object.__new__(cls)
        object.__setattr__(obj, "_matrix", matrix)
        return obj

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum in descending order."""
        return eig_hermitian(self._matrix)[0]

    def is_diagonal(self, tol: float = 1e-12) -> bool:
        off = self._matrix - np.diag(np.diag(self._matrix))
        return bool(np.max(np.abs(off)) <= tol) if off.size else True

    @classmethod
    def from_diagonal(cls, populations) -> "DensityMatrix":
        p = np.asarray(populations, dtype=float)
        return cls(np.diag(p.astype(complex)))

    @classmethod
    def from_bloch(cls, v: BlochVector) -> "DensityMatrix":
        return bloch_to_density(v)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def pure(cls, state: np.ndarray) -> "DensityMatrix":
        psi = np.asarray(state, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(psi)
        if nrm == 0:
            raise ValueError("zero vector is not a state")
        psi = psi / nrm
        return cls(np.outer(psi, psi.conj()))

    def to_bloch(self) -> BlochVector:
        return density_to_bloch(self)

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"


def bloch_to_density(v: BlochVector) -> DensityMatrix:
    """Qubit state (I + x s1 + y s2 + z s3)/2 for a valid Bloch vector."""
    m = 0.5 * (PAULI[0] + v.x * PAULI[1] + v.y * PAULI[2] + v.z * PAULI[3])
    return DensityMatrix(m)


def density_to_bloch(rho: DensityMatrix) -> BlochVector:
    """Bloch components (tr(rho s_i)) of a qubit state."""
    if rho.dim != 2:
        raise ValueError(f"Bloch vectors are defined for qubits, got dim {rho.dim}")
    comps = [float(np.trace(rho.matrix @ PAULI[i]).real) for i in (1, 2, 3)]
    # Round-off from projection can push the norm epsilon past 1.
    arr = np.array(comps)
    nrm = float(np.linalg.norm(arr))
    if nrm > 1.0:
        if nrm > 1.0 + 1e-12:
            raise InvariantViolationError(f"qubit state produced Bloch norm {nrm}")
        arr = arr / nrm
    return BlochVector(*arr)


def random_density_matrix(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """Full-rank random state rho = G G^dagger / tr (Ginibre ensemble)."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_pure_state(rng: np.random.Generator, dim: int) -> DensityMatrix:
    """Haar-random pure state of dimension ``dim``."""
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return DensityMatrix.pure(psi)
