"""Static divisibility analysis of the qubit ergodic channel.

The channel rho -> p rho + (1-p) tau has the Pauli-basis transfer matrix
(T-matrix) with first column (1, (1-p) b) and lower-right block p*I3,
where b is the Bloch vector of tau.  Its determinant p^3 settles
P-divisibility; the eigenvalues of C = T T^T give the Lorentz-normal
singular values (s1, s2, s3), and the margin s_min^2 - s1 s2 s3 decides
infinitesimal divisibility.  The closed-form spectrum is cross-checked
against a numeric eigendecomposition on every call; on disagreement the
numeric oracle wins.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .matkernel import PAULI, BlochVector

__all__ = [
    "LorentzForm",
    "ScanSummary",
    "TMatrix",
    "choi_from_t_matrix",
    "divisibility_scan",
    "infinitesimal_divisibility",
    "lorentz_eigenvalues_closed",
    "lorentz_singular_values",
    "p_divisibility",
    "t_matrix",
]

logger = logging.getLogger(__name__)

#: Round-off budget below which a margin still counts as divisible.
MARGIN_TOL = -1e-12


@dataclass(frozen=True)
class TMatrix:
    """Pauli-basis affine representation of the qubit ergodic channel."""

    entries: np.ndarray
    b: BlochVector
    p: float

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"T-matrix must be 4 x 4, got {m.shape}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    def apply(self, pauli_vector: np.ndarray) -> np.ndarray:
        """Act on a Bloch 4-vector (1, x, y, z)."""
        return self.entries @ np.asarray(pauli_vector, dtype=float)


@dataclass(frozen=True)
class LorentzForm:
    """Spectrum of C = T T^T and the Lorentz-normal singular values.

    ``e`` is descending with e1 >= e2 = e3 >= e4 >= 0,
    ``s = (sqrt(e2/e1), sqrt(e3/e1), sqrt(e4/e1))`` with s1 = s2 >= s3,
    and ``margin = s3^2 - s1 s2 s3``.
    """

    e: tuple[float, float, float, float]
    s: tuple[float, float, float]
    margin: float


@dataclass(frozen=True)
class ScanSummary:
    """Grid-scan summary: the minimal margin and where it occurs."""

    min_margin: float
    at_b: float
    at_p: float
    rows: int


def t_matrix(b: BlochVector, p: float) -> TMatrix:
    """T-matrix of the channel with fixed-point Bloch vector b and probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1, 0] = (1.0 - p) * b.x
    m[2, 0] = (1.0 - p) * b.y
    m[3, 0] = (1.0 - p) * b.z
    m[1, 1] = m[2, 2] = m[3, 3] = p
    return TMatrix(entries=m, b=b, p=p)


def p_divisibility(t: TMatrix) -> tuple[float, bool]:
    """Determinant p^3 of the T-matrix and the P-divisibility verdict.

    The lower-right block is p*I3, so det T = p^3 exactly; it is
    nonnegative for every p in [0, 1], hence the channel is always
    P-divisible.
    """
    det = t.p**3
    return det, det >= 0.0


def lorentz_eigenvalues_closed(b_len: float, p: float) -> np.ndarray:
    """Closed-form eigenvalues of C = T T^T, descending.

    e2 = e3 = p^2 and e1/e4 = (tr +- sqrt(rad))/2 with
    tr = 1 + p^2 + (1-p)^2 b^2 and
    rad = (1-p)^2 (b^2+1) ((1-p)^2 b^2 + (p+1)^2); the whole bracket is
    halved (the p = 1 anchor e = (1,1,1,1) fixes the division scope).
    """
    beta = (1.0 - p) ** 2 * b_len**2
    tr = 1.0 + p**2 + beta
    rad = (1.0 - p) ** 2 * (b_len**2 + 1.0) * ((1.0 - p) ** 2 * b_len**2 + (p + 1.0) ** 2)
    root = np.sqrt(max(rad, 0.0))
    e1 = 0.5 * (tr + root)
    e4 = 0.5 * (tr - root)
    return np.array([e1, p**2, p**2, e4])


def _lorentz_eigenvalues_numeric(b: BlochVector, p: float) -> np.ndarray:
    t = t_matrix(b, p)
    c = t.entries @ t.entries.T
    return np.linalg.eigvalsh(c)[::-1]


def lorentz_singular_values(b_len: float, p: float,
                            oracle_tol: float = 1e-10) -> LorentzForm:
    """Lorentz-normal singular values of the channel with |b| = b_len.

    The spectrum of C depends on b only through its length, so the
    canonical orientation b = (0, 0, b_len) is used.  The closed-form
    eigenvalues are validated against the numeric spectrum of T T^T; if
    they disagree beyond ``oracle_tol`` the numeric values win and the
    discrepancy is logged.  Requires p > 0 (full Kraus rank).
    """
    if not 0.0 <= b_len <= 1.0:
        raise ValueError(f"Bloch length must lie in [0, 1], got {b_len}")
    if not 0.0 < p <= 1.0:
        raise ValueError(f"rank-deficient channel: need p in (0, 1], got {p}")
    e_closed = lorentz_eigenvalues_closed(b_len, p)
    e_numeric = _lorentz_eigenvalues_numeric(BlochVector(0.0, 0.0, b_len), p)
    deviation = float(np.max(np.abs(e_closed - e_numeric)))
    if deviation > oracle_tol:
        logger.warning(
            "closed-form C-spectrum deviates from the numeric oracle by %.3e at (b=%g, p=%g); using numeric values",
            deviation, b_len, p,
        )
        e = np.clip(e_numeric, 0.0, None)
    else:
        e = np.clip(e_closed, 0.0, None)
    s = tuple(float(np.sqrt(e[i] / e[0])) for i in (1, 2, 3))
    margin = s[2] ** 2 - s[0] * s[1] * s[2]
    return LorentzForm(e=tuple(float(x) for x in e), s=s, margin=float(margin))


def infinitesimal_divisibility(b_len: float, p: float) -> tuple[float, bool]:
    """Margin s_min^2 - s1 s2 s3 and whether the channel is
    infinitesimally divisible (margin >= 0 up to round-off with
    strictly positive singular values)."""
    form = lorentz_singular_values(b_len, p)
    product = form.s[0] * form.s[1] * form.s[2]
    return form.margin, bool(form.margin >= MARGIN_TOL and product > 0.0)


def divisibility_scan(grid_b: int = 101, grid_p: int = 101) -> tuple[list[tuple[float, ...]], ScanSummary]:
    """Row-major sweep of (b, p) with p in (0, 1].

    Returns CSV-ready rows (b, p, s1, s2, s3, margin) and a summary with
    the minimal margin over the grid.
    """
    if grid_b < 2 or grid_p < 2:
        raise ValueError("grid counts must be at least 2")
    bs = np.linspace(0.0, 1.0, grid_b)
    ps = np.arange(1, grid_p + 1) / grid_p
    rows: list[tuple[float, ...]] = []
    min_margin = np.inf
    at_b = at_p = 0.0
    for b in bs:
        for p in ps:
            form = lorentz_singular_values(float(b), float(p))
            rows.append((float(b), float(p), *form.s, form.margin))
            if form.margin < min_margin:
                min_margin = form.margin
                at_b, at_p = float(b), float(p)
    return rows, ScanSummary(min_margin=float(min_margin), at_b=at_b, at_p=at_p, rows=len(rows))


def choi_from_t_matrix(t: TMatrix) -> np.ndarray:
    """Choi-state candidate sum_ij T_ij s_i (x) s_j (full-rank channels).

    Implemented as written, without a normalization convention; the
    result is Hermitian because T is real, and is not used by any
    measure.
    """
    out = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            out += t.entries[i, j] * np.kron(PAULI[i], PAULI[j])
    return out
