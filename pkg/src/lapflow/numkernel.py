"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Functions return
read-only arrays so results can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

EPS = np.finfo(float).eps
EIG_TOL = 1e-8
DEFECTIVE_COND = 1e8
SINGULAR_COND = 1e13


class NumericalError(RuntimeError):
    """A kernel routine could not produce a result meeting its accuracy contract."""


class ExpmOverflow(NumericalError, OverflowError):
    pass


class SingularMatrixError(NumericalError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def as_matrix(M, square: bool = False) -> np.ndarray:
    """Validate and convert to a finite complex 2-D array."""
    a = np.array(M, dtype=complex)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def norm2(M: np.ndarray) -> float:
    return float(np.linalg.norm(M, 2))


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its first (near-)largest-modulus entry is real positive."""
    mod = np.abs(v)
    top = mod.max()
    if top == 0:
        return v.copy()
    k = int(np.flatnonzero(mod >= top * (1 - 1e-9))[0])
    return v * (np.conj(v[k]) / mod[k])


def sort_order(values: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Ascending modulus, then real part, then imaginary part.

    Keys are quantized relative to ``scale`` so that values equal up to
    round-off (e.g. a conjugate pair) order by real/imag part deterministically.
    """
    scale = scale if scale > 0 else 1.0
    q = lambda x: np.round(x / scale, 10)  # noqa: E731
    return np.lexsort((q(values.imag), q(values.real), q(np.abs(values))))


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    right_vectors: np.ndarray  # columns, unit norm, phase-fixed
    left_vectors: np.ndarray  # columns z_i with z_i^H M = lambda_i z_i^H
    is_defective: bool
    condition: float  # 2-norm condition number of the right eigenvector basis

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max())


def eig(M) -> EigenDecomposition:
    """Eigenvalues with paired right and left eigenvectors.

    Raises NumericalError when LAPACK fails or a residual exceeds
    ``EIG_TOL * ||M||``. Near-defective inputs are flagged, not rejected.
    """
    M = as_matrix(M, square=True)
    try:
        w, vl, vr = scipy.linalg.eig(M, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    nrm = norm2(M)
    order = sort_order(w, nrm)
    w, vl, vr = w[order], vl[:, order], vr[:, order]

    vr = vr / np.linalg.norm(vr, axis=0)
    vl = vl / np.linalg.norm(vl, axis=0)
    for i in range(len(w)):
        vr[:, i] = fix_phase(vr[:, i])
        vl[:, i] = fix_phase(vl[:, i])

    bound = EIG_TOL * nrm
    res_r = np.linalg.norm(M @ vr - vr * w, axis=0)
    res_l = np.linalg.norm(vl.conj().T @ M - w[:, None] * vl.conj().T, axis=1)
    if res_r.max() > bound or res_l.max() > bound:
        raise NumericalError(
            f"eigen residual {max(res_r.max(), res_l.max()):.3e} exceeds {bound:.3e}"
        )
    cond = float(np.linalg.cond(vr)) if len(w) > 1 else 1.0
    if not np.isfinite(cond):
        cond = np.inf
    return EigenDecomposition(
        eigenvalues=_frozen(w),
        right_vectors=_frozen(vr),
        left_vectors=_frozen(vl),
        is_defective=bool(cond > DEFECTIVE_COND),
        condition=cond,
    )


def eigvals(M) -> np.ndarray:
    M = as_matrix(M, square=True)
    w = np.linalg.eigvals(M)
    return w[sort_order(w, norm2(M))]


@dataclass(frozen=True)
class PinvResult:
    pinv: np.ndarray
    rank: int
    singular_values: np.ndarray
    threshold: float


def pinv(M, rank_tol: float | None = None, return_rank: bool = False):
    """Moore-Penrose pseudoinverse via the SVD.

    Singular values at or below ``rank_tol * s_max`` are treated as zero.
    The default ``rank_tol`` is ``max(m, n) * eps``.
    """
    M = as_matrix(M)
    if rank_tol is None:
        rank_tol = max(M.shape) * EPS
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    threshold = rank_tol * s[0] if s.size else 0.0
    keep = s > threshold
    if s[0] == 0:
        keep[:] = False
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    P = (vh.conj().T * s_inv) @ u.conj().T
    P = _frozen(P)
    if return_rank:
        return PinvResult(P, int(keep.sum()), _frozen(s), float(threshold))
    return P


def penrose_residuals(M, P) -> dict[str, float]:
    """Residuals of the four Moore-Penrose relations.

    The first two are relative to ``||M||`` and ``||P||``. ``MP`` and ``PM``
    are orthogonal projectors of unit scale, so their Hermitian defects are
    reported as is.
    """
    M = np.asarray(M, dtype=complex)
    P = np.asarray(P, dtype=complex)
    nM = max(np.linalg.norm(M), np.finfo(float).tiny)
    nP = max(np.linalg.norm(P), np.finfo(float).tiny)
    MP = M @ P
    PM = P @ M
    return {
        "MPM=M": float(np.linalg.norm(MP @ M - M) / nM),
        "PMP=P": float(np.linalg.norm(PM @ P - P) / nP),
        "MP hermitian": float(np.linalg.norm(MP.conj().T - MP)),
        "PM hermitian": float(np.linalg.norm(PM.conj().T - PM)),
    }


def expm(M) -> np.ndarray:
    """Matrix exponential (Pade scaling and squaring).

    Raises ExpmOverflow instead of returning infinities.
    """
    M = as_matrix(M, square=True)
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(M)
    if not np.all(np.isfinite(E)):
        raise ExpmOverflow(f"matrix exponential overflows (||M||_1 = {np.linalg.norm(M, 1):.3e})")
    return _frozen(E)


def solve(M, B, return_cond: bool = False):
    """Solve ``M X = B``; refuses matrices singular to working precision."""
    M = as_matrix(M, square=True)
    B = np.array(B, dtype=complex)
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularMatrixError(f"matrix is singular to tolerance (cond = {cond:.3e})")
    X = _frozen(np.linalg.solve(M, B))
    return (X, cond) if return_cond else X


def is_nonnegative(M, tol: float = 0.0) -> bool:
    """Entrywise Re >= 0 and Im >= 0 (the complex non-negativity convention)."""
    M = np.asarray(M, dtype=complex)
    return bool(np.all(M.real >= -tol) and np.all(M.imag >= -tol))


def is_real_positive(M, eps: float = 0.0) -> bool:
    """Entrywise Re > eps."""
    return bool(np.all(np.asarray(M, dtype=complex).real > eps))
