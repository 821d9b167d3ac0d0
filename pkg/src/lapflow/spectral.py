"""Laplacians, their pseudoinverses, and spectral facts derived from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import numkernel as nk
from .netmodel import ComplexGraph, StructureReport, adjacency, classify, ordered_row_sums

ZERO_TOL = 1e-8
PINV_RANK_TOL = 1e-10
PINV_CHECK_TOL = 1e-8


class SpectralError(ValueError):
    pass


class PinvVerificationError(nk.NumericalError):
    pass


def laplacian(G: ComplexGraph) -> np.ndarray:
    """``L = D_out - A`` with the diagonal set to the negated off-diagonal row sum."""
    L = -adjacency(G)
    np.fill_diagonal(L, 0)
    # ordered_row_sums of -A equals -D_out bit for bit; adding it back is exact
    L[np.diag_indices(G.n)] = -ordered_row_sums(L)
    return L


def exact_row_sums(L: np.ndarray) -> np.ndarray:
    """Off-diagonal entries summed left to right, then the diagonal added.

    Zero for every row of a matrix built by :func:`laplacian`, with no
    rounding at all.
    """
    off = np.array(L, dtype=complex)
    diag = off.diagonal().copy()
    np.fill_diagonal(off, 0)
    return ordered_row_sums(off) + diag


def corank(M, tol: float = ZERO_TOL) -> int:
    """Number of singular values at or below ``tol * s_max``."""
    M = nk.as_matrix(M, square=True)
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s <= tol * s[0]))


def is_psd_corank1(M, tol: float = ZERO_TOL) -> bool:
    """One eigenvalue at zero, all others strictly in the right half-plane.

    "psd" here is the eigenvalue-based notion for complex matrices, not
    positive semidefiniteness of a Hermitian form.
    """
    M = nk.as_matrix(M, square=True)
    w = nk.eigvals(M)
    scale = tol * nk.norm2(M)
    zero = np.abs(w) <= scale
    return bool(zero.sum() == 1 and np.all(w[~zero].real > scale))


def pinv_spectrum_map(spectrum, tol: float = ZERO_TOL) -> np.ndarray:
    """Spectrum of ``L^+`` from that of ``L``: zero stays, the rest invert."""
    w = np.asarray(spectrum, dtype=complex)
    scale = tol * max(float(np.abs(w).max()), 1e-300)
    zero = np.abs(w) <= scale
    if zero.sum() != 1:
        raise SpectralError(f"expected exactly one zero eigenvalue, found {int(zero.sum())}")
    out = np.where(zero, 0, 1 / np.where(zero, 1, w))
    return out[nk.sort_order(out, float(np.abs(out).max()) or 1.0)]


def symmetric_part(M, kind: Literal["hermitian", "transpose"] = "hermitian") -> np.ndarray:
    """``(M + M^H)/2`` by default; ``kind="transpose"`` gives ``(M + M^T)/2``."""
    M = nk.as_matrix(M, square=True)
    if kind == "hermitian":
        return (M + M.conj().T) / 2
    if kind == "transpose":
        return (M + M.T) / 2
    raise ValueError(f"unknown kind {kind!r}")


def has_zero_line_sums(L, tol: float = 1e-9) -> bool:
    L = np.asarray(L, dtype=complex)
    scale = tol * max(1.0, float(np.abs(L).max()))
    return bool(np.abs(L.sum(axis=1)).max() <= scale and np.abs(L.sum(axis=0)).max() <= scale)


def laplacian_pinv(
    L,
    route: Literal["general", "projector"] = "general",
    rank_tol: float = PINV_RANK_TOL,
) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a Laplacian.

    ``general`` uses the SVD. ``projector`` uses ``(L + J/n)^-1 - J/n`` and
    needs zero row and column sums with a simple zero eigenvalue; its result
    is checked against the four Penrose relations before being returned.
    """
    L = nk.as_matrix(L, square=True)
    if route == "general":
        return nk.pinv(L, rank_tol=rank_tol)
    if route != "projector":
        raise ValueError(f"unknown route {route!r}")
    n = L.shape[0]
    if not has_zero_line_sums(L):
        raise SpectralError("projector route needs zero row and column sums")
    if corank(L) != 1:
        raise SpectralError("projector route needs a simple zero eigenvalue")
    J = np.full((n, n), 1.0 / n, dtype=complex)
    P = np.array(nk.solve(L + J, np.eye(n, dtype=complex))) - J
    failed = {k: v for k, v in nk.penrose_residuals(L, P).items() if v > PINV_CHECK_TOL}
    if failed:
        raise PinvVerificationError(f"Penrose relations violated: {failed}")
    P.flags.writeable = False
    return P


def spectral_projector(decomp: nk.EigenDecomposition, idx) -> np.ndarray:
    """Oblique projector onto the eigenspace spanned by columns ``idx``."""
    idx = np.atleast_1d(idx)
    X = decomp.right_vectors[:, idx]
    Z = decomp.left_vectors[:, idx]
    G = Z.conj().T @ X
    return X @ np.linalg.solve(G, Z.conj().T)


@dataclass(frozen=True)
class LaplacianBundle:
    L: np.ndarray
    L_pinv: np.ndarray
    spectrum: nk.EigenDecomposition
    corank: int
    right_null: np.ndarray
    left_null: np.ndarray
    structure: StructureReport
    graph: ComplexGraph | None = None

    @property
    def n(self) -> int:
        return self.L.shape[0]

    def nonzero_eigenvalues(self, tol: float = ZERO_TOL) -> np.ndarray:
        w = self.spectrum.eigenvalues
        return w[np.abs(w) > tol * nk.norm2(self.L)]

    @property
    def gap(self) -> float:
        """Smallest real part among nonzero eigenvalues (may be <= 0)."""
        w = self.nonzero_eigenvalues()
        return float(w.real.min()) if w.size else np.inf

    def consensus_ready(self) -> bool:
        return self.corank == 1 and self.gap > ZERO_TOL * nk.norm2(self.L)


def analyze(G: ComplexGraph) -> LaplacianBundle:
    L = laplacian(G)
    L.flags.writeable = False
    dec = nk.eig(L)
    return LaplacianBundle(
        L=L,
        L_pinv=laplacian_pinv(L),
        spectrum=dec,
        corank=corank(L),
        right_null=dec.right_vectors[:, 0],
        left_null=dec.left_vectors[:, 0],
        structure=classify(G),
        graph=G,
    )


def limit_matrix(bundle: LaplacianBundle) -> np.ndarray:
    """``lim exp(-L t)`` as ``x z^H / (z^H x)`` for the null pair ``(x, z)``."""
    if bundle.corank != 1:
        raise SpectralError(f"limit needs corank 1, got {bundle.corank}")
    if not bundle.gap > ZERO_TOL * nk.norm2(bundle.L):
        raise SpectralError(
            f"nonzero eigenvalue with real part {bundle.gap:.3e} <= 0; exp(-L t) has no limit"
        )
    x, z = bundle.right_null, bundle.left_null
    return np.outer(x, z.conj()) / (z.conj() @ x)
