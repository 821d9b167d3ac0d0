"""Certificates for real eventual exponential positivity (rEEP).

A matrix ``M`` is rEEP when ``Re(exp(M t)) > 0`` entrywise for all large
``t``. Three independent routes are provided:

* :func:`reep_by_sampling` evaluates ``exp(M t)`` on a geometric grid and
  confirms the asymptotic sign pattern from the dominant spectral projector.
* :func:`reep_by_shifted_pf` shifts ``M`` by ``d I`` and checks the strong
  complex Perron-Frobenius property and eigenvector cone conditions.
* :func:`reep_by_spectrum` applies the class-specific spectral criteria for
  undirected graphs and weight-balanced unsigned digraphs.

:func:`equivalence_audit` evaluates every clause of the applicable
equivalence chain separately and reports disagreements.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import numkernel as nk
from .netmodel import GraphClass
from .spectral import (
    ZERO_TOL,
    LaplacianBundle,
    SpectralError,
    corank,
    is_psd_corank1,
    spectral_projector,
    symmetric_part,
)

GAP_TOL = 1e-8
CONE_TOL = 1e-9
EPS_POS = 1e-12
DEFAULT_SAMPLES = 64
HORIZON = 20.0
SHIFT_MARGIN = 1.01


class Verdict(str, enum.Enum):
    REEP = "rEEP"
    NOT_REEP = "not_rEEP"
    INCONCLUSIVE = "inconclusive"


class Criterion(str, enum.Enum):
    SAMPLING = "sampling"
    SHIFTED_PF = "shifted_pf"
    SPECTRAL_CLASS = "spectral_class"


@dataclass(frozen=True)
class PfReport:
    dominant_eigenvalue: complex
    is_simple: bool
    strictly_dominant: bool
    right_vector_ok: bool
    in_set_O: bool
    dominant_positive: bool = False
    borderline: bool = False
    diagnostic: str = ""

    @property
    def strong_pf(self) -> bool:
        return (
            self.dominant_positive
            and self.is_simple
            and self.strictly_dominant
            and self.right_vector_ok
        )


@dataclass(frozen=True)
class ReepCertificate:
    verdict: Verdict
    criterion: Criterion
    shift_d: float | None = None
    t0_estimate: float | None = None
    witness: str = ""
    evidence: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def conclusive(self) -> bool:
        return self.verdict is not Verdict.INCONCLUSIVE

    def as_bool(self) -> bool | None:
        return None if not self.conclusive else self.verdict is Verdict.REEP


def _cone_margin(v: np.ndarray) -> float:
    """min_i Re(v_i) - |Im(v_i)|; non-negative iff v lies in the cone."""
    return float(np.min(v.real - np.abs(v.imag)))


def strong_pf_check(M) -> PfReport:
    """Dominant eigenpair diagnostics for the strong complex Perron-Frobenius property."""
    M = nk.as_matrix(M, square=True)
    try:
        dec = nk.eig(M)
    except nk.NumericalError as exc:
        return PfReport(0j, False, False, False, False, diagnostic=str(exc))
    w = dec.eigenvalues
    k = len(w) - 1  # ascending modulus, ties by real part: last is dominant
    lam = complex(w[k])
    rho = abs(lam)
    if dec.is_defective:
        return PfReport(
            lam, False, False, False, False,
            diagnostic=f"defective eigenbasis (cond {dec.condition:.2e})",
        )
    eps = GAP_TOL * max(rho, np.finfo(float).tiny)
    others = np.delete(w, k)
    simple = bool(np.all(np.abs(others - lam) > eps))
    strict = bool(np.all(rho > np.abs(others) + eps))
    positive = bool(lam.real > eps and abs(lam.imag) <= eps)
    x = dec.right_vectors[:, k]
    z = dec.left_vectors[:, k]
    right_ok = bool(np.all(x.real > CONE_TOL))
    mx, mz = _cone_margin(x), _cone_margin(z)
    in_O = mx >= -CONE_TOL and mz >= -CONE_TOL
    borderline = abs(mx) <= CONE_TOL or abs(mz) <= CONE_TOL
    return PfReport(
        dominant_eigenvalue=lam,
        is_simple=simple,
        strictly_dominant=strict,
        right_vector_ok=right_ok,
        in_set_O=bool(in_O),
        dominant_positive=positive,
        borderline=bool(borderline),
    )


def shift_d(L_spectrum, tol: float = ZERO_TOL) -> float:
    """Shift ``d`` making ``d`` the strictly dominant eigenvalue of ``d I - L``.

    ``|d - lam| < d`` holds iff ``d > |lam|^2 / (2 Re lam)``; the returned
    value carries a 1% margin over the largest such threshold.
    """
    w = np.asarray(L_spectrum, dtype=complex)
    scale = tol * max(float(np.abs(w).max()), np.finfo(float).tiny)
    zero = np.abs(w) <= scale
    if zero.sum() != 1:
        raise SpectralError(f"expected exactly one zero eigenvalue, found {int(zero.sum())}")
    nz = w[~zero]
    if nz.size == 0:
        return 1.0
    if np.any(nz.real <= 0):
        bad = nz[nz.real <= 0][0]
        raise SpectralError(f"eigenvalue {bad:.6g} has non-positive real part; no shift exists")
    return float(SHIFT_MARGIN * np.max(np.abs(nz) ** 2 / (2 * nz.real)))


def _default_horizon(w: np.ndarray, lead: np.ndarray) -> float:
    rest = w[~lead]
    sep = w.real.max() - rest.real.max() if rest.size else 1.0
    return HORIZON / sep


def _asymptotics(M: np.ndarray, dec: nk.EigenDecomposition | None):
    """Classify the large-t sign behaviour of Re(exp(M t)).

    Returns (kind, alpha, lead_mask, detail, projector) with kind one of
    ``positive``, ``nonpositive``, ``oscillating`` or ``unknown``.
    """
    scale = nk.norm2(M)
    if dec is None:
        w = nk.eigvals(M)
        alpha = float(w.real.max())
        return "unknown", alpha, w.real >= alpha - GAP_TOL * max(scale, 1e-300), "no eigenbasis", None
    w = dec.eigenvalues
    alpha = float(w.real.max())
    lead = w.real >= alpha - GAP_TOL * max(scale, 1e-300)
    lw = w[lead]
    real_lead = np.abs(lw.imag) <= GAP_TOL * max(scale, 1e-300)
    if not real_lead.any():
        return "oscillating", alpha, lead, f"rightmost eigenvalues are non-real: {np.round(lw, 8).tolist()}", None
    if not real_lead.all():
        return "unknown", alpha, lead, "rightmost eigenvalues mix real and non-real values", None
    if dec.is_defective:
        return "unknown", alpha, lead, "defective eigenbasis", None
    P = spectral_projector(dec, np.flatnonzero(lead))
    Pr = P.real
    ptol = CONE_TOL * max(float(np.abs(P).max()), 1e-300)
    i, j = np.unravel_index(np.argmin(Pr), Pr.shape)
    if Pr[i, j] > ptol:
        return "positive", alpha, lead, "", P
    return (
        "nonpositive", alpha, lead,
        f"dominant projector entry ({i},{j}) has real part {Pr[i, j]:.6g}",
        P,
    )


def reep_by_sampling(
    M,
    t_max: float | None = None,
    samples: int = DEFAULT_SAMPLES,
    eps_pos: float = EPS_POS,
) -> ReepCertificate:
    """Sample ``Re(exp(M t))`` on ``samples`` geometric points in ``(t_max/1000, t_max]``.

    The exponential is evaluated as ``exp((M - alpha I) t)`` with ``alpha`` the
    largest real part in the spectrum; the positive factor ``exp(alpha t)``
    does not change signs, and thresholds are rescaled accordingly.
    """
    M = nk.as_matrix(M, square=True)
    if samples < 16:
        raise ValueError("need at least 16 samples")
    if t_max is not None and not t_max > 0:
        raise ValueError("t_max must be positive")
    try:
        dec = nk.eig(M)
    except nk.NumericalError:
        dec = None
    kind, alpha, lead, detail, P = _asymptotics(M, dec)
    scale = nk.norm2(M)
    w = dec.eigenvalues if dec is not None else nk.eigvals(M)
    if abs(alpha) <= GAP_TOL * max(scale, 1e-300):
        alpha = 0.0
    if t_max is None:
        t_max = _default_horizon(w, lead)

    ts = np.geomspace(t_max / 1000, t_max, samples)
    shifted = M - alpha * np.eye(M.shape[0])
    pos = np.zeros(samples, dtype=bool)
    settled = np.zeros(samples, dtype=bool)
    worst = []
    margin = 0.5 * float(P.real.min()) if kind == "positive" else None
    with np.errstate(over="ignore", under="ignore"):
        thresholds = eps_pos * np.exp(-alpha * ts)
    for k, t in enumerate(ts):
        try:
            E = nk.expm(shifted * t)
        except nk.ExpmOverflow:
            worst.append(-np.inf)
            continue
        lo = float(E.real.min())
        worst.append(lo)
        pos[k] = lo > thresholds[k]
        if margin is not None:
            settled[k] = float(np.abs(E - P).max()) <= margin

    tail = np.flatnonzero(~pos)
    k0 = 0 if tail.size == 0 else (int(tail[-1]) + 1 if tail[-1] + 1 < samples else None)
    # once the transient is below half the smallest limit entry, positivity must persist
    onset = np.flatnonzero(settled)
    relapse = bool(onset.size and np.any(~pos[onset[0]:]))
    evidence = {
        "t_max": float(t_max),
        "samples": samples,
        "alpha": alpha,
        "diverges": alpha > 0,
        "asymptotics": kind,
        "final_min_real": worst[-1],
        "t_settled": float(ts[onset[0]]) if onset.size else None,
    }

    if kind in ("nonpositive", "oscillating"):
        return ReepCertificate(Verdict.NOT_REEP, Criterion.SAMPLING, witness=detail, evidence=evidence)
    if kind == "positive" and k0 is not None and onset.size and not relapse:
        return ReepCertificate(
            Verdict.REEP, Criterion.SAMPLING, t0_estimate=float(ts[k0]), evidence=evidence
        )
    if relapse:
        detail = "positivity lost after the transient settled"
    elif kind == "positive":
        detail = "limit positive but the transient has not settled by t_max"
    return ReepCertificate(Verdict.INCONCLUSIVE, Criterion.SAMPLING, witness=detail, evidence=evidence)


def reep_by_shifted_pf(M) -> ReepCertificate:
    """Shift ``M`` by ``d I`` so its rightmost eigenvalue dominates, then test the cone conditions.

    rEEP when ``M + d I`` has the strong PF property with dominant right and
    left eigenvectors inside ``Re(v) >= |Im(v)|``; not rEEP when the rightmost
    eigenvalue is non-real (no shift can make it dominant and real).
    """
    M = nk.as_matrix(M, square=True)
    w = nk.eigvals(M)
    scale = max(nk.norm2(M), np.finfo(float).tiny)
    k = int(np.argmax(w.real))
    lam = w[k]
    others = np.delete(w, k)
    if abs(lam.imag) > GAP_TOL * scale:
        return ReepCertificate(
            Verdict.NOT_REEP, Criterion.SHIFTED_PF,
            witness=f"rightmost eigenvalue {lam:.6g} is non-real",
        )
    lam = lam.real
    if others.size and np.any(others.real >= lam - GAP_TOL * scale):
        return ReepCertificate(
            Verdict.INCONCLUSIVE, Criterion.SHIFTED_PF,
            witness="rightmost eigenvalue is not isolated in real part",
        )
    thr = max(0.0, -lam)
    if others.size:
        thr = max(thr, float(np.max((np.abs(others) ** 2 - lam**2) / (2 * (lam - others.real)))))
    d = SHIFT_MARGIN * thr if thr > 0 else 0.0
    if lam + d <= 0:
        d = -lam + GAP_TOL * scale
    pf = strong_pf_check(M + d * np.eye(M.shape[0]))
    evidence = {"pf": pf}
    if pf.borderline:
        return ReepCertificate(
            Verdict.INCONCLUSIVE, Criterion.SHIFTED_PF, shift_d=d,
            witness="dominant eigenvector on the cone boundary", evidence=evidence,
        )
    if pf.strong_pf and pf.in_set_O:
        return ReepCertificate(Verdict.REEP, Criterion.SHIFTED_PF, shift_d=d, evidence=evidence)
    return ReepCertificate(
        Verdict.INCONCLUSIVE, Criterion.SHIFTED_PF, shift_d=d,
        witness="dominant eigenvectors outside the cone; criterion does not apply",
        evidence=evidence,
    )


def theorem_class(bundle: LaplacianBundle) -> str | None:
    """'a', 'b' or 'c' for the graph classes with a spectral criterion, else None."""
    s = bundle.structure
    if not s.connected:
        return None
    if s.graph_class is GraphClass.UNSIGNED_UNDIRECTED:
        return "a"
    if s.graph_class is GraphClass.SIGNED_UNDIRECTED and np.array_equal(bundle.L, bundle.L.T):
        return "b"
    if s.graph_class is GraphClass.UNSIGNED_DIGRAPH and s.weight_balanced:
        return "c"
    return None


def _failing_eigenvalue(bundle: LaplacianBundle) -> str:
    if bundle.corank != 1:
        return f"zero eigenvalue has multiplicity {bundle.corank}"
    nz = bundle.nonzero_eigenvalues()
    bad = nz[nz.real <= ZERO_TOL * nk.norm2(bundle.L)]
    return f"eigenvalue {bad[0]:.6g} of L is not in the open right half-plane" if bad.size else ""


def reep_by_spectrum(bundle: LaplacianBundle) -> ReepCertificate:
    """Class-conditional verdict for ``-L``.

    Undirected (signed or not) connected graphs and strongly connected
    weight-balanced unsigned digraphs: ``-L`` is rEEP iff ``L`` has a simple
    zero eigenvalue and every other eigenvalue in the open right half-plane.
    With complex weights a simple zero alone is not enough (a directed
    3-cycle with weights ``1j`` has corank 1 and an unstable mode), so the
    half-plane condition is always checked; ``evidence["corank_only"]``
    records the bare corank test.
    """
    cls = theorem_class(bundle)
    evidence = {"class": cls, "corank": bundle.corank, "corank_only": bundle.corank == 1}
    if cls is None:
        return ReepCertificate(
            Verdict.INCONCLUSIVE, Criterion.SPECTRAL_CLASS,
            witness=f"no spectral criterion for {bundle.structure.graph_class.value} "
            f"(connected={bundle.structure.connected}, "
            f"weight_balanced={bundle.structure.weight_balanced})",
            evidence=evidence,
        )
    ok = is_psd_corank1(bundle.L)
    evidence["psd_corank1"] = ok
    if ok:
        return ReepCertificate(Verdict.REEP, Criterion.SPECTRAL_CLASS, evidence=evidence)
    return ReepCertificate(
        Verdict.NOT_REEP, Criterion.SPECTRAL_CLASS,
        witness=_failing_eigenvalue(bundle), evidence=evidence,
    )


@dataclass(frozen=True)
class AuditReport:
    theorem: str
    clauses: dict[str, bool | None]
    agree: bool
    anomalies: tuple[str, ...]
    certificates: dict[str, ReepCertificate] = field(default_factory=dict, compare=False)


def equivalence_audit(bundle: LaplacianBundle, **sampling_kw) -> AuditReport:
    """Evaluate each clause of the applicable equivalence chain independently."""
    cls = theorem_class(bundle)
    if cls is None:
        raise SpectralError(
            f"no equivalence chain applies to {bundle.structure.graph_class.value} "
            f"(connected={bundle.structure.connected}, weight_balanced={bundle.structure.weight_balanced})"
        )
    L, P = bundle.L, bundle.L_pinv
    certs = {
        "-L rEEP": reep_by_sampling(-L, **sampling_kw),
        "-L^+ rEEP": reep_by_sampling(-P, **sampling_kw),
    }
    clauses: dict[str, bool | None] = {}
    if cls == "a":
        theorem = "unsigned undirected"
        clauses["L simple zero eigenvalue"] = corank(L) == 1
        clauses["-L rEEP"] = certs["-L rEEP"].as_bool()
        clauses["L^+ psd corank 1"] = is_psd_corank1(P)
        clauses["-L^+ rEEP"] = certs["-L^+ rEEP"].as_bool()
    elif cls == "b":
        theorem = "signed undirected"
        clauses["L psd corank 1"] = is_psd_corank1(L)
        clauses["-L rEEP"] = certs["-L rEEP"].as_bool()
        clauses["L^+ psd corank 1"] = is_psd_corank1(P)
        clauses["-L^+ rEEP"] = certs["-L^+ rEEP"].as_bool()
    else:
        theorem = "weight-balanced unsigned digraph"
        clauses["-L rEEP"] = certs["-L rEEP"].as_bool()
        clauses["L^+ simple zero eigenvalue"] = corank(P) == 1
        clauses["-L^+ rEEP"] = certs["-L^+ rEEP"].as_bool()
        clauses["(L^+)_s psd corank 1"] = is_psd_corank1(symmetric_part(P))

    anomalies = [f"{k}: inconclusive ({certs[k].witness})" for k, v in clauses.items() if v is None]
    decided = {v for v in clauses.values() if v is not None}
    agree = len(decided) <= 1
    if not agree:
        truth = ", ".join(f"{k}={v}" for k, v in clauses.items())
        anomalies.append(f"clauses disagree: {truth}")
    return AuditReport(theorem, clauses, agree, tuple(anomalies), certs)
