"""Acceptance gate: ten criteria at their stated tolerances and time limits.

Each criterion returns ``(passed, detail)``. The pytest wrappers assert both
the outcome and the runtime; a summary line per criterion is printed at the
end of the session (see ``conftest.py``). Run directly with
``python3 tests/test_acceptance.py`` for the same lines without pytest.
"""

from __future__ import annotations

import time

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from lapflow import generators as gen
from lapflow import numkernel as nk
from lapflow.flows import (
    detect_consensus,
    impedance_flow,
    laplacian_flow,
    pinv_flow,
    predicted_consensus_value,
)
from lapflow.ingest import (
    fixture_text,
    impedance_to_graph,
    matpower_to_graph,
    parse_impedance_json,
    parse_matpower,
)
from lapflow.reep import Verdict, reep_by_sampling, reep_by_spectrum, shift_d
from lapflow.spectral import (
    analyze,
    corank,
    exact_row_sums,
    laplacian,
    laplacian_pinv,
    limit_matrix,
    pinv_spectrum_map,
)

RESULTS: dict[int, tuple[bool, float, float, str]] = {}

PER_CLASS = 200
MAKERS = {
    "unsigned undirected": gen.random_unsigned_undirected,
    "signed undirected": gen.random_signed_undirected,
    "balanced digraph": gen.random_balanced_digraph,
}


def family(seed: int, per_class: int = PER_CLASS, n_max: int = 10):
    rng = np.random.default_rng(seed)
    for name, maker in MAKERS.items():
        for _ in range(per_class):
            yield name, maker(rng, int(rng.integers(2, n_max + 1)))


def best_time(fn, repeats: int = 7) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


# -- criteria ----------------------------------------------------------------


def c1_five_node_reciprocal_spectrum():
    out = pinv_spectrum_map(gen.FIVE_NODE_SPECTRUM)
    # one-to-one pairing of computed and reference values
    cost = np.abs(out[:, None] - gen.FIVE_NODE_PINV_SPECTRUM[None, :])
    rows, cols = linear_sum_assignment(cost)
    err = float(cost[rows, cols].max())
    ok = len(out) == len(gen.FIVE_NODE_PINV_SPECTRUM) and err <= 0.01
    return ok, f"max distance to reference values {err:.4f} (tol 0.01)"


def c1_timed():
    return best_time(lambda: pinv_spectrum_map(gen.FIVE_NODE_SPECTRUM))


def c2_five_node_shift():
    d = shift_d(gen.FIVE_NODE_SPECTRUM)
    threshold = d / 1.01
    ok = abs(threshold - 5.43) <= 0.01 and d < 6
    return ok, f"shift_d = {d:.4f} (threshold {threshold:.4f}), below 6: {d < 6}"


def c2_timed():
    return best_time(lambda: shift_d(gen.FIVE_NODE_SPECTRUM))


def c3_penrose():
    rng = np.random.default_rng(303)
    worst = 0.0
    deficient = 0
    for k in range(200):
        n = int(rng.integers(1, 21))
        rank = n if k % 2 else int(rng.integers(0, n))
        deficient += rank < n
        U = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
        V = rng.normal(size=(rank, n)) + 1j * rng.normal(size=(rank, n))
        M = U @ V * rng.uniform(0.01, 100)
        worst = max(worst, max(nk.penrose_residuals(M, nk.pinv(M)).values()))
    return worst <= 1e-8, f"200 matrices ({deficient} rank-deficient), worst residual {worst:.2e} (tol 1e-8)"


def c4_criterion_agreement():
    counts = {name: {"rEEP": 0, "not_rEEP": 0, "inconclusive": 0} for name in MAKERS}
    disagreements = []
    for k, (name, G) in enumerate(family(404)):
        b = analyze(G)
        spec = reep_by_spectrum(b)
        samp = reep_by_sampling(-b.L)
        samp_pinv = reep_by_sampling(-b.L_pinv)
        counts[name][samp.verdict.value] += 1
        if samp.conclusive and samp.verdict is not spec.verdict:
            disagreements.append(f"{name}#{k}: sampling {samp.verdict.value} vs spectral {spec.verdict.value}")
        if samp.verdict is not samp_pinv.verdict:
            disagreements.append(f"{name}#{k}: -L {samp.verdict.value} vs -L^+ {samp_pinv.verdict.value}")
        if not spec.conclusive:
            disagreements.append(f"{name}#{k}: graph fell outside its theorem class")
    summary = "; ".join(f"{k}: {v['rEEP']}/{v['not_rEEP']}/{v['inconclusive']}" for k, v in counts.items())
    detail = f"{len(disagreements)} disagreements; rEEP/not/inconclusive per class: {summary}"
    if disagreements:
        detail += "; first: " + disagreements[0]
    return not disagreements, detail


def c5_consensus_equivalence():
    rng = np.random.default_rng(505)
    bad = []
    achieved = 0
    for k, (name, G) in enumerate(family(404)):
        b = analyze(G)
        x0 = rng.uniform(0, 1, b.n) + 1j * rng.uniform(0, 1, b.n)
        r_l = detect_consensus(laplacian_flow(b, x0))
        r_p = detect_consensus(pinv_flow(b, x0))
        if r_l.achieved != r_p.achieved:
            bad.append(f"{name}#{k}: achieved flags differ")
            continue
        if not r_l.achieved:
            continue
        achieved += 1
        pred = predicted_consensus_value(b, x0)
        for tag, r in (("L", r_l), ("L^+", r_p)):
            if abs(r.consensus_value - pred) > 1e-6:
                bad.append(f"{name}#{k}: -{tag} value off prediction by {abs(r.consensus_value - pred):.2e}")
            if b.structure.weight_balanced and abs(r.consensus_value - x0.mean()) > 1e-6:
                bad.append(f"{name}#{k}: -{tag} value off mean(x0)")
    detail = f"{achieved} of {3 * PER_CLASS} graphs reach consensus in both flows; {len(bad)} violations"
    if bad:
        detail += "; first: " + bad[0]
    return not bad, detail


def c6_projector_route():
    rng = np.random.default_rng(606)
    worst = 0.0
    for k in range(100):
        maker = gen.random_unsigned_undirected if k % 2 else gen.random_balanced_digraph
        L = laplacian(maker(rng, int(rng.integers(2, 13))))
        g = laplacian_pinv(L, "general")
        p = laplacian_pinv(L, "projector")
        worst = max(worst, float(np.linalg.norm(g - p) / np.linalg.norm(g)))
    return worst <= 1e-8, f"100 graphs, worst Frobenius relative gap {worst:.2e} (tol 1e-8)"


def c7_exponential_limit():
    worst = 0.0
    certified = 0
    bad = []
    for k, (name, G) in enumerate(family(404)):
        b = analyze(G)
        if reep_by_sampling(-b.L).verdict is not Verdict.REEP:
            continue
        certified += 1
        P = limit_matrix(b)
        E = nk.expm(-b.L * (20 / b.gap))
        err = float(np.abs(E - P).sum(axis=1).max())
        worst = max(worst, err)
        if err > 1e-6 or P.real.min() <= 0:
            bad.append(f"{name}#{k}")
    detail = f"{certified} rEEP graphs, worst inf-norm error {worst:.2e} (tol 1e-6), {len(bad)} failures"
    return certified > 0 and not bad, detail


def c8_power_network():
    case = parse_matpower(fixture_text("case10_radial.m"))
    G = matpower_to_graph(case)
    b = analyze(G)
    checks = {
        "connected": b.structure.connected,
        "zero row sums": bool(np.all(exact_row_sums(b.L) == 0)),
        "-L rEEP": reep_by_sampling(-b.L).verdict is Verdict.REEP,
        "-L^+ rEEP": reep_by_sampling(-b.L_pinv).verdict is Verdict.REEP,
    }
    x0 = np.random.default_rng(808).uniform(0, 1, G.n) * (1 + 1j)
    checks["L flow consensus"] = detect_consensus(laplacian_flow(b, x0)).achieved
    checks["L^+ flow consensus"] = detect_consensus(pinv_flow(b, x0)).achieved
    failed = [k for k, v in checks.items() if not v]
    return not failed, f"{G.n} buses, {len(case.active_branches)} active branches; failed: {failed or 'none'}"


def c9_impedance_flow():
    spec = parse_impedance_json(fixture_text("impedance5.json"))
    G, ind = impedance_to_graph(spec)
    b = analyze(G)
    I0 = np.array([1.0, 0.0, 0.5, -0.25, 0.8])
    slow = impedance_flow(b, ind, I0)
    t = np.linspace(0.0, slow.times[-1], 20001)
    r_full = detect_consensus(impedance_flow(b, ind, I0, t))
    r_half = detect_consensus(impedance_flow(b, ind / 2, I0, t))
    if not (r_full.achieved and r_half.achieved):
        return False, "impedance flow did not reach equal currents"
    err = abs(r_full.consensus_value - I0.mean())
    ratio = r_half.settling_time / r_full.settling_time
    ok = err <= 1e-6 and abs(ratio - 0.5) <= 0.05 * 0.5
    return ok, f"limit error {err:.2e} (tol 1e-6), settling ratio {ratio:.4f} (target 0.5 within 5%)"


def c10_negative_controls():
    checks = {}
    sp = analyze(gen.path_graph(2, weight=-1))
    checks["signed: sampling not_rEEP"] = reep_by_sampling(-sp.L).verdict is Verdict.NOT_REEP
    checks["signed: spectral not_rEEP"] = reep_by_spectrum(sp).verdict is Verdict.NOT_REEP
    checks["signed: L flow diverges"] = laplacian_flow(sp, [1, 0]).diverged
    checks["signed: L^+ flow diverges"] = pinv_flow(sp, [1, 0]).diverged
    dc = analyze(gen.two_components())
    checks["disconnected: corank 2"] = corank(dc.L) == 2 and dc.corank == 2
    checks["disconnected: not rEEP"] = reep_by_sampling(-dc.L).verdict is Verdict.NOT_REEP
    tr = laplacian_flow(dc, [1, 0, 0, 0])
    checks["disconnected: no global consensus"] = not detect_consensus(tr).achieved
    checks["disconnected: per-component limits"] = bool(np.allclose(tr.final, [0.5, 0.5, 0, 0], atol=1e-6))
    failed = [k for k, v in checks.items() if not v]
    return not failed, f"{len(checks)} checks; failed: {failed or 'none'}"


CRITERIA = {
    1: ("five-node reciprocal spectrum", c1_five_node_reciprocal_spectrum, 1e-3, c1_timed),
    2: ("five-node shift consistency", c2_five_node_shift, 1e-3, c2_timed),
    3: ("Penrose property suite", c3_penrose, 10.0, None),
    4: ("criterion agreement", c4_criterion_agreement, 60.0, None),
    5: ("consensus equivalence", c5_consensus_equivalence, 60.0, None),
    6: ("projector-formula oracle", c6_projector_route, 10.0, None),
    7: ("exponential limit", c7_exponential_limit, 30.0, None),
    8: ("power-network pipeline", c8_power_network, 10.0, None),
    9: ("impedance flow", c9_impedance_flow, 5.0, None),
    10: ("negative controls", c10_negative_controls, 5.0, None),
}


def run_criterion(k: int) -> tuple[bool, float, float, str]:
    name, fn, limit, timed = CRITERIA[k]
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    if timed is not None:
        elapsed = timed()
    RESULTS[k] = (ok and elapsed < limit, elapsed, limit, detail)
    return RESULTS[k]


def format_line(k: int) -> str:
    ok, elapsed, limit, detail = RESULTS[k]
    status = "PASS" if ok else "FAIL"
    return f"[{status}] criterion {k:2d} {CRITERIA[k][0]}: {detail}; {elapsed * 1e3:.3g} ms (limit {limit * 1e3:.0f} ms)"


@pytest.mark.acceptance
@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, elapsed, limit, detail = run_criterion(k)
    print(format_line(k))
    assert elapsed < limit, f"criterion {k} took {elapsed:.3g} s, limit {limit} s"
    assert ok, detail


if __name__ == "__main__":
    for k in sorted(CRITERIA):
        run_criterion(k)
        print(format_line(k), flush=True)
