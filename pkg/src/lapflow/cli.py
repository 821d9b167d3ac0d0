"""Command-line entry point: ``lapflow analyze | simulate | expm-dump``.

Exit codes: 0 success, 2 input/parse error, 3 analysis error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import numkernel as nk
from .flows import (
    default_time_grid,
    detect_consensus,
    impedance_flow,
    laplacian_flow,
    pinv_flow,
    write_trajectory_csv,
)
from .ingest import (
    IngestError,
    impedance_to_graph,
    matpower_to_graph,
    parse_graph_json,
    parse_impedance_json,
    parse_matpower,
)
from .netmodel import ComplexGraph, StructureReport
from .reep import AuditReport, ReepCertificate, equivalence_audit, reep_by_sampling, reep_by_spectrum
from .spectral import LaplacianBundle, SpectralError, analyze, pinv_spectrum_map

REPORT_SCHEMA = "lapflow-report/1"
EXIT_OK, EXIT_INPUT, EXIT_ANALYSIS = 0, 2, 3


class InputError(Exception):
    pass


def load_network(path: str, fmt: str) -> tuple[ComplexGraph, float | None, str]:
    """Return (graph, shunt inductance or None, unit note)."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        if fmt == "json":
            return parse_graph_json(raw), None, "weights dimensionless"
        if fmt == "matpower":
            return matpower_to_graph(parse_matpower(raw)), None, "admittance in p.u."
        if fmt == "impedance":
            G, ind = impedance_to_graph(parse_impedance_json(raw))
            return G, ind, "admittance in S; inductance in H"
    except IngestError as exc:
        raise InputError(f"{path}: {exc}") from exc
    raise InputError(f"unknown format {fmt!r}")


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _cert(c: ReepCertificate | None) -> dict | None:
    if c is None:
        return None
    return {
        "verdict": c.verdict.value,
        "criterion": c.criterion.value,
        "shift_d": c.shift_d,
        "t0_estimate": c.t0_estimate,
        "witness": c.witness,
    }


@dataclass(frozen=True)
class AnalysisReport:
    structure: StructureReport
    spectrum_L: np.ndarray
    spectrum_Lpinv: np.ndarray
    spectrum_Lpinv_predicted: np.ndarray | None
    corank: int
    reep_L: ReepCertificate
    reep_Lpinv: ReepCertificate
    reep_L_spectral: ReepCertificate
    equivalence_audit: AuditReport | None
    consensus_prediction: complex | None  # limit of the flow started from node 0's indicator
    consensus_weights: np.ndarray | None
    units: str

    def to_dict(self) -> dict[str, Any]:
        s = self.structure
        audit = self.equivalence_audit
        return {
            "schema": REPORT_SCHEMA,
            "units": self.units,
            "structure": {
                "graph_class": s.graph_class.value,
                "connected": s.connected,
                "weight_balanced": s.weight_balanced,
                "component_count": s.component_count,
            },
            "corank": self.corank,
            "spectrum_L": [_c(v) for v in self.spectrum_L],
            "spectrum_Lpinv": [_c(v) for v in self.spectrum_Lpinv],
            "spectrum_Lpinv_predicted": None
            if self.spectrum_Lpinv_predicted is None
            else [_c(v) for v in self.spectrum_Lpinv_predicted],
            "reep_L": _cert(self.reep_L),
            "reep_Lpinv": _cert(self.reep_Lpinv),
            "reep_L_spectral": _cert(self.reep_L_spectral),
            "equivalence_audit": None
            if audit is None
            else {
                "theorem": audit.theorem,
                "clauses": audit.clauses,
                "agree": audit.agree,
                "anomalies": list(audit.anomalies),
            },
            "consensus_prediction": None if self.consensus_prediction is None else _c(self.consensus_prediction),
            "consensus_weights": None
            if self.consensus_weights is None
            else [_c(v) for v in self.consensus_weights],
        }

    def to_text(self) -> str:
        d = self.to_dict()
        st = d["structure"]
        fmt = lambda z: f"{z[0]:.6g}{z[1]:+.6g}j"  # noqa: E731
        lines = [
            f"class: {st['graph_class']}  connected: {st['connected']}  "
            f"weight_balanced: {st['weight_balanced']}  components: {st['component_count']}",
            f"corank(L): {self.corank}",
            "spec(L):   " + ", ".join(fmt(z) for z in d["spectrum_L"]),
            "spec(L^+): " + ", ".join(fmt(z) for z in d["spectrum_Lpinv"]),
        ]
        for key in ("reep_L", "reep_Lpinv", "reep_L_spectral"):
            c = d[key]
            extra = f" ({c['witness']})" if c["witness"] else ""
            lines.append(f"{key}: {c['verdict']} [{c['criterion']}]{extra}")
        a = d["equivalence_audit"]
        if a is not None:
            lines.append(f"audit ({a['theorem']}): agree={a['agree']}")
            for k, v in a["clauses"].items():
                lines.append(f"  {k}: {v}")
            for msg in a["anomalies"]:
                lines.append(f"  anomaly: {msg}")
        if d["consensus_prediction"] is not None:
            lines.append(f"consensus value for x0 = e_0: {fmt(d['consensus_prediction'])}")
        lines.append(f"units: {self.units}")
        return "\n".join(lines)


def build_report(G: ComplexGraph, units: str = "") -> AnalysisReport:
    b = analyze(G)
    try:
        predicted = pinv_spectrum_map(b.spectrum.eigenvalues)
    except SpectralError:
        predicted = None
    try:
        audit = equivalence_audit(b)
    except SpectralError:
        audit = None
    weights = prediction = None
    if b.consensus_ready():
        z = b.left_null
        weights = z.conj() / z.conj().sum()
        prediction = complex(weights[0])
    return AnalysisReport(
        structure=b.structure,
        spectrum_L=b.spectrum.eigenvalues,
        spectrum_Lpinv=nk.eigvals(b.L_pinv),
        spectrum_Lpinv_predicted=predicted,
        corank=b.corank,
        reep_L=reep_by_sampling(-b.L),
        reep_Lpinv=reep_by_sampling(-b.L_pinv),
        reep_L_spectral=reep_by_spectrum(b),
        equivalence_audit=audit,
        consensus_prediction=prediction,
        consensus_weights=weights,
        units=units,
    )


def _parse_x0(spec: str, n: int, seed: int) -> np.ndarray:
    if spec == "uniform-random":
        rng = np.random.default_rng(seed)
        return rng.uniform(0, 1, n) + 1j * rng.uniform(0, 1, n)
    if spec.startswith("basis:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise InputError(f"bad basis index in {spec!r}") from exc
        if not 0 <= k < n:
            raise InputError(f"basis index {k} out of range for n={n}")
        x = np.zeros(n, dtype=complex)
        x[k] = 1
        return x
    try:
        data = json.loads(Path(spec).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read x0 from {spec}: {exc}") from exc
    try:
        x = np.array([complex(v[0], v[1]) if isinstance(v, list) else complex(v) for v in data])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"x0 file {spec} must be a JSON list of numbers or [re, im] pairs") from exc
    if x.shape != (n,) or not np.all(np.isfinite(x)):
        raise InputError(f"x0 must have {n} finite entries")
    return x


def cmd_analyze(args) -> int:
    G, _, units = load_network(args.input, args.format)
    report = build_report(G, units)
    if args.out == "json":
        print(json.dumps(report.to_dict(), indent=1))
    else:
        print(report.to_text())
    return EXIT_OK


def cmd_simulate(args) -> int:
    G, inductance, units = load_network(args.input, args.format)
    if args.flow == "impedance" and inductance is None:
        raise InputError("impedance flow needs a shunt inductance (use --format impedance)")
    x0 = _parse_x0(args.x0, G.n, args.seed)
    b = analyze(G)
    if args.flow == "laplacian":
        gen = -b.L
        run = laplacian_flow
    elif args.flow == "pinv":
        gen = -b.L_pinv
        run = pinv_flow
    else:
        gen = -b.L_pinv / inductance
        run = lambda bb, x, t_grid, method: impedance_flow(bb, inductance, x, t_grid, method)  # noqa: E731
    if args.t_max is not None:
        if not args.t_max > 0:
            raise InputError("--t-max must be positive")
        grid = np.linspace(0.0, args.t_max, args.samples)
    else:
        grid = default_time_grid(gen, samples=args.samples)
    traj = run(b, x0, t_grid=grid, method=args.method)
    rep = detect_consensus(traj, args.tol)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_trajectory_csv(traj, fh, units=f"time in s; {units}")
    print(f"flow: {args.flow}")
    print(f"samples: {len(traj.times)}  t_final: {traj.times[-1]:.6g}")
    if traj.diverged:
        print("status: diverged")
    print(f"achieved: {str(rep.achieved).lower()}")
    if rep.achieved:
        v = rep.consensus_value
        print(f"consensus_value: {v.real:.12g} {v.imag:+.12g}j")
        print(f"settling_time: {rep.settling_time:.12g}")
    print(f"spread_final: {rep.spread_final:.6g}")
    return EXIT_OK


def cmd_expm_dump(args) -> int:
    G, _, units = load_network(args.input, args.format)
    if not args.t >= 0:
        raise InputError("--t must be non-negative")
    b = analyze(G)
    M = -(b.L if args.which == "L" else b.L_pinv)
    E = nk.expm(M * args.t)
    part = E.real if args.part == "re" else E.imag
    lines = [f"# {args.part}(expm(-{'L' if args.which == 'L' else 'L^+'} t)) at t={args.t:.12g}; {units}"]
    lines += [",".join(f"{v:.12g}" for v in row) for row in part]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lapflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input")
        sp.add_argument("--format", choices=["json", "matpower", "impedance"], default="json")

    a = sub.add_parser("analyze", help="spectra, rEEP certificates and equivalence audit")
    common(a)
    a.add_argument("--out", choices=["text", "json"], default="text")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="simulate a flow and report consensus")
    common(s)
    s.add_argument("--flow", choices=["laplacian", "pinv", "impedance"], default="laplacian")
    s.add_argument("--x0", default="uniform-random", help="file, uniform-random or basis:k")
    s.add_argument("--t-max", type=float, default=None)
    s.add_argument("--samples", type=int, default=1001)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--method", choices=["exact_expm", "rk4_crosscheck"], default="exact_expm")
    s.add_argument("--out", default=None, help="trajectory CSV path")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("expm-dump", help="write Re or Im of exp(-L t) or exp(-L^+ t) as CSV")
    common(e)
    e.add_argument("--which", choices=["L", "pinv"], default="L")
    e.add_argument("--t", type=float, required=True)
    e.add_argument("--part", choices=["re", "im"], default="re")
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_expm_dump)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (nk.NumericalError, SpectralError, ValueError) as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


if __name__ == "__main__":
    sys.exit(main())
