"""Reading networks from JSON graph documents, MATPOWER case files and impedance specs.

Units: MATPOWER admittances are per unit; impedance-network admittances are
in siemens with resistance in ohms, capacitance in farads, shunt inductance
in henries and angular frequency in rad/s.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Any

import numpy as np

from .netmodel import ComplexGraph, GraphError, build_graph

GRAPH_SCHEMA = "lapflow-graph/1"
IMPEDANCE_SCHEMA = "lapflow-impedance/1"


class IngestError(ValueError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class MatpowerParseError(IngestError):
    pass


def _decode(text) -> str:
    if isinstance(text, (bytes, bytearray)):
        try:
            return bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise IngestError(f"input is not valid UTF-8: {exc}") from exc
    return text


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise IngestError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _load_json(text) -> Any:
    text = _decode(text)
    try:
        return json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise IngestError(f"malformed JSON: {exc.msg} (column {exc.colno})", line=exc.lineno) from exc
    except RecursionError as exc:
        raise IngestError("JSON nesting too deep") from exc


def _object(doc, allowed: set[str], required: set[str], where: str) -> dict:
    if not isinstance(doc, dict):
        raise IngestError("expected an object", field=where)
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise IngestError(f"unknown field(s) {unknown}", field=where)
    missing = sorted(required - set(doc))
    if missing:
        raise IngestError(f"missing field(s) {missing}", field=where)
    return doc


def _number(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise IngestError(f"expected a finite number, got {v!r}", field=where)
    return float(v)


def _integer(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise IngestError(f"expected an integer, got {v!r}", field=where)
    return v


def _bool(v, where: str) -> bool:
    if not isinstance(v, bool):
        raise IngestError(f"expected true or false, got {v!r}", field=where)
    return v


def _schema(doc: dict, expected: str) -> None:
    if "schema" in doc and doc["schema"] != expected:
        raise IngestError(f"unsupported schema {doc['schema']!r}, expected {expected!r}", field="schema")


# -- graph documents ---------------------------------------------------------


def parse_graph_json(text) -> ComplexGraph:
    doc = _object(
        _load_json(text), {"schema", "n", "directed", "edges", "labels"}, {"n", "directed", "edges"}, "$"
    )
    _schema(doc, GRAPH_SCHEMA)
    n = _integer(doc["n"], "n")
    directed = _bool(doc["directed"], "directed")
    if not isinstance(doc["edges"], list):
        raise IngestError("expected a list", field="edges")
    edges = []
    for k, e in enumerate(doc["edges"]):
        where = f"edges[{k}]"
        e = _object(e, {"from", "to", "re", "im"}, {"from", "to", "re", "im"}, where)
        edges.append(
            (
                _integer(e["from"], f"{where}.from"),
                _integer(e["to"], f"{where}.to"),
                complex(_number(e["re"], f"{where}.re"), _number(e["im"], f"{where}.im")),
            )
        )
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(s, str) for s in labels):
            raise IngestError("expected a list of strings", field="labels")
    try:
        return build_graph(n, directed, edges, labels)
    except GraphError as exc:
        raise IngestError(str(exc)) from exc


def graph_to_document(G: ComplexGraph) -> dict:
    edges = G.edges if G.directed else G.undirected_edges
    doc: dict[str, Any] = {
        "schema": GRAPH_SCHEMA,
        "n": G.n,
        "directed": G.directed,
        "edges": [{"from": i, "to": j, "re": w.real, "im": w.imag} for i, j, w in edges],
    }
    if G.node_labels is not None:
        doc["labels"] = list(G.node_labels)
    return doc


def dump_graph_json(G: ComplexGraph) -> str:
    return json.dumps(graph_to_document(G), indent=1)


# -- MATPOWER ----------------------------------------------------------------


@dataclass(frozen=True)
class Bus:
    bus_id: int
    bus_type: int


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float
    x: float
    b: float
    status: bool
    line: int | None = None


@dataclass(frozen=True)
class MatpowerCase:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    base_mva: float

    @property
    def active_branches(self) -> tuple[Branch, ...]:
        return tuple(br for br in self.branches if br.status)


_NUMBER = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eEdD][+-]?\d+)?$|^[+-]?(?:Inf|inf|NaN|nan)$")
_ASSIGN = re.compile(r"^\s*mpc\.(\w+)\s*=\s*(.*)$")
_MIN_COLS = {"bus": 2, "branch": 11}


def _token_value(tok: str, line: int) -> float:
    if not _NUMBER.match(tok):
        raise MatpowerParseError(f"non-numeric token {tok!r}", line=line)
    return float(tok.replace("d", "e").replace("D", "e"))


def _rows(segment: str, line: int, rows: list):
    for part in segment.split(";"):
        toks = [t for t in re.split(r"[\s,]+", part) if t]
        if toks:
            rows.append((line, [_token_value(t, line) for t in toks]))


def _integral(v: float, what: str, line: int) -> int:
    if not math.isfinite(v) or v != int(v):
        raise MatpowerParseError(f"{what} must be an integer, got {v!r}", line=line)
    return int(v)


def parse_matpower(text) -> MatpowerCase:
    """Parse the ``baseMVA``, ``bus`` and ``branch`` entries of a MATPOWER case file.

    Bus columns 1-2 give id and type; branch columns 1-5 give endpoints,
    r, x, b and column 11 the in-service status. Other columns and other
    ``mpc`` fields are ignored.
    """
    text = _decode(text)
    if not isinstance(text, str):
        raise MatpowerParseError("expected text")
    blocks: dict[str, list] = {}
    start_line: dict[str, int] = {}
    base_mva = None
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        code = raw.split("%", 1)[0]
        if current is None:
            m = _ASSIGN.match(code)
            if not m:
                continue
            name, rest = m.group(1), m.group(2).strip()
            if name == "baseMVA":
                val = rest.rstrip(";").strip()
                base_mva = _token_value(val, lineno) if val else None
                if base_mva is None or not math.isfinite(base_mva) or base_mva <= 0:
                    raise MatpowerParseError("baseMVA must be a positive number", line=lineno)
                continue
            if name not in _MIN_COLS:
                continue
            if not rest.startswith("["):
                raise MatpowerParseError(f"mpc.{name} must be a matrix literal", line=lineno)
            if name in blocks:
                raise MatpowerParseError(f"duplicate mpc.{name} block", line=lineno)
            current = name
            blocks[name] = []
            start_line[name] = lineno
            code = rest[1:]
        if "]" in code:
            body, tail = code.split("]", 1)
            _rows(body, lineno, blocks[current])
            if tail.strip().strip(";").strip():
                raise MatpowerParseError(f"unexpected text after mpc.{current} block", line=lineno)
            current = None
        else:
            _rows(code, lineno, blocks[current])
    if current is not None:
        raise MatpowerParseError(
            f"mpc.{current} block starting at line {start_line[current]} is not closed"
        )
    for name in ("bus", "branch"):
        if name not in blocks:
            raise MatpowerParseError(f"missing mpc.{name} block")
    if base_mva is None:
        raise MatpowerParseError("missing mpc.baseMVA")
    for name, rows in blocks.items():
        for line, vals in rows:
            if len(vals) < _MIN_COLS[name]:
                raise MatpowerParseError(
                    f"mpc.{name} row has {len(vals)} columns, need at least {_MIN_COLS[name]}", line=line
                )

    buses = []
    seen = set()
    for line, vals in blocks["bus"]:
        bid = _integral(vals[0], "bus id", line)
        if bid in seen:
            raise MatpowerParseError(f"duplicate bus id {bid}", line=line)
        seen.add(bid)
        buses.append(Bus(bid, _integral(vals[1], "bus type", line)))
    branches = []
    for line, vals in blocks["branch"]:
        f = _integral(vals[0], "from bus", line)
        t = _integral(vals[1], "to bus", line)
        for bid in (f, t):
            if bid not in seen:
                raise MatpowerParseError(f"branch references unknown bus {bid}", line=line)
        r, x, b, status = vals[2], vals[3], vals[4], vals[10]
        if not all(math.isfinite(v) for v in (r, x, b, status)):
            raise MatpowerParseError("branch r, x, b and status must be finite", line=line)
        branches.append(Branch(f, t, r, x, b, status != 0, line))
    if not buses:
        raise MatpowerParseError("mpc.bus is empty")
    return MatpowerCase(tuple(buses), tuple(branches), float(base_mva))


def _branch_admittances(case: MatpowerCase) -> tuple[dict[int, int], dict[tuple[int, int], complex]]:
    index = {bus.bus_id: k for k, bus in enumerate(case.buses)}
    ys: dict[tuple[int, int], complex] = {}
    for br in case.active_branches:
        i, j = index[br.from_bus], index[br.to_bus]
        if i == j:
            raise IngestError(f"branch connects bus {br.from_bus} to itself", line=br.line)
        z = complex(br.r, br.x)
        if z == 0:
            raise IngestError(f"zero-impedance branch {br.from_bus}-{br.to_bus}", line=br.line)
        key = (min(i, j), max(i, j))
        ys[key] = ys.get(key, 0) + 1 / z
    return index, ys


def matpower_to_graph(case: MatpowerCase) -> ComplexGraph:
    """Undirected graph weighted by series admittance ``1/(r + jx)``.

    Parallel branches are summed. Line charging, taps and phase shifts are
    left out so the Laplacian has zero row and column sums.
    """
    _, ys = _branch_admittances(case)
    edges = [(i, j, y) for (i, j), y in sorted(ys.items()) if y != 0]
    labels = [str(bus.bus_id) for bus in case.buses]
    return build_graph(len(case.buses), False, edges, labels)


def admittance_matrix(case: MatpowerCase, include_charging: bool = False) -> np.ndarray:
    """Bus admittance matrix for inspection; charging adds ``j b/2`` at both ends."""
    index, ys = _branch_admittances(case)
    n = len(case.buses)
    Y = np.zeros((n, n), dtype=complex)
    for (i, j), y in ys.items():
        Y[i, j] -= y
        Y[j, i] -= y
        Y[i, i] += y
        Y[j, j] += y
    if include_charging:
        for br in case.active_branches:
            for bid in (br.from_bus, br.to_bus):
                Y[index[bid], index[bid]] += 0.5j * br.b
    return Y


# -- impedance networks --------------------------------------------------------


@dataclass(frozen=True)
class ImpedanceBranch:
    from_node: int
    to_node: int
    resistance: float
    capacitance: float | None = None


@dataclass(frozen=True)
class ImpedanceSpec:
    n: int
    branches: tuple[ImpedanceBranch, ...]
    shunt_inductance: float
    omega: float | None = None

    def __post_init__(self):
        if not self.shunt_inductance > 0:
            raise IngestError("shunt inductance must be positive", field="shunt_inductance")
        has_c = False
        for k, br in enumerate(self.branches):
            if br.resistance < 0:
                raise IngestError("resistance must be non-negative", field=f"branches[{k}].resistance")
            if br.capacitance is not None:
                has_c = True
                if not br.capacitance > 0:
                    raise IngestError("capacitance must be positive", field=f"branches[{k}].capacitance")
        if has_c and not (self.omega is not None and self.omega > 0):
            raise IngestError("omega must be positive when capacitors are present", field="omega")


def branch_admittance(br: ImpedanceBranch, omega: float | None) -> complex:
    """Admittance of a series R-C branch at angular frequency ``omega``."""
    z = complex(br.resistance)
    if br.capacitance is not None:
        z += 1 / (1j * omega * br.capacitance)
    if z == 0:
        raise IngestError(f"zero impedance on branch {br.from_node}-{br.to_node}")
    return 1 / z


def impedance_to_graph(spec: ImpedanceSpec) -> tuple[ComplexGraph, float]:
    ys: dict[tuple[int, int], complex] = {}
    for br in spec.branches:
        key = (min(br.from_node, br.to_node), max(br.from_node, br.to_node))
        ys[key] = ys.get(key, 0) + branch_admittance(br, spec.omega)
    edges = [(i, j, y) for (i, j), y in sorted(ys.items()) if y != 0]
    try:
        G = build_graph(spec.n, False, edges)
    except GraphError as exc:
        raise IngestError(str(exc)) from exc
    return G, spec.shunt_inductance


def parse_impedance_json(text) -> ImpedanceSpec:
    doc = _object(
        _load_json(text),
        {"schema", "n", "branches", "shunt_inductance", "omega"},
        {"n", "branches", "shunt_inductance"},
        "$",
    )
    _schema(doc, IMPEDANCE_SCHEMA)
    n = _integer(doc["n"], "n")
    if not isinstance(doc["branches"], list):
        raise IngestError("expected a list", field="branches")
    branches = []
    for k, b in enumerate(doc["branches"]):
        where = f"branches[{k}]"
        b = _object(b, {"from", "to", "resistance", "capacitance"}, {"from", "to", "resistance"}, where)
        cap = b.get("capacitance")
        branches.append(
            ImpedanceBranch(
                _integer(b["from"], f"{where}.from"),
                _integer(b["to"], f"{where}.to"),
                _number(b["resistance"], f"{where}.resistance"),
                None if cap is None else _number(cap, f"{where}.capacitance"),
            )
        )
    omega = doc.get("omega")
    return ImpedanceSpec(
        n=n,
        branches=tuple(branches),
        shunt_inductance=_number(doc["shunt_inductance"], "shunt_inductance"),
        omega=None if omega is None else _number(omega, "omega"),
    )


def fixture_text(name: str) -> str:
    """Contents of a bundled data file (``case10_radial.m``, ``impedance5.json``, ...)."""
    return resources.files("lapflow").joinpath("data", name).read_text(encoding="utf-8")
