"""Laplacian, pseudoinverse and impedance flows with consensus detection.

The pseudoinverse flow ``x' = -L^+ x`` is the least-squares reading of the
implicit agent dynamics ``L x' = -x``. In an impedance network with nodal
currents ``I = L v`` and uniform shunt inductors ``v = -Lind dI/dt`` the
same construction gives ``I' = -(1/Lind) L^+ I``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Literal, TextIO

import numpy as np

from . import numkernel as nk
from .spectral import ZERO_TOL, LaplacianBundle, SpectralError

DIVERGENCE_NORM = 1e12
CONSENSUS_TOL = 1e-6
HORIZON = 20.0
GROWTH_HORIZON = 32.0  # e^32 > 1e13, past the divergence threshold for unit-size states
DEFAULT_SAMPLES = 1001

Method = Literal["exact_expm", "rk4_crosscheck"]


@dataclass(frozen=True)
class FlowSpec:
    generator: np.ndarray
    x0: np.ndarray
    t_grid: np.ndarray
    method: Method = "exact_expm"

    def __post_init__(self):
        G = nk.as_matrix(self.generator, square=True)
        x0 = np.array(self.x0, dtype=complex).ravel()
        t = np.array(self.t_grid, dtype=float).ravel()
        if G.shape[0] != x0.size:
            raise ValueError(f"generator is {G.shape[0]}x{G.shape[0]} but x0 has {x0.size} entries")
        if t.size == 0 or t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ValueError("t_grid must be non-empty, start at t >= 0 and strictly increase")
        if self.method not in ("exact_expm", "rk4_crosscheck"):
            raise ValueError(f"unknown method {self.method!r}")
        object.__setattr__(self, "generator", G)
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "t_grid", t)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (samples, n)
    diverged: bool

    def spread(self) -> np.ndarray:
        """max_{i,j} |x_i - x_j| at every sample."""
        S = self.states
        return np.abs(S[:, :, None] - S[:, None, :]).max(axis=(1, 2))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class ConsensusReport:
    achieved: bool
    consensus_value: complex | None
    settling_time: float | None
    spread_final: float
    diverged: bool = False


def default_time_grid(generator, samples: int = DEFAULT_SAMPLES, horizon: float = HORIZON) -> np.ndarray:
    """Uniform grid on ``[0, horizon/gap]``.

    ``gap`` is the smallest ``|Re(lambda)|`` over the generator's nonzero
    eigenvalues, so the slowest transient mode has decayed (or grown) by
    ``e^horizon`` at the end of the grid. When some mode grows, the grid is
    stretched until it has grown by ``e^32`` so divergence is detected.
    """
    G = nk.as_matrix(generator, square=True)
    w = nk.eigvals(G)
    scale = ZERO_TOL * nk.norm2(G)
    re = np.abs(w.real[np.abs(w) > scale])
    re = re[re > scale]
    t_max = horizon / re.min() if re.size else horizon
    growth = w.real.max()
    if growth > scale:
        t_max = max(t_max, GROWTH_HORIZON / growth)
    return np.linspace(0.0, t_max, samples)


def _rk4(G: np.ndarray, x: np.ndarray, dt: float) -> np.ndarray:
    nsub = max(100, math.ceil(dt * nk.norm2(G) / 0.01))
    h = dt / nsub
    for _ in range(nsub):
        k1 = G @ x
        k2 = G @ (x + 0.5 * h * k1)
        k3 = G @ (x + 0.5 * h * k2)
        k4 = G @ (x + h * k3)
        x = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def simulate(spec: FlowSpec) -> Trajectory:
    G, t = spec.generator, spec.t_grid
    cache: dict[float, np.ndarray] = {}

    def step(x: np.ndarray, dt: float) -> np.ndarray:
        if dt == 0:
            return x
        if spec.method == "rk4_crosscheck":
            return _rk4(G, x, dt)
        key = float(f"{dt:.10g}")
        if key not in cache:
            cache[key] = nk.expm(G * key)
        return cache[key] @ x

    states = []
    x = spec.x0
    prev = 0.0
    diverged = False
    for tk in t:
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                x = step(x, tk - prev)
        except nk.ExpmOverflow:
            diverged = True
            break
        prev = tk
        if not np.all(np.isfinite(x)):
            diverged = True
            break
        states.append(x)
        if np.linalg.norm(x) > DIVERGENCE_NORM:
            diverged = True
            break
    times = t[: len(states)]
    S = np.array(states, dtype=complex).reshape(len(states), spec.x0.size)
    return Trajectory(times=times, states=S, diverged=diverged)


def detect_consensus(traj: Trajectory, tol_cons: float = CONSENSUS_TOL) -> ConsensusReport:
    """Consensus holds when the spread, once at or below ``tol_cons``, stays there.

    The consensus value is the mean of the final state.
    """
    if len(traj.times) == 0:
        raise ValueError("empty trajectory")
    spread = traj.spread()
    final = float(spread[-1])
    below = np.flatnonzero(spread <= tol_cons)
    achieved = (
        not traj.diverged
        and below.size > 0
        and bool(np.all(spread[below[0]:] <= tol_cons))
    )
    if not achieved:
        return ConsensusReport(False, None, None, final, traj.diverged)
    return ConsensusReport(
        achieved=True,
        consensus_value=complex(traj.final.mean()),
        settling_time=float(traj.times[below[0]]),
        spread_final=final,
        diverged=False,
    )


def predicted_consensus_value(bundle: LaplacianBundle, x0) -> complex:
    """Limit value ``(z^H x0) / (z^H 1)`` of the Laplacian flow."""
    if not bundle.consensus_ready():
        raise SpectralError(
            f"no consensus limit: corank {bundle.corank}, smallest nonzero real part {bundle.gap:.3e}"
        )
    z = bundle.left_null
    x0 = np.asarray(x0, dtype=complex).ravel()
    return complex((z.conj() @ x0) / z.conj().sum())


def laplacian_flow(bundle: LaplacianBundle, x0, t_grid=None, method: Method = "exact_expm") -> Trajectory:
    G = -np.asarray(bundle.L)
    return simulate(FlowSpec(G, x0, default_time_grid(G) if t_grid is None else t_grid, method))


def pinv_flow(bundle: LaplacianBundle, x0, t_grid=None, method: Method = "exact_expm") -> Trajectory:
    G = -np.asarray(bundle.L_pinv)
    return simulate(FlowSpec(G, x0, default_time_grid(G) if t_grid is None else t_grid, method))


def impedance_flow(
    bundle: LaplacianBundle,
    inductance: float,
    I0,
    t_grid=None,
    method: Method = "exact_expm",
) -> Trajectory:
    """Nodal currents under ``I' = -(1/Lind) L^+ I``; time in seconds, Lind in henries."""
    if not inductance > 0:
        raise ValueError(f"shunt inductance must be positive, got {inductance}")
    G = -np.asarray(bundle.L_pinv) / inductance
    return simulate(FlowSpec(G, I0, default_time_grid(G) if t_grid is None else t_grid, method))


def write_trajectory_csv(traj: Trajectory, fh: TextIO, units: str = "time in s") -> None:
    """Columns ``t,re_x0,im_x0,re_x1,im_x1,...``; 12 significant digits."""
    n = traj.states.shape[1]
    fh.write(f"# lapflow trajectory; {units}; diverged={str(traj.diverged).lower()}\n")
    w = csv.writer(fh, lineterminator="\n")
    header = ["t"]
    for i in range(n):
        header += [f"re_x{i}", f"im_x{i}"]
    w.writerow(header)
    for t, x in zip(traj.times, traj.states):
        row = [f"{t:.12g}"]
        for v in x:
            row += [f"{v.real:.12g}", f"{v.imag:.12g}"]
        w.writerow(row)
