"""Nodal currents in the bundled R/RC network for several shunt inductances."""

import argparse
from dataclasses import dataclass, field

import numpy as np

from lapflow.flows import detect_consensus, impedance_flow
from lapflow.ingest import fixture_text, impedance_to_graph, parse_impedance_json
from lapflow.spectral import analyze


@dataclass
class Config:
    inductances: list[float] = field(default_factory=lambda: [0.05, 0.1, 0.2])
    I0: list[float] = field(default_factory=lambda: [1.0, 0.0, 0.5, -0.25, 0.8])


def main(cfg: Config) -> None:
    G, ind0 = impedance_to_graph(parse_impedance_json(fixture_text("impedance5.json")))
    b = analyze(G)
    I0 = np.asarray(cfg.I0)
    print(f"fixture shunt inductance {ind0} H; mean(I0) = {I0.mean():.6g} A")
    # common grid long enough for the slowest setting
    t = impedance_flow(b, max(cfg.inductances), I0).times
    t = np.linspace(0, t[-1], 20001)
    for ind in cfg.inductances:
        r = detect_consensus(impedance_flow(b, ind, I0, t))
        print(f"Lind = {ind:<6g} H  achieved {r.achieved}  limit {r.consensus_value:.6g}  settling {r.settling_time:.6g} s")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--inductances", type=float, nargs="+", default=Config().inductances)
    main(Config(inductances=p.parse_args().inductances))
