"""Concentration factor C_M and flux gain over a sweep of the internal transfer rate q."""

import argparse
from pathlib import Path

import numpy as np

from lsc.config import load_config
from lsc.converter import concentration_factor, equilibrium_densities, max_transfer_rate
from lsc.scenario import converter_spec, thermo_state

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config", nargs="?", default=ROOT / "configs" / "worked_example.ini")
    parser.add_argument("--points", type=int, default=12)
    args = parser.parse_args()

    cfg = load_config(args.config)
    spec = converter_spec(cfg)
    thermo = thermo_state(cfg, spec)
    q_max = max_transfer_rate(spec, thermo)
    print(f"A1 = {spec.A1:.4e} 1/s   A2 = {spec.A2:.4e} 1/s   q_max = {q_max:.4e} 1/s")
    print(f"{'q (1/s)':>12} {'q/A1':>10} {'rho1':>12} {'rho2':>12} {'C_M':>10}")
    for q in np.concatenate([[0.0], np.geomspace(1e-3 * spec.A1, 0.999 * q_max, args.points)]):
        s = spec.with_q(q)
        rho1, rho2 = equilibrium_densities(s, thermo)
        print(f"{q:12.4e} {q / spec.A1:10.4g} {rho1:12.4e} {rho2:12.4e} {concentration_factor(s, thermo):10.5f}")


if __name__ == "__main__":
    main()
