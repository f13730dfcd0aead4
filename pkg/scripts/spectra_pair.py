"""Write the incident and emitted spectra for a scenario and report both peaks."""

import argparse
from pathlib import Path

import numpy as np

from lsc.config import load_config
from lsc.scenario import emit_spectra_pair

ROOT = Path(__file__).resolve().parent.parent


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config", nargs="?", default=ROOT / "configs" / "worked_example.ini")
    parser.add_argument("--out", default="out/spectra_pair")
    args = parser.parse_args()

    cfg = load_config(args.config)
    for path in emit_spectra_pair(cfg, args.out):
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        i = np.argmax(data[:, 1])
        print(f"{path.name:<24s} peak {data[i, 0]:8.2f} nm   max {data[i, 1]:.4e}")


if __name__ == "__main__":
    main()
