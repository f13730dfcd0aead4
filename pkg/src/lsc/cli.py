"""Command-line front end.

Exit codes: 0 success, 2 configuration or usage error, 3 physics/domain error.
"""

import argparse
import dataclasses
import sys
from pathlib import Path

from . import __version__
from .config import RadiometrySection, TransportSection, load_config
from .entropy import (
    SuperpositionCoeffs,
    parse_coefficients,
    reduce_density_matrix,
    von_neumann_entropy,
)
from .errors import ConfigError, DomainError
from .scenario import emit_spectra_pair, resolve_out_dir, run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN = 0, 2, 3


def _apply_overrides(cfg, seed=None, points=None):
    if seed is not None:
        if seed < 0:
            raise ConfigError("--seed must be non-negative", key="transport.seed")
        transport = cfg.transport or TransportSection()
        cfg = dataclasses.replace(cfg, transport=dataclasses.replace(transport, seed=seed))
    if points is not None:
        if points < 2:
            raise ConfigError("--points must be >= 2", key="radiometry.points")
        radiometry = cfg.radiometry or RadiometrySection()
        cfg = dataclasses.replace(cfg, radiometry=dataclasses.replace(radiometry, points=points))
    return cfg


def cmd_run(args):
    cfg = _apply_overrides(load_config(args.config), args.seed, args.points)
    summary = run_scenario(cfg, args.out, base_dir=Path(args.config).parent)
    sys.stdout.write(summary.to_text())
    return EXIT_OK


def cmd_spectra(args):
    cfg = _apply_overrides(load_config(args.config), points=args.points)
    for path in emit_spectra_pair(cfg, resolve_out_dir(cfg, args.out)):
        print(path)
    return EXIT_OK


def cmd_entropy(args):
    try:
        text = Path(args.coeffs).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {args.coeffs}: {exc.strerror}") from None
    c = parse_coefficients(text)
    coeffs = SuperpositionCoeffs.normalized(c) if args.normalize else SuperpositionCoeffs(c)
    dm = reduce_density_matrix(coeffs)
    d_e, d_n = coeffs.shape
    print(f"electronic_dim {d_e} 1")
    print(f"nuclear_dim {d_n} 1")
    print(f"purity {dm.purity():.12g} 1")
    print(f"entropy {von_neumann_entropy(dm):.12g} nats")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="lsc", description="Luminescent solar concentrator model")
    parser.add_argument("--version", action="version", version=f"lsc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run every configured stage of a scenario")
    run.add_argument("config")
    run.add_argument("--out", help="output directory (default: output.directory, $LSC_OUT_DIR, ./lsc_out)")
    run.add_argument("--seed", type=int, help="override transport.seed")
    run.add_argument("--points", type=int, help="override radiometry.points")
    run.set_defaults(func=cmd_run)

    spectra = sub.add_parser("spectra", help="write the incident/emitted spectrum CSV pair")
    spectra.add_argument("config")
    spectra.add_argument("--out")
    spectra.add_argument("--points", type=int)
    spectra.set_defaults(func=cmd_spectra)

    ent = sub.add_parser("entropy", help="von Neumann entropy of a coefficient matrix file")
    ent.add_argument("coeffs")
    ent.add_argument("--normalize", action="store_true", help="rescale coefficients to unit norm")
    ent.set_defaults(func=cmd_entropy)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"lsc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"lsc: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
