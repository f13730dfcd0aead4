"""Run a configured scenario and write its CSV spectra and summaries."""

import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig, echo_items
from .constants import CONSTANTS, DEBYE, EV, NM
from .converter import (
    ConverterSpec,
    ThermoState,
    chemical_potential,
    concentration_factor,
    equilibrium_densities,
    lorentzian,
    molecular_temperature,
)
from .entropy import SuperpositionCoeffs, emission_entropy_gain, parse_coefficients
from .errors import ConfigError
from .kinetics import einstein_A_from_B, einstein_B
from .radiometry import Axis, planck_density_lambda, planck_density_nu, sample_spectrum
from .transport import (
    SlabSpec,
    flux_gain,
    geometric_gain,
    trace_rays,
    trapping_efficiency_analytic,
)

DEFAULT_OUT_DIR = "lsc_out"
INCIDENT_CSV = "incident_spectrum.csv"
EMITTED_CSV = "emitted_spectrum.csv"
SUMMARY_TXT = "summary.txt"
SUMMARY_KV = "summary.kv"


@dataclass
class RunSummary:
    scenario: str
    scalars: dict = field(default_factory=dict)  # name -> (value, unit)
    inputs: list = field(default_factory=list)
    version: str = __version__
    seed: int = None
    files: list = field(default_factory=list)

    def add(self, name, value, unit):
        self.scalars[name] = (float(value), unit)

    def value(self, name):
        return self.scalars[name][0]

    def to_text(self):
        lines = [f"scenario: {self.scenario}", f"version: {self.version}"]
        if self.seed is not None:
            lines.append(f"seed: {self.seed}")
        for name, (value, unit) in self.scalars.items():
            lines.append(f"{name:<24s} {value:.6g} {unit}")
        return "\n".join(lines) + "\n"

    def to_kv(self):
        lines = [f"scenario={self.scenario}", f"version={self.version}"]
        if self.seed is not None:
            lines.append(f"seed={self.seed}")
        for name, (value, unit) in self.scalars.items():
            lines.append(f"{name}={value!r} {unit}")
        for key, value in self.inputs:
            lines.append(f"input.{key}={value}")
        return "\n".join(lines) + "\n"


def converter_spec(cfg: ScenarioConfig) -> ConverterSpec:
    c = cfg.converter
    nu1, nu2 = CONSTANTS.c / (c.lambda1_nm * NM), CONSTANTS.c / (c.lambda2_nm * NM)
    B1 = c.B1 if c.B1 is not None else einstein_B(c.dipole1_D * DEBYE, c.n_refr)
    B2 = c.B2 if c.B2 is not None else einstein_B(c.dipole2_D * DEBYE, c.n_refr)
    A1 = c.A1_per_s if c.A1_per_s is not None else einstein_A_from_B(B1, c.lambda1_nm * NM)
    A2 = c.A2_per_s if c.A2_per_s is not None else einstein_A_from_B(B2, c.lambda2_nm * NM)
    return ConverterSpec(nu1, nu2, B1, B2, A1, A2, c.q_per_s, c.N_total_per_m3)


def thermo_state(cfg: ScenarioConfig, spec: ConverterSpec) -> ThermoState:
    c = cfg.converter
    T1 = c.T1_K if c.T1_K is not None else cfg.radiometry.T1_K
    if c.Tm_K is not None:
        Tm = c.Tm_K
    else:
        Tm = molecular_temperature(c.Erv_eV * EV, c.dof, c.prop_const, floor=c.T0_K)
        if Tm > T1:
            raise ConfigError("converter.Erv_eV gives a molecular temperature above T1_K",
                              key="converter.Erv_eV")
    mu1 = c.mu1_eV * EV if c.mu1_eV is not None else chemical_potential(spec.E1, c.T0_K, T1)
    mu2 = c.mu2_eV * EV if c.mu2_eV is not None else chemical_potential(spec.E2, c.T0_K, T1)
    return ThermoState(c.T0_K, T1, Tm, mu1, mu2)


def slab_spec(cfg: ScenarioConfig) -> SlabSpec:
    s = cfg.slab
    return SlabSpec(s.length_m, s.width_m, s.thickness_m, s.n_refr, s.eta_a, s.eta_f, s.theta_q)


def _grid(cfg):
    r = cfg.radiometry
    if Axis(_axis(cfg)) is Axis.WAVELENGTH:
        lo, hi = r.lo_nm * NM, r.hi_nm * NM
    else:
        lo, hi = CONSTANTS.c / (r.hi_nm * NM), CONSTANTS.c / (r.lo_nm * NM)
    return sample_spectrum(r.T1_K, _axis(cfg), lo, hi, r.points, log_mesh=r.mesh == "log")


def _axis(cfg):
    return Axis.WAVELENGTH if cfg.radiometry.axis == "wavelength" else Axis.FREQUENCY


def emitted_density(cfg, coords, spec, thermo, chain=1.0):
    """Fluorescence line at nu2 on top of the blackbody at T_m, times ``chain``.

    The line is a Lorentzian whose peak equals rho(nu2) expressed on the
    output axis; its FWHM is ``output.line_fwhm_nm`` (mapped to frequency via
    c dlambda / lambda2^2 on the frequency axis).
    """
    _, rho2 = equilibrium_densities(spec, thermo)
    lam2 = CONSTANTS.c / spec.nu2
    fwhm_lam = cfg.output.line_fwhm_nm * NM
    if _axis(cfg) is Axis.WAVELENGTH:
        center, fwhm = lam2, fwhm_lam
        peak = rho2 * CONSTANTS.c / lam2**2
        background = planck_density_lambda(coords, thermo.Tm)
    else:
        center, fwhm = spec.nu2, CONSTANTS.c * fwhm_lam / lam2**2
        peak = rho2
        background = planck_density_nu(coords, thermo.Tm)
    line = peak * (0.5 * np.pi * fwhm) * lorentzian(coords - center, fwhm)
    return chain * (line + background)


def _write_csv(path, axis, coords, densities):
    if axis is Axis.WAVELENGTH:
        header = "wavelength_nm,energy_density_J_per_m3_per_m"
        xs = coords / NM
    else:
        header = "frequency_Hz,energy_density_J_per_m3_per_Hz"
        xs = coords
    rows = [header] + [f"{x:.12g},{y:.12e}" for x, y in zip(xs.tolist(), densities.tolist())]
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")


def _chain_factor(cfg, summary=None):
    # G_Phi when a slab is configured, else 1
    if cfg.slab is None:
        return 1.0
    slab = slab_spec(cfg)
    eta_t = summary.value("eta_t") if summary and "eta_t" in summary.scalars \
        else trapping_efficiency_analytic(slab.n_refr)
    return flux_gain(slab, eta_t)


def emit_spectra_pair(cfg: ScenarioConfig, out_dir, summary=None):
    """Write the incident and emitted spectra on a shared grid; return both paths."""
    if cfg.radiometry is None or cfg.converter is None:
        raise ConfigError("spectra need both [radiometry] and [converter] sections")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = _grid(cfg)
    spec = converter_spec(cfg)
    thermo = thermo_state(cfg, spec)
    emitted = emitted_density(cfg, grid.coordinates, spec, thermo, _chain_factor(cfg, summary))
    incident_path, emitted_path = out_dir / INCIDENT_CSV, out_dir / EMITTED_CSV
    _write_csv(incident_path, grid.axis, grid.coordinates, grid.densities)
    _write_csv(emitted_path, grid.axis, grid.coordinates, np.asarray(emitted))
    return incident_path, emitted_path


def resolve_out_dir(cfg, override=None):
    if override:
        return Path(override)
    if cfg.output.directory:
        return Path(cfg.output.directory)
    return Path(os.environ.get("LSC_OUT_DIR") or DEFAULT_OUT_DIR)


def run_scenario(cfg: ScenarioConfig, out_dir=None, base_dir=None):
    """Execute every configured stage and write outputs. Returns a RunSummary."""
    out = resolve_out_dir(cfg, out_dir)
    summary = RunSummary(cfg.scenario.name, inputs=echo_items(cfg))
    write_csv = "csv" in cfg.formats

    if cfg.radiometry is not None:
        grid = _grid(cfg)
        summary.add("T1", cfg.radiometry.T1_K, "K")
        peak = grid.peak()
        summary.add("incident_peak", peak / NM if grid.axis is Axis.WAVELENGTH else peak,
                    "nm" if grid.axis is Axis.WAVELENGTH else "Hz")

    if cfg.converter is not None:
        spec = converter_spec(cfg)
        thermo = thermo_state(cfg, spec)
        rho1, rho2 = equilibrium_densities(spec, thermo)
        summary.add("mu1", thermo.mu1 / EV, "eV")
        summary.add("mu2", thermo.mu2 / EV, "eV")
        summary.add("Tm", thermo.Tm, "K")
        summary.add("rho1", rho1, "J/(m^3*Hz)")
        summary.add("rho2", rho2, "J/(m^3*Hz)")
        summary.add("C_M", concentration_factor(spec, thermo), "1")

    if cfg.slab is not None:
        slab = slab_spec(cfg)
        analytic = trapping_efficiency_analytic(slab.n_refr)
        source = cfg.slab.eta_t_source
        if source == "auto":
            source = "monte_carlo" if cfg.transport is not None else "analytic"
        if source == "monte_carlo":
            t = cfg.transport
            if t is None:
                raise ConfigError("slab.eta_t_source = monte_carlo needs a [transport] section",
                                  key="slab.eta_t_source")
            result = trace_rays(slab, t.n_rays, t.seed, fresnel=cfg.slab.fresnel,
                                reemission=cfg.slab.reemission, workers=t.workers)
            summary.seed = t.seed
            eta_t = result.eta_t_estimate
            summary.add("eta_t_std_error", result.std_error, "1")
            for tag, count in result.outcome_counts.items():
                summary.add(f"rays_{tag}", count, "rays")
        else:
            eta_t = analytic
        G = geometric_gain(slab)
        G_phi = flux_gain(slab, eta_t)
        summary.add("eta_t", eta_t, "1")
        summary.add("eta_t_analytic", analytic, "1")
        summary.add("G", G, "1")
        summary.add("G_Phi", G_phi, "1")
        summary.add("G_Phi_over_G", G_phi / G, "1")

    if cfg.entropy is not None:
        path = Path(cfg.entropy.coefficients)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"entropy.coefficients: cannot read {path}: {exc.strerror}",
                              key="entropy.coefficients") from None
        c = parse_coefficients(text)
        coeffs = SuperpositionCoeffs.normalized(c) if cfg.entropy.normalize else SuperpositionCoeffs(c)
        summary.add("S", emission_entropy_gain(coeffs), "nats")

    if write_csv and cfg.radiometry is not None:
        out.mkdir(parents=True, exist_ok=True)
        if cfg.converter is not None:
            summary.files.extend(str(p) for p in emit_spectra_pair(cfg, out, summary))
        else:
            grid = _grid(cfg)
            path = out / INCIDENT_CSV
            _write_csv(path, grid.axis, grid.coordinates, grid.densities)
            summary.files.append(str(path))

    if "summary" in cfg.formats:
        out.mkdir(parents=True, exist_ok=True)
        (out / SUMMARY_TXT).write_text(summary.to_text(), encoding="utf-8")
        (out / SUMMARY_KV).write_text(summary.to_kv(), encoding="utf-8")
        summary.files.extend([str(out / SUMMARY_TXT), str(out / SUMMARY_KV)])
    return summary
