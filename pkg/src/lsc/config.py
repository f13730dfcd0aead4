"""Scenario configuration: INI-style sections with typed keys.

Grammar (see README for the full key table)::

    [section]
    key = value        ; '#' or ';' at line start begins a comment

Keys are case-sensitive. Unknown sections or keys, duplicate keys and
duplicate sections are errors. Lengths on the wavelength axis are in nm,
energies in eV, temperatures in K; everything else is SI. Values are
converted to SI once, by the ``*_si`` helpers, when a scenario runs.
"""

import configparser
import dataclasses
import math
import typing
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError


def _num(check=None, default=None):
    return field(default=default, metadata={"check": check})


@dataclass(frozen=True)
class ScenarioSection:
    name: str = "scenario"
    description: str = ""


@dataclass(frozen=True)
class RadiometrySection:
    T1_K: float = _num("positive", 5800.0)
    axis: str = field(default="wavelength", metadata={"choices": ("wavelength", "frequency")})
    lo_nm: float = _num("positive", 300.0)
    hi_nm: float = _num("positive", 2500.0)
    points: int = _num("at_least_2", 1000)
    mesh: str = field(default="linear", metadata={"choices": ("linear", "log")})


@dataclass(frozen=True)
class ConverterSection:
    lambda1_nm: float = _num("positive", 500.0)
    lambda2_nm: float = _num("positive", 650.0)
    B1: Optional[float] = _num("nonneg")
    B2: Optional[float] = _num("nonneg")
    dipole1_D: Optional[float] = _num("nonneg")
    dipole2_D: Optional[float] = _num("nonneg")
    n_refr: float = _num("at_least_1", 1.0)
    A1_per_s: Optional[float] = _num("nonneg")
    A2_per_s: Optional[float] = _num("nonneg")
    q_per_s: float = _num("nonneg", 0.0)
    N_total_per_m3: float = _num("nonneg", 1.0)
    T0_K: float = _num("positive", 300.0)
    T1_K: Optional[float] = _num("positive")
    Tm_K: Optional[float] = _num("positive")
    Erv_eV: Optional[float] = _num("nonneg")
    dof: int = _num("at_least_1", 6)
    prop_const: float = _num("positive", 1.0)
    mu1_eV: Optional[float] = _num("nonneg")
    mu2_eV: Optional[float] = _num("nonneg")


@dataclass(frozen=True)
class SlabSection:
    length_m: float = _num("positive", 0.1)
    width_m: float = _num("positive", 0.1)
    thickness_m: float = _num("positive", 0.005)
    n_refr: float = _num("at_least_1", 1.5)
    eta_a: float = _num("unit", 1.0)
    eta_f: float = _num("unit", 1.0)
    theta_q: float = _num("unit", 0.0)
    eta_t_source: str = field(default="auto", metadata={"choices": ("auto", "analytic", "monte_carlo")})
    fresnel: bool = False
    reemission: bool = False


@dataclass(frozen=True)
class TransportSection:
    n_rays: int = _num("at_least_1", 100000)
    seed: int = _num("nonneg", 0)
    workers: int = _num("at_least_1", 1)


@dataclass(frozen=True)
class EntropySection:
    coefficients: str = ""
    normalize: bool = False


@dataclass(frozen=True)
class OutputSection:
    directory: Optional[str] = None
    formats: str = "csv,summary"
    line_fwhm_nm: float = _num("positive", 20.0)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    radiometry: Optional[RadiometrySection] = None
    converter: Optional[ConverterSection] = None
    slab: Optional[SlabSection] = None
    transport: Optional[TransportSection] = None
    entropy: Optional[EntropySection] = None
    output: OutputSection = field(default_factory=OutputSection)

    @property
    def formats(self):
        return {f.strip() for f in self.output.formats.split(",") if f.strip()}


SECTIONS = {
    "scenario": ScenarioSection,
    "radiometry": RadiometrySection,
    "converter": ConverterSection,
    "slab": SlabSection,
    "transport": TransportSection,
    "entropy": EntropySection,
    "output": OutputSection,
}
_FORMATS = {"csv", "summary"}
_CHECKS = {
    "positive": (lambda v: v > 0, "must be positive"),
    "nonneg": (lambda v: v >= 0, "must be non-negative"),
    "unit": (lambda v: 0 <= v <= 1, "must lie in [0, 1]"),
    "at_least_1": (lambda v: v >= 1, "must be >= 1"),
    "at_least_2": (lambda v: v >= 2, "must be >= 2"),
}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def _base_type(tp):
    args = [a for a in typing.get_args(tp) if a is not type(None)]
    return args[0] if args else tp


def _convert(value, tp, key):
    base = _base_type(tp)
    try:
        if base is bool:
            low = value.strip().lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if base is int:
            return int(value)
        if base is float:
            out = float(value)
            if not math.isfinite(out):
                raise ValueError(f"not a finite number: {value!r}")
            return out
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}", key=key) from None
    return value


def _build_section(name, cls, items):
    hints = typing.get_type_hints(cls)
    known = {f.name: f for f in dataclasses.fields(cls)}
    values = {}
    for key, raw in items:
        if key not in known:
            raise ConfigError(f"unknown key '{key}' in section [{name}]", key=f"{name}.{key}")
        full = f"{name}.{key}"
        value = _convert(raw, hints[key], full)
        meta = known[key].metadata
        if "choices" in meta and value not in meta["choices"]:
            raise ConfigError(f"{full} must be one of {', '.join(meta['choices'])}", key=full)
        check = meta.get("check")
        if check:
            ok, message = _CHECKS[check]
            if not ok(value):
                raise ConfigError(f"{full} {message}, got {raw}", key=full)
        values[key] = value
    return cls(**values)


def _cross_validate(cfg):
    r, c = cfg.radiometry, cfg.converter
    if r is not None and not r.lo_nm < r.hi_nm:
        raise ConfigError("radiometry.hi_nm must exceed radiometry.lo_nm", key="radiometry.hi_nm")
    if c is not None:
        if not c.lambda2_nm > c.lambda1_nm:
            raise ConfigError(
                "converter.lambda2_nm must exceed converter.lambda1_nm (emission is down-shifted)",
                key="converter.lambda2_nm",
            )
        for i in (1, 2):
            has_B = getattr(c, f"B{i}") is not None
            has_d = getattr(c, f"dipole{i}_D") is not None
            if has_B == has_d:
                raise ConfigError(
                    f"converter needs exactly one of B{i} or dipole{i}_D", key=f"converter.B{i}"
                )
        T1 = c.T1_K if c.T1_K is not None else (r.T1_K if r is not None else None)
        if T1 is None:
            raise ConfigError("converter.T1_K missing and no [radiometry] T1_K to fall back on",
                              key="converter.T1_K")
        if (c.Tm_K is None) == (c.Erv_eV is None):
            raise ConfigError("converter needs exactly one of Tm_K or Erv_eV", key="converter.Tm_K")
        if not T1 >= c.T0_K:
            raise ConfigError("converter.T1_K must be >= converter.T0_K", key="converter.T1_K")
        if c.Tm_K is not None and not T1 >= c.Tm_K >= c.T0_K:
            raise ConfigError("converter.Tm_K must lie in [T0_K, T1_K]", key="converter.Tm_K")
    unknown = cfg.formats - _FORMATS
    if unknown:
        raise ConfigError(f"output.formats: unknown format {sorted(unknown)[0]!r}", key="output.formats")


def parse_config(text):
    """Parse scenario text into a validated :class:`ScenarioConfig`."""
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, empty_lines_in_values=False,
        comment_prefixes=("#", ";"), inline_comment_prefixes=None,
    )
    parser.optionxform = str
    try:
        parser.read_string(text, source="<config>")
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(
            f"line {exc.lineno}: duplicate key '{exc.option}' in section [{exc.section}]",
            key=f"{exc.section}.{exc.option}", line=exc.lineno,
        ) from None
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"line {exc.lineno}: duplicate section [{exc.section}]",
                          key=exc.section, line=exc.lineno) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError(
            f"line {exc.lineno}, column 1: expected a [section] header before {exc.line.strip()!r}",
            line=exc.lineno,
        ) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(
            f"line {lineno}, column 1: cannot parse {line.strip()!r} (expected 'key = value')",
            line=lineno,
        ) from None
    names = parser.sections()
    if not names:
        raise ConfigError("no scenario sections")
    sections = {}
    for name in names:
        if name not in SECTIONS:
            raise ConfigError(f"unknown section [{name}]", key=name)
        sections[name] = _build_section(name, SECTIONS[name], parser.items(name))
    cfg = ScenarioConfig(**sections)
    _cross_validate(cfg)
    return cfg


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg):
    """Render a config back to text; ``parse_config`` inverts it exactly."""
    out = []
    for name in SECTIONS:
        section = getattr(cfg, name)
        if section is None:
            continue
        out.append(f"[{name}]")
        for f in dataclasses.fields(section):
            value = getattr(section, f.name)
            if value is None:
                continue
            out.append(f"{f.name} = {_format_value(value)}")
        out.append("")
    return "\n".join(out)


def echo_items(cfg):
    """Flat (section.key, value) pairs of every explicitly set value."""
    items = []
    for name in SECTIONS:
        section = getattr(cfg, name)
        if section is None:
            continue
        for f in dataclasses.fields(section):
            value = getattr(section, f.name)
            if value is not None:
                items.append((f"{name}.{f.name}", _format_value(value)))
    return items


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
