"""Three-level spectral converter in equilibrium with a photon bath.

Level 0 is the ground state, level 1 the absorbing excited state and level 2
the emitting excited state. Absorption and emission couple 0-1 and 0-2
radiatively; q is the non-radiative transfer rate from 1 to 2.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS, EV
from .errors import DomainError
from .kinetics import einstein_A_from_B
from .radiometry import bose_factor, mode_density_nu

DEFAULT_LINEWIDTH = 1e-3 * EV
DEFAULT_DOF = 6
CONSERVATION_RTOL = 1e-9


@dataclass(frozen=True)
class ConverterSpec:
    nu1: float
    nu2: float
    B1: float
    B2: float
    A1: float
    A2: float
    q: float = 0.0
    N_total: float = 1.0

    def __post_init__(self):
        if not (self.nu1 > self.nu2 > 0):
            raise DomainError("need nu1 > nu2 > 0 (emission is down-shifted)")
        for name in ("B1", "B2", "A1", "A2", "q", "N_total"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and non-negative, got {value}")

    @classmethod
    def from_einstein(cls, nu1, nu2, B1, B2, q=0.0, N_total=1.0):
        """Spec whose spontaneous rates follow A = B 8 pi h nu^3 / c^3."""
        A1 = einstein_A_from_B(B1, CONSTANTS.c / nu1)
        A2 = einstein_A_from_B(B2, CONSTANTS.c / nu2)
        return cls(nu1, nu2, B1, B2, A1, A2, q, N_total)

    @property
    def E1(self):
        return CONSTANTS.h * self.nu1

    @property
    def E2(self):
        return CONSTANTS.h * self.nu2

    def with_q(self, q):
        return ConverterSpec(self.nu1, self.nu2, self.B1, self.B2, self.A1, self.A2, q, self.N_total)


@dataclass(frozen=True)
class ThermoState:
    T0: float
    T1: float
    Tm: float
    mu1: float
    mu2: float

    def __post_init__(self):
        if not (self.T1 >= self.Tm >= self.T0 > 0):
            raise DomainError(
                f"temperatures must satisfy T1 >= Tm >= T0 > 0, got T0={self.T0}, Tm={self.Tm}, T1={self.T1}"
            )
        if self.mu1 < 0 or self.mu2 < 0:
            raise DomainError("chemical potentials must be non-negative")

    @classmethod
    def from_temperatures(cls, spec, T0, T1, Tm):
        return cls(
            T0, T1, Tm,
            chemical_potential(spec.E1, T0, T1),
            chemical_potential(spec.E2, T0, T1),
        )


@dataclass(frozen=True)
class Populations:
    N0: float
    N1: float
    N2: float

    def __post_init__(self):
        if min(self.N0, self.N1, self.N2) < 0:
            raise DomainError("populations must be non-negative")

    @property
    def total(self):
        return self.N0 + self.N1 + self.N2

    def as_array(self):
        return np.array([self.N0, self.N1, self.N2])


def chemical_potential(E, T0, T1):
    """mu = E (1 - T0/T1)."""
    if not E > 0:
        raise DomainError("energy must be positive")
    if not T0 > 0:
        raise DomainError("ambient temperature must be positive")
    if T1 < T0:
        raise DomainError("source temperature below ambient gives a negative chemical potential")
    return E * (1.0 - T0 / T1)


def molecular_temperature(E_rv_mean, dof=DEFAULT_DOF, prop_const=1.0, floor=None):
    """Equipartition estimate T_m = E_rv / (prop_const (dof/2) kB).

    With ``floor`` set (normally T0) the result is clamped from below.
    """
    if dof < 1:
        raise DomainError("need at least one degree of freedom")
    if E_rv_mean < 0:
        raise DomainError("mean roto-vibrational energy must be non-negative")
    if not prop_const > 0:
        raise DomainError("proportionality constant must be positive")
    Tm = E_rv_mean / (prop_const * 0.5 * dof * CONSTANTS.kB)
    if floor is not None:
        Tm = max(Tm, floor)
    return Tm


def lorentzian(x, fwhm):
    """Unit-area Lorentzian with full width at half maximum ``fwhm``."""
    if not fwhm > 0:
        raise DomainError("linewidth must be positive")
    half = 0.5 * fwhm
    return (half / np.pi) / (np.asarray(x, dtype=float) ** 2 + half**2)


def internal_transfer_rate(matrix_element_sq, E1, E2, linewidth=DEFAULT_LINEWIDTH, prefactor=None):
    """Non-radiative 1 -> 2 rate from a squared coupling matrix element (J^2).

    The energy-conserving delta is replaced by a unit-area Lorentzian of
    FWHM ``linewidth`` (J). ``prefactor`` defaults to the golden-rule 2 pi/hbar.
    """
    if matrix_element_sq < 0:
        raise DomainError("squared matrix element must be non-negative")
    if prefactor is None:
        prefactor = 2.0 * np.pi / CONSTANTS.hbar
    return float(prefactor * matrix_element_sq * lorentzian(E2 - E1, linewidth))


def _check_conservation(pop, spec):
    if abs(pop.total - spec.N_total) > CONSERVATION_RTOL * max(spec.N_total, 1e-300):
        raise DomainError(
            f"populations sum to {pop.total!r}, expected N_total={spec.N_total!r}"
        )


def _pump_rates(spec, rho1, rho2):
    if rho1 < 0 or rho2 < 0:
        raise DomainError("energy densities must be non-negative")
    return spec.B1 * rho1, spec.B2 * rho2


def rate_derivatives(pop, spec, rho1, rho2):
    """(dN1/dt, dN2/dt) of the three-level rate equations."""
    _check_conservation(pop, spec)
    w1, w2 = _pump_rates(spec, rho1, rho2)
    dN1 = w1 * pop.N0 - (w1 + spec.A1) * pop.N1 - spec.q * pop.N1
    dN2 = w2 * pop.N0 - (w2 + spec.A2) * pop.N2 + spec.q * pop.N1
    return dN1, dN2


def rate_residual_scale(pop, spec, rho1, rho2):
    """Sum of the magnitudes of all terms in the rate equations."""
    w1, w2 = _pump_rates(spec, rho1, rho2)
    return (
        w1 * pop.N0 + (w1 + spec.A1 + spec.q) * pop.N1
        + w2 * pop.N0 + (w2 + spec.A2) * pop.N2 + spec.q * pop.N1
    )


def _reduced_system(spec, rho1, rho2):
    # d/dt (N1, N2) = M (N1, N2) + b after eliminating N0 = N - N1 - N2
    w1, w2 = _pump_rates(spec, rho1, rho2)
    M = np.array([
        [-(2.0 * w1 + spec.A1 + spec.q), -w1],
        [spec.q - w2, -(2.0 * w2 + spec.A2)],
    ])
    b = spec.N_total * np.array([w1, w2])
    return M, b


def steady_state(spec, rho1, rho2):
    """Exact fixed point of the rate equations for fixed pump densities."""
    M, b = _reduced_system(spec, rho1, rho2)
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    scale = abs(M[0, 0] * M[1, 1]) + abs(M[0, 1] * M[1, 0])
    if scale == 0.0 or abs(det) <= 1e-14 * scale:
        raise DomainError("degenerate kinetics")
    # Cramer's rule on -M x = b
    N1 = (-b[0] * M[1, 1] + b[1] * M[0, 1]) / det
    N2 = (-b[1] * M[0, 0] + b[0] * M[1, 0]) / det
    N1, N2 = max(N1, 0.0), max(N2, 0.0)
    N0 = max(spec.N_total - N1 - N2, 0.0)
    return Populations(N0, N1, N2)


def relaxation_rate(spec, rho1, rho2):
    """Slowest decay rate (1/s) of the linearised kinetics."""
    M, _ = _reduced_system(spec, rho1, rho2)
    return float(np.min(np.abs(np.linalg.eigvals(M).real)))


def generator_matrix(spec, rho1, rho2):
    """3x3 rate matrix acting on (N0, N1, N2); each column sums to zero."""
    w1, w2 = _pump_rates(spec, rho1, rho2)
    A1, A2, q = spec.A1, spec.A2, spec.q
    return np.array([
        [-(w1 + w2), w1 + A1, w2 + A2],
        [w1, -(w1 + A1 + q), 0.0],
        [w2, q, -(w2 + A2)],
    ])


def integrate_populations(spec, rho1, rho2, initial, t_end, atol=None, rtol=1e-9, h0=None,
                          max_steps=1_000_000):
    """Implicit-trapezoid integration of the full three-level system.

    Step size adapts on a step-doubling error estimate. Returns ``(t, N)``
    with ``N[k] = (N0, N1, N2)`` at every accepted step, starting with the
    initial state. The trapezoid map preserves N0 + N1 + N2 exactly up to
    rounding because every column of the generator sums to zero.
    """
    if isinstance(initial, Populations):
        initial = initial.as_array()
    y = np.asarray(initial, dtype=float).copy()
    if y.shape != (3,) or np.any(y < 0):
        raise DomainError("initial populations must be three non-negative numbers")
    _check_conservation(Populations(*y), spec)
    if atol is None:
        atol = 1e-12 * spec.N_total
    G = generator_matrix(spec, rho1, rho2)
    eye = np.eye(3)
    fastest = float(np.max(np.abs(np.diag(G)))) or 1.0
    h = h0 if h0 is not None else 1e-3 / fastest

    def propagator(h):
        return np.linalg.solve(eye - 0.5 * h * G, eye + 0.5 * h * G)

    t = 0.0
    ts, ys = [t], [y.copy()]
    for _ in range(max_steps):
        if t >= t_end:
            break
        h = min(h, t_end - t)
        full = propagator(h) @ y
        P_half = propagator(0.5 * h)
        half = P_half @ (P_half @ y)
        err = np.max(np.abs(half - full) / (atol + rtol * np.abs(half))) / 3.0
        if err <= 1.0:
            t += h
            y = half
            ts.append(t)
            ys.append(y.copy())
        factor = 0.9 * err ** (-1.0 / 3.0) if err > 0 else 4.0
        h *= min(4.0, max(0.2, factor))
    else:
        raise RuntimeError("integrate_populations exceeded max_steps")
    return np.array(ts), np.array(ys)


def _boltzmann_exponents(spec, thermo):
    x1 = (spec.E1 - thermo.mu1) / (CONSTANTS.kB * thermo.Tm)
    x2 = (spec.E2 - thermo.mu2) / (CONSTANTS.kB * thermo.Tm)
    if x1 <= 0 or x2 <= 0:
        raise DomainError("chemical potential exceeds photon energy")
    return x1, x2


def equilibrium_populations(spec, thermo):
    """Boltzmann occupations N_i/N0 = exp(-(h nu_i - mu_i)/kT_m), summing to N_total."""
    x1, x2 = _boltzmann_exponents(spec, thermo)
    r1, r2 = math.exp(-x1), math.exp(-x2)
    N0 = spec.N_total / (1.0 + r1 + r2)
    return Populations(N0, N0 * r1, N0 * r2)


def equilibrium_densities(spec, thermo):
    """Field energy densities (rho(nu1), rho(nu2)) in detailed balance with the molecules.

    The dissipative transfer q raises the absorbed-field density and lowers
    the emitted one. The rho(nu2) correction carries N1/N2 = exp(x2 - x1),
    where x_i = (h nu_i - mu_i)/kT_m, so the result is the exact zero of the
    rate equations at the Boltzmann populations.
    """
    x1, x2 = _boltzmann_exponents(spec, thermo)
    if spec.q > 0 and (spec.B1 == 0 or spec.B2 == 0):
        raise DomainError("dissipation without radiative coupling")
    q_over_B1 = spec.q / spec.B1 if spec.q > 0 else 0.0
    q_over_B2 = spec.q / spec.B2 if spec.q > 0 else 0.0
    num1 = mode_density_nu(spec.nu1) + q_over_B1
    num2 = mode_density_nu(spec.nu2) - q_over_B2 * math.exp(x2 - x1)
    if num2 < 0:
        raise DomainError("dissipation exceeds radiative capacity")
    return float(num1 * bose_factor(x1)), float(num2 * bose_factor(x2))


def max_transfer_rate(spec, thermo):
    """Largest q for which the emitted density stays non-negative."""
    x1, x2 = _boltzmann_exponents(spec, thermo)
    return float(spec.B2 * mode_density_nu(spec.nu2) * math.exp(x1 - x2))


def concentration_factor(spec, thermo):
    """C_M = rho(nu2) / rho(nu1)."""
    rho1, rho2 = equilibrium_densities(spec, thermo)
    if not rho1 > 0:
        raise DomainError("absorbed-field density must be positive")
    return rho2 / rho1
