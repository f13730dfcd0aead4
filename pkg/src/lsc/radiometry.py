"""Photon flux and blackbody spectra.

All quantities are SI. Frequency densities are J/(m^3 Hz), wavelength
densities J/(m^3 m). Scalar or array inputs are accepted wherever it makes
sense; results follow numpy broadcasting.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, optimize

from .constants import CONSTANTS
from .errors import DomainError

# hv/kT above which expm1 would overflow; switch to the Wien form there
WIEN_SWITCH = 700.0


class Axis(str, Enum):
    FREQUENCY = "frequency_Hz"
    WAVELENGTH = "wavelength_m"


def _require_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} must be positive")
    return arr


def _scalar_or_array(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def photon_flux(intensity, nu):
    """Mean photon-flux density I/(h nu) in photons/(m^2 s)."""
    nu = _require_positive("frequency", nu)
    intensity = np.asarray(intensity, dtype=float)
    if np.any(intensity < 0):
        raise DomainError("intensity must be non-negative")
    return _scalar_or_array(intensity / (CONSTANTS.h * nu))


def photon_flux_from_density(rho, nu, n_refr=1.0):
    """Photon flux carried by an energy density travelling at c/n."""
    nu = _require_positive("frequency", nu)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("energy density must be non-negative")
    if n_refr < 1:
        raise DomainError(f"refractive index must be >= 1, got {n_refr}")
    return _scalar_or_array((CONSTANTS.c / n_refr) * rho / (CONSTANTS.h * nu))


def bose_factor(x):
    # 1/(e^x - 1), falling back to e^-x where e^x overflows
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        safe = np.minimum(x, WIEN_SWITCH)
        out = np.where(x > WIEN_SWITCH, np.exp(-x), 1.0 / np.expm1(safe))
    return out


def mode_density_nu(nu):
    """8 pi h nu^3 / c^3, the spontaneous-emission prefactor of Planck's law."""
    nu = np.asarray(nu, dtype=float)
    return 8.0 * np.pi * CONSTANTS.h * nu**3 / CONSTANTS.c**3


def planck_density_nu(nu, T):
    """Blackbody spectral energy density per unit frequency."""
    nu = _require_positive("frequency", nu)
    T = _require_positive("temperature", T)
    x = CONSTANTS.h * nu / (CONSTANTS.kB * T)
    return _scalar_or_array(mode_density_nu(nu) * bose_factor(x))


def planck_density_lambda(lam, T):
    """Blackbody spectral energy density per unit wavelength."""
    lam = _require_positive("wavelength", lam)
    T = _require_positive("temperature", T)
    x = CONSTANTS.h * CONSTANTS.c / (lam * CONSTANTS.kB * T)
    prefactor = 8.0 * np.pi * CONSTANTS.h * CONSTANTS.c / lam**5
    return _scalar_or_array(prefactor * bose_factor(x))


def integrate_density_nu(T, nu_lo=0.0, nu_hi=np.inf, rtol=1e-9, atol=1e-9):
    """Integrate planck_density_nu over [nu_lo, nu_hi] by adaptive quadrature.

    The integration variable is x = h nu / kT, and the integrand is scaled to
    order one so ``atol`` acts on the dimensionless x^3/(e^x - 1) integral.
    Returns the energy density in J/m^3.
    """
    T = float(_require_positive("temperature", T))
    if nu_lo < 0 or nu_hi <= nu_lo:
        raise DomainError("integration range must satisfy 0 <= lo < hi")
    nu_T = CONSTANTS.kB * T / CONSTANTS.h
    scale = mode_density_nu(nu_T)

    def integrand(x):
        if x <= 0.0:
            return 0.0
        return planck_density_nu(x * nu_T, T) / scale

    x_lo, x_hi = nu_lo / nu_T, nu_hi / nu_T
    # the integrand peaks near x = 2.82; breakpoints keep quad from missing it
    edges = [x_lo] + [b for b in (3.0, 30.0) if x_lo < b < x_hi] + [x_hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(integrand, a, b, epsabs=atol, epsrel=rtol, limit=200)
        total += value
    return total * scale * nu_T


def wien_peak_wavelength(T):
    """Wavelength maximising planck_density_lambda at temperature T.

    Solves 5 (1 - e^-x) = x for x = hc / (lambda kT).
    """
    T = float(_require_positive("temperature", T))
    x = optimize.brentq(lambda x: 5.0 * -np.expm1(-x) - x, 1.0, 10.0, xtol=1e-15, rtol=1e-15)
    return CONSTANTS.h * CONSTANTS.c / (x * CONSTANTS.kB * T)


@dataclass(frozen=True)
class SpectralGrid:
    """Tabulated energy density on a strictly increasing positive axis."""

    axis: Axis
    coordinates: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        coords = np.asarray(self.coordinates, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        if coords.ndim != 1 or coords.shape != dens.shape:
            raise DomainError("coordinates and densities must be 1-D arrays of equal length")
        if not np.all(coords > 0) or np.any(np.diff(coords) <= 0):
            raise DomainError("coordinates must be strictly increasing and positive")
        if np.any(dens < 0):
            raise DomainError("densities must be non-negative")
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "coordinates", coords)
        object.__setattr__(self, "densities", dens)

    def __len__(self):
        return self.coordinates.size

    @property
    def points(self):
        return list(zip(self.coordinates.tolist(), self.densities.tolist()))

    @property
    def units(self):
        return "J/(m^3*Hz)" if self.axis is Axis.FREQUENCY else "J/(m^3*m)"

    def integrate(self):
        """Trapezoid-rule integral over the tabulated range (J/m^3)."""
        return float(np.trapezoid(self.densities, self.coordinates))

    def peak(self):
        """Location of the maximum, refined by a parabola through the top three samples."""
        x, y = self.coordinates, self.densities
        i = int(np.argmax(y))
        if i == 0 or i == len(y) - 1:
            return float(x[i])
        x0, x1, x2 = x[i - 1], x[i], x[i + 1]
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
        a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
        b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
        if a >= 0:
            return float(x1)
        return float(-b / (2 * a))


def sample_spectrum(T, axis, lo, hi, n_points, log_mesh=False):
    """Planck spectrum on a uniform (or log-uniform) mesh over [lo, hi]."""
    axis = Axis(axis)
    if n_points < 2:
        raise DomainError("n_points must be at least 2")
    if not (0 < lo < hi):
        raise DomainError(f"range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if log_mesh:
        coords = np.geomspace(lo, hi, n_points)
    else:
        coords = np.linspace(lo, hi, n_points)
    coords[0], coords[-1] = lo, hi
    if axis is Axis.FREQUENCY:
        dens = planck_density_nu(coords, T)
    else:
        dens = planck_density_lambda(coords, T)
    return SpectralGrid(axis, coords, np.atleast_1d(dens))
