"""Radiative transition rates and Einstein coefficients.

B multiplies a spectral energy density per unit frequency, so B*rho is a
rate in 1/s and B carries units m^3/(J s^2).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import CONSTANTS
from .errors import DomainError


@dataclass(frozen=True)
class TransitionSpec:
    nu: float
    dipole_moment: float
    cross_section: Optional[float] = None

    def __post_init__(self):
        if not self.nu > 0:
            raise DomainError("transition frequency must be positive")
        if self.dipole_moment < 0:
            raise DomainError("dipole moment must be non-negative")
        if self.cross_section is not None and self.cross_section < 0:
            raise DomainError("cross section must be non-negative")

    @property
    def wavelength(self):
        return CONSTANTS.c / self.nu

    def B(self, n_refr=1.0):
        return einstein_B(self.dipole_moment, n_refr)

    def A(self, n_refr=1.0):
        return einstein_A_from_B(self.B(n_refr), self.wavelength)


def rate_from_cross_section(flux, sigma):
    if flux < 0 or sigma < 0:
        raise DomainError("flux and cross section must be non-negative")
    return flux * sigma


def einstein_B(dipole_moment, n_refr=1.0):
    """Absorption coefficient 2 pi^2 |d|^2 / (3 eps h^2) for a dipole d in C m.

    The host medium enters through eps = eps0 n^2. Written in terms of the
    position matrix element r = d/e this is the familiar
    2 pi^2 e^2 |r|^2 / (3 eps h^2).
    """
    if dipole_moment < 0:
        raise DomainError("dipole moment must be non-negative")
    if n_refr < 1:
        raise DomainError("refractive index must be >= 1")
    eps = CONSTANTS.eps0 * n_refr**2
    r = dipole_moment / CONSTANTS.e
    return 2.0 * np.pi**2 * CONSTANTS.e**2 * r**2 / (3.0 * eps * CONSTANTS.h**2)


def einstein_A_from_B(B, lam):
    """Spontaneous rate A = B 8 pi h / lambda^3."""
    if lam <= 0:
        raise DomainError("wavelength must be positive")
    if B < 0:
        raise DomainError("B must be non-negative")
    return B * 8.0 * np.pi * CONSTANTS.h / lam**3


def einstein_B_from_A(A, lam):
    if lam <= 0:
        raise DomainError("wavelength must be positive")
    if A < 0:
        raise DomainError("A must be non-negative")
    return A * lam**3 / (8.0 * np.pi * CONSTANTS.h)


def spontaneous_lifetime(A):
    if A <= 0:
        raise DomainError("lifetime is defined only for A > 0")
    return 1.0 / A


def absorption_rate(B, rho):
    """W = B rho."""
    if B < 0:
        raise DomainError("B must be non-negative")
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise DomainError("energy density must be non-negative")
    out = B * rho
    return float(out) if out.ndim == 0 else out


def photons_in_mode(rho, volume, nu):
    """Photon number rho V / (h nu) held by one mode."""
    if nu <= 0:
        raise DomainError("frequency must be positive")
    if rho < 0 or volume < 0:
        raise DomainError("density and volume must be non-negative")
    return rho * volume / (CONSTANTS.h * nu)
