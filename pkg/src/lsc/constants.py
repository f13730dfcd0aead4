"""CODATA 2018 physical constants (SI).

Every module reads :data:`CONSTANTS`; nothing else in the package defines a
physical constant.

=====  ========================  ============
name   quantity                  unit
=====  ========================  ============
h      Planck constant           J s
c      speed of light in vacuum  m/s
kB     Boltzmann constant        J/K
e      elementary charge         C
eps0   vacuum permittivity       F/m
=====  ========================  ============
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = 6.62607015e-34
    c: float = 299792458.0
    kB: float = 1.380649e-23
    e: float = 1.602176634e-19
    eps0: float = 8.8541878128e-12

    def __post_init__(self):
        for name in ("h", "c", "kB", "e", "eps0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"constant {name} must be positive")

    @property
    def hbar(self) -> float:
        return self.h / (2.0 * math.pi)


CONSTANTS = PhysicalConstants()

EV = CONSTANTS.e  # J per eV
NM = 1e-9
DEBYE = 1e-21 / CONSTANTS.c  # C m
