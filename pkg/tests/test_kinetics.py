import math

import pytest
from hypothesis import given, strategies as st

from lsc.constants import DEBYE
from lsc.errors import DomainError
from lsc.kinetics import (
    TransitionSpec,
    absorption_rate,
    einstein_A_from_B,
    einstein_B,
    einstein_B_from_A,
    photons_in_mode,
    rate_from_cross_section,
    spontaneous_lifetime,
)
from lsc.radiometry import planck_density_nu

H = 6.62607015e-34
E = 1.602176634e-19
EPS0 = 8.8541878128e-12

dipoles = st.floats(1e-32, 1e-28)
wavelengths = st.floats(100e-9, 5e-6)


def test_rate_from_cross_section():
    assert rate_from_cross_section(0.0, 1e-20) == 0.0
    assert rate_from_cross_section(1e21, 0.0) == 0.0
    assert rate_from_cross_section(1e21, 1e-20) == pytest.approx(10.0, rel=1e-15)
    with pytest.raises(DomainError):
        rate_from_cross_section(-1.0, 1e-20)


class TestEinsteinB:
    def test_zero_dipole(self):
        assert einstein_B(0.0) == 0.0

    def test_quadratic(self):
        d = 5 * DEBYE
        assert einstein_B(2 * d) == pytest.approx(4 * einstein_B(d), rel=1e-14)

    def test_average_rate_form(self):
        # W = B rho must equal (2 pi^2 e^2 / 3 h^2 eps) |r|^2 rho with r = d/e and
        # the stray nu factor of the averaged-rate expression dropped
        d, nu, T = 5 * DEBYE, 6e14, 5800.0
        rho = planck_density_nu(nu, T)
        r = d / E
        expected = 2 * math.pi**2 * E**2 / (3 * H**2 * EPS0) * r**2 * rho
        assert absorption_rate(einstein_B(d), rho) == pytest.approx(expected, rel=1e-13)

    def test_host_permittivity(self):
        d = 3 * DEBYE
        assert einstein_B(d, n_refr=1.5) == pytest.approx(einstein_B(d) / 2.25, rel=1e-14)

    def test_physical_magnitude(self):
        # a 5 D transition at 500 nm has a lifetime of tens of nanoseconds
        tau = spontaneous_lifetime(einstein_A_from_B(einstein_B(5 * DEBYE), 500e-9))
        assert 1e-9 < tau < 1e-7

    @given(dipoles, dipoles)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        if lo < hi:
            assert einstein_B(lo) < einstein_B(hi)

    def test_negative(self):
        with pytest.raises(DomainError):
            einstein_B(-1.0)


class TestEinsteinA:
    def test_zero(self):
        assert einstein_A_from_B(0.0, 500e-9) == 0.0

    def test_cubic(self):
        B = 1e20
        assert einstein_A_from_B(B, 250e-9) == pytest.approx(8 * einstein_A_from_B(B, 500e-9), rel=1e-14)

    def test_lifetime_round_trip(self):
        A = einstein_A_from_B(1e20, 500e-9)
        assert spontaneous_lifetime(A) == pytest.approx(1.0 / A, rel=1e-15)
        with pytest.raises(DomainError):
            spontaneous_lifetime(0.0)

    def test_bad_wavelength(self):
        with pytest.raises(DomainError):
            einstein_A_from_B(1.0, 0.0)

    @given(dipoles, wavelengths)
    def test_ratio_closed(self, d, lam):
        B = einstein_B(d)
        A = einstein_A_from_B(B, lam)
        assert A * lam**3 / (8 * math.pi * H) == pytest.approx(B, rel=1e-12)
        assert einstein_B_from_A(A, lam) == pytest.approx(B, rel=1e-12)

    def test_transition_spec(self):
        t = TransitionSpec(6e14, 4 * DEBYE)
        assert t.A() == pytest.approx(einstein_A_from_B(einstein_B(4 * DEBYE), t.wavelength))
        with pytest.raises(DomainError):
            TransitionSpec(0.0, 1.0)
        with pytest.raises(DomainError):
            TransitionSpec(1e14, 1.0, cross_section=-1.0)


class TestAbsorptionRate:
    def test_zero_density(self):
        assert absorption_rate(1e20, 0.0) == 0.0

    def test_linear(self):
        assert absorption_rate(1e20, 2e-15) == pytest.approx(2 * absorption_rate(1e20, 1e-15), rel=1e-15)

    @given(st.floats(1e13, 3e15), st.floats(200.0, 8000.0))
    def test_hotter_source_pumps_faster(self, nu, T):
        B = einstein_B(5 * DEBYE)
        assert absorption_rate(B, planck_density_nu(nu, 2 * T)) > absorption_rate(B, planck_density_nu(nu, T))


class TestPhotonsInMode:
    def test_zero(self):
        assert photons_in_mode(0.0, 1.0, 1e14) == 0.0

    def test_volume_scaling(self):
        assert photons_in_mode(1e-15, 2.0, 1e14) == pytest.approx(2 * photons_in_mode(1e-15, 1.0, 1e14))

    def test_single_photon(self):
        nu, V = 5e14, 1e-6
        assert photons_in_mode(H * nu / V, V, nu) == pytest.approx(1.0, rel=1e-14)

    def test_bad_frequency(self):
        with pytest.raises(DomainError):
            photons_in_mode(1.0, 1.0, 0.0)
