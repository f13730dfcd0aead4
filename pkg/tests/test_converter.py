import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, linalg

from lsc.constants import CONSTANTS, EV
from lsc.converter import (
    ConverterSpec,
    Populations,
    ThermoState,
    chemical_potential,
    concentration_factor,
    equilibrium_densities,
    equilibrium_populations,
    integrate_populations,
    internal_transfer_rate,
    lorentzian,
    max_transfer_rate,
    molecular_temperature,
    rate_derivatives,
    rate_residual_scale,
    relaxation_rate,
    steady_state,
)
from lsc.errors import DomainError
from lsc.radiometry import mode_density_nu, planck_density_nu

from factories import random_converter, random_kinetics, random_populations

seeds = st.integers(0, 2**32 - 1)
KB = CONSTANTS.kB


def _generator(spec, rho1, rho2):
    # built from the rate equations term by term, independent of the package matrix
    a1, a2 = spec.B1 * rho1, spec.B2 * rho2
    out0 = [-(a1 + a2), a1, a2]
    out1 = [a1 + spec.A1, -(a1 + spec.A1 + spec.q), spec.q]
    out2 = [a2 + spec.A2, 0.0, -(a2 + spec.A2)]
    return np.array([out0, out1, out2]).T


def _simple_spec(q=0.0):
    return ConverterSpec(nu1=6e14, nu2=4.5e14, B1=1e20, B2=2e20, A1=5e7, A2=8e7, q=q, N_total=1.0)


class TestChemicalPotential:
    def test_equal_temperatures(self):
        assert chemical_potential(1e-19, 300.0, 300.0) == 0.0

    def test_hot_limit(self):
        assert chemical_potential(1e-19, 300.0, 1e12) == pytest.approx(1e-19, rel=1e-9)

    def test_solar_500nm(self):
        E = CONSTANTS.h * CONSTANTS.c / 500e-9
        assert chemical_potential(E, 300.0, 5800.0) / E == pytest.approx(1 - 300 / 5800, rel=1e-15)
        assert 1 - 300 / 5800 == pytest.approx(0.9483, abs=1e-4)

    def test_cold_source_rejected(self):
        with pytest.raises(DomainError):
            chemical_potential(1e-19, 300.0, 200.0)

    @given(st.floats(1e-21, 1e-18), st.floats(1.0, 1e3), st.floats(1.0, 1e4))
    def test_range(self, E, T0, extra):
        mu = chemical_potential(E, T0, T0 + extra)
        assert 0 <= mu < E


class TestMolecularTemperature:
    def test_zero_energy(self):
        assert molecular_temperature(0.0, 6) == 0.0
        assert molecular_temperature(0.0, 6, floor=300.0) == 300.0

    def test_inverse(self):
        for dof in (1, 3, 6, 9):
            assert molecular_temperature(KB * 300 * dof / 2, dof) == pytest.approx(300.0, rel=1e-14)

    def test_linear(self):
        assert molecular_temperature(2e-20, 6) == pytest.approx(2 * molecular_temperature(1e-20, 6))

    def test_no_dof(self):
        with pytest.raises(DomainError):
            molecular_temperature(1e-20, 0)


class TestInternalTransfer:
    def test_zero_coupling(self):
        assert internal_transfer_rate(0.0, 1e-19, 1e-19) == 0.0

    def test_resonance_is_maximum(self):
        gamma = 1e-3 * EV
        at_res = internal_transfer_rate(1e-50, 3e-19, 3e-19, gamma)
        off = internal_transfer_rate(1e-50, 3e-19, 3e-19 + gamma, gamma)
        assert off < at_res
        assert internal_transfer_rate(1e-50, 3e-19, 3e-19 + 0.5 * gamma, gamma) == pytest.approx(0.5 * at_res)

    def test_golden_rule_prefactor(self):
        gamma = 2e-3 * EV
        q = internal_transfer_rate(1e-50, 3e-19, 3e-19, gamma)
        assert q == pytest.approx(2 * math.pi / CONSTANTS.hbar * 1e-50 * 2 / (math.pi * gamma), rel=1e-13)
        assert internal_transfer_rate(1e-50, 3e-19, 3e-19, gamma, prefactor=1.0) == pytest.approx(
            1e-50 * 2 / (math.pi * gamma), rel=1e-13
        )

    @pytest.mark.parametrize("gamma", [1e-3, 1.0, 37.0])
    def test_lorentzian_normalised(self, gamma):
        total = 0.0
        for a, b in ((-np.inf, -gamma), (-gamma, gamma), (gamma, np.inf)):
            total += integrate.quad(lambda x: float(lorentzian(x, gamma)), a, b, epsabs=1e-13, epsrel=1e-13)[0]
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_bad_linewidth(self):
        with pytest.raises(DomainError):
            internal_transfer_rate(1e-50, 1.0, 1.0, linewidth=0.0)


class TestRateEquations:
    def test_dark_equilibrium(self):
        spec = _simple_spec(q=1e6)
        assert rate_derivatives(Populations(1.0, 0.0, 0.0), spec, 0.0, 0.0) == (0.0, 0.0)

    def test_two_level_balance(self):
        spec = _simple_spec()
        rho1 = 1e-14
        w = spec.B1 * rho1
        N0 = 0.7
        N1 = w * N0 / (w + spec.A1)
        dN1, _ = rate_derivatives(Populations(N0, N1, 1.0 - N0 - N1), spec, rho1, 0.0)
        assert abs(dN1) <= 1e-15 * w

    def test_conservation_enforced(self):
        with pytest.raises(DomainError):
            rate_derivatives(Populations(0.5, 0.1, 0.1), _simple_spec(), 0.0, 0.0)

    @settings(max_examples=30, deadline=None)
    @given(seeds)
    def test_matches_propagator_difference(self, seed):
        rng = np.random.default_rng(seed)
        spec, rho1, rho2 = random_kinetics(rng)
        N = random_populations(rng, spec.N_total)
        G = _generator(spec, rho1, rho2)
        eps = 1e-4 / np.max(np.abs(G))
        fd = (linalg.expm(G * eps) @ N - linalg.expm(-G * eps) @ N) / (2 * eps)
        dN1, dN2 = rate_derivatives(Populations(*N), spec, rho1, rho2)
        scale = np.max(np.abs(G)) * spec.N_total
        assert abs(dN1 - fd[1]) <= 1e-6 * scale
        assert abs(dN2 - fd[2]) <= 1e-6 * scale


class TestSteadyState:
    def test_no_pumping(self):
        pop = steady_state(_simple_spec(q=3e7), 0.0, 0.0)
        assert (pop.N1, pop.N2) == (0.0, 0.0)
        assert pop.N0 == 1.0

    def test_two_level_limit(self):
        spec = _simple_spec()
        rho1, rho2 = 3e-14, 1e-14
        pop = steady_state(spec, rho1, rho2)
        w1 = spec.B1 * rho1
        assert pop.N1 / pop.N0 == pytest.approx(w1 / (w1 + spec.A1), rel=1e-13)

    def test_degenerate(self):
        spec = ConverterSpec(6e14, 4e14, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
        with pytest.raises(DomainError, match="degenerate kinetics"):
            steady_state(spec, 1e-14, 1e-14)

    @settings(max_examples=40, deadline=None)
    @given(seeds)
    def test_residual_vanishes(self, seed):
        rng = np.random.default_rng(seed)
        spec, rho1, rho2 = random_kinetics(rng)
        pop = steady_state(spec, rho1, rho2)
        assert pop.total == pytest.approx(spec.N_total, rel=1e-12)
        rates = max(spec.B1 * rho1, spec.B2 * rho2, spec.A1, spec.A2, spec.q)
        d1, d2 = rate_derivatives(pop, spec, rho1, rho2)
        assert max(abs(d1), abs(d2)) <= 1e-12 * spec.N_total * rates

    @pytest.mark.parametrize("seed", range(5))
    def test_long_time_radau(self, seed):
        rng = np.random.default_rng(1000 + seed)
        spec, rho1, rho2 = random_kinetics(rng)
        G = _generator(spec, rho1, rho2)
        t_end = 60.0 / relaxation_rate(spec, rho1, rho2)
        sol = integrate.solve_ivp(lambda t, y: G @ y, (0, t_end), [spec.N_total, 0, 0], method="Radau",
                                  jac=G, rtol=1e-12, atol=1e-16 * spec.N_total)
        pop = steady_state(spec, rho1, rho2)
        np.testing.assert_allclose(sol.y[:, -1], pop.as_array(), rtol=1e-8)

    @pytest.mark.parametrize("seed", range(3))
    def test_unique_fixed_point_and_conservation(self, seed):
        rng = np.random.default_rng(2000 + seed)
        spec, rho1, rho2 = random_kinetics(rng)
        target = steady_state(spec, rho1, rho2).as_array()
        t_end = 60.0 / relaxation_rate(spec, rho1, rho2)
        for _ in range(5):
            start = random_populations(rng, spec.N_total)
            start[0] = spec.N_total - start[1] - start[2]
            ts, ys = integrate_populations(spec, rho1, rho2, start, t_end)
            assert np.all(np.abs(ys.sum(axis=1) - spec.N_total) <= 1e-9 * spec.N_total)
            assert np.all(np.diff(ts) > 0)
            np.testing.assert_allclose(ys[-1], target, rtol=1e-8)


class TestEquilibrium:
    def _thermo_with_exponents(self, spec, Tm, x1, x2):
        return ThermoState(300.0, 6000.0, Tm, spec.E1 - x1 * KB * Tm, spec.E2 - x2 * KB * Tm)

    def test_symmetric_exponents(self):
        spec = _simple_spec()
        thermo = self._thermo_with_exponents(spec, 400.0, 3.0, 3.0)
        pop = equilibrium_populations(spec, thermo)
        assert pop.N1 == pytest.approx(pop.N2, rel=1e-12)

    def test_unit_exponent(self):
        spec = _simple_spec()
        pop = equilibrium_populations(spec, self._thermo_with_exponents(spec, 400.0, 1.0, 2.0))
        assert pop.N1 / pop.N0 == pytest.approx(math.exp(-1), rel=1e-12)
        assert pop.N1 / pop.N0 == pytest.approx(0.367879, abs=1e-6)
        assert pop.total == pytest.approx(spec.N_total, rel=1e-15)

    def test_cold_molecules_in_ground_state(self):
        spec = _simple_spec()
        pop = equilibrium_populations(spec, ThermoState(1.0, 6000.0, 1.0, 0.0, 0.0))
        assert pop.N1 == 0.0 and pop.N2 == 0.0 and pop.N0 == spec.N_total

    def test_plain_boltzmann(self):
        spec = _simple_spec()
        T = 450.0
        pop = equilibrium_populations(spec, ThermoState(T, T, T, 0.0, 0.0))
        r1, r2 = math.exp(-spec.E1 / (KB * T)), math.exp(-spec.E2 / (KB * T))
        assert pop.N1 / pop.N0 == r1 and pop.N2 / pop.N0 == r2

    def test_chemical_potential_too_large(self):
        spec = _simple_spec()
        with pytest.raises(DomainError, match="chemical potential exceeds photon energy"):
            equilibrium_populations(spec, ThermoState(300.0, 6000.0, 400.0, spec.E1, 0.0))
        with pytest.raises(DomainError, match="chemical potential exceeds photon energy"):
            equilibrium_densities(spec, ThermoState(300.0, 6000.0, 400.0, 0.0, 1.1 * spec.E2))

    def test_q_zero_bose_form(self):
        rng = np.random.default_rng(7)
        spec, thermo = random_converter(rng, q_fraction=0.0)
        rho1, rho2 = equilibrium_densities(spec, thermo)
        for nu, mu, rho in ((spec.nu1, thermo.mu1, rho1), (spec.nu2, thermo.mu2, rho2)):
            x = (CONSTANTS.h * nu - mu) / (KB * thermo.Tm)
            assert rho == pytest.approx(8 * math.pi * CONSTANTS.h * nu**3 / CONSTANTS.c**3 / math.expm1(x), rel=1e-13)

    def test_q_zero_mu_zero_is_planck(self):
        spec = _simple_spec()
        thermo = ThermoState(300.0, 6000.0, 1234.5, 0.0, 0.0)
        rho1, rho2 = equilibrium_densities(spec, thermo)
        assert rho1 == planck_density_nu(spec.nu1, thermo.Tm)
        assert rho2 == planck_density_nu(spec.nu2, thermo.Tm)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_detailed_balance_closure(self, seed):
        spec, thermo = random_converter(np.random.default_rng(seed))
        rho1, rho2 = equilibrium_densities(spec, thermo)
        pop = equilibrium_populations(spec, thermo)
        d1, d2 = rate_derivatives(pop, spec, rho1, rho2)
        scale = rate_residual_scale(pop, spec, rho1, rho2)
        assert abs(d1) <= 1e-9 * scale and abs(d2) <= 1e-9 * scale

    def test_opposite_exponent_sign_does_not_close(self):
        # using exp(x1 - x2) in the rho(nu2) correction leaves a residual in dN2/dt
        rng = np.random.default_rng(11)
        spec, thermo = random_converter(rng, q_fraction=0.0)
        x1 = (spec.E1 - thermo.mu1) / (KB * thermo.Tm)
        x2 = (spec.E2 - thermo.mu2) / (KB * thermo.Tm)
        q = 0.5 * spec.B2 * mode_density_nu(spec.nu2) / math.exp(x1 - x2)
        spec = spec.with_q(q)
        rho1, _ = equilibrium_densities(spec, thermo)
        rho2_flipped = (mode_density_nu(spec.nu2) - q / spec.B2 * math.exp(x1 - x2)) / math.expm1(x2)
        pop = equilibrium_populations(spec, thermo)
        _, d2 = rate_derivatives(pop, spec, rho1, rho2_flipped)
        assert abs(d2) > 1e-3 * rate_residual_scale(pop, spec, rho1, rho2_flipped)

    def test_dissipation_without_coupling(self):
        spec = ConverterSpec(6e14, 4.5e14, 0.0, 2e20, 5e7, 8e7, q=1e6)
        with pytest.raises(DomainError, match="dissipation without radiative coupling"):
            equilibrium_densities(spec, ThermoState(300.0, 5800.0, 400.0, 0.0, 0.0))

    def test_dissipation_exceeds_capacity(self):
        spec, thermo = random_converter(np.random.default_rng(3), q_fraction=0.0)
        spec = spec.with_q(1.01 * max_transfer_rate(spec, thermo))
        with pytest.raises(DomainError, match="dissipation exceeds radiative capacity"):
            equilibrium_densities(spec, thermo)

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.floats(0.0, 0.45), st.floats(0.0, 0.45))
    def test_monotone_in_q(self, seed, f_a, f_b):
        spec, thermo = random_converter(np.random.default_rng(seed), q_fraction=0.0)
        qmax = max_transfer_rate(spec, thermo)
        lo, hi = sorted((f_a, f_b))
        if hi - lo < 1e-6:
            return
        r1_lo, r2_lo = equilibrium_densities(spec.with_q(lo * qmax), thermo)
        r1_hi, r2_hi = equilibrium_densities(spec.with_q(hi * qmax), thermo)
        assert r1_hi > r1_lo
        assert r2_hi < r2_lo


class TestConcentration:
    def test_identical_channels(self):
        # nu1 > nu2 is a type invariant, so approach equality from above
        nu = 5e14
        spec = ConverterSpec.from_einstein(nu * (1 + 1e-12), nu, 1e20, 1e20)
        thermo = ThermoState(300.0, 300.0, 300.0, 0.0, 0.0)
        assert concentration_factor(spec, thermo) == pytest.approx(1.0, rel=1e-9)

    def test_q_zero_closed_form(self):
        for seed in range(20):
            spec, thermo = random_converter(np.random.default_rng(seed), q_fraction=0.0)
            x1 = (spec.E1 - thermo.mu1) / (KB * thermo.Tm)
            x2 = (spec.E2 - thermo.mu2) / (KB * thermo.Tm)
            closed = (spec.nu2 / spec.nu1) ** 3 * math.expm1(x1) / math.expm1(x2)
            assert concentration_factor(spec, thermo) == pytest.approx(closed, rel=1e-12)

    def test_decreasing_in_q(self):
        spec, thermo = random_converter(np.random.default_rng(5), q_fraction=0.0)
        qmax = max_transfer_rate(spec, thermo)
        values = [concentration_factor(spec.with_q(f * qmax), thermo) for f in (0.0, 0.01, 0.1, 0.5, 0.9)]
        assert all(a > b for a, b in zip(values, values[1:]))


def test_spec_invariants():
    with pytest.raises(DomainError):
        ConverterSpec(4e14, 6e14, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ConverterSpec(6e14, 4e14, -1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ThermoState(300.0, 5800.0, 200.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        Populations(-1.0, 0.0, 0.0)
