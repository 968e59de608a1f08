import math
import random

import numpy as np
import pytest

from quasispin.exact import (
    MAX_LADDER_ATOMS,
    compare_meanfield,
    dicke_spectrum,
    gibbs_observables,
    ground_state_m,
)
from quasispin.meanfield import rz_relaxation
from quasispin.thermal import DomainError, ModelParams, Variant, couplings_at

from oracles import ladder_ground_m, ladder_rz

TRAD_CR_06 = 0.2 / math.atanh(2.0 / 3.0)


def trad06() -> ModelParams:
    return ModelParams(omega21=1.0, chi=0.6, variant=Variant.TRADITIONAL)


class TestSpectrum:
    def test_two_atom_ladder(self):
        spectrum = dicke_spectrum(2, 0.3, 0.4)
        assert spectrum.spin == 1.0
        assert spectrum.m_values.tolist() == [-1.0, 0.0, 1.0]
        assert spectrum.energies == pytest.approx([-0.7, -0.6, 0.1], rel=1e-12)

    def test_odd_count_gives_half_integer_labels(self):
        spectrum = dicke_spectrum(5, 0.2, 0.1)
        assert spectrum.spin == 2.5
        assert spectrum.m_values.tolist() == [-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]
        assert len(spectrum.energies) == 6

    def test_second_difference_is_constant(self):
        spectrum = dicke_spectrum(12, 0.07, -0.3)
        second = np.diff(spectrum.energies, n=2)
        assert second == pytest.approx(np.full(11, 2 * 0.07), rel=1e-12)

    def test_validation(self):
        with pytest.raises(DomainError):
            dicke_spectrum(1, 0.1, 0.5)
        with pytest.raises(DomainError):
            dicke_spectrum(2.5, 0.1, 0.5)
        with pytest.raises(DomainError):
            dicke_spectrum(MAX_LADDER_ATOMS + 1, 0.1, 0.5)
        with pytest.raises(DomainError):
            dicke_spectrum(8, 0.0, 0.5)


class TestGroundState:
    def test_exact_tie_takes_the_smaller_label(self):
        # continuous minimizer sits exactly at -2.5: the levels m = -3 and
        # m = -2 are degenerate (up to rounding in the evaluated energies)
        # and the tie rule picks the smaller label
        spectrum = dicke_spectrum(10, 0.1, 0.5)
        index_m3 = int(-3 + spectrum.spin)
        index_m2 = int(-2 + spectrum.spin)
        assert -spectrum.varpi / (2.0 * spectrum.lambda_n) == -2.5
        assert spectrum.energies[index_m3] == pytest.approx(
            spectrum.energies[index_m2], abs=1e-14
        )
        assert ground_state_m(spectrum) == -3.0

    def test_clamps_to_the_ladder_ends(self):
        down = dicke_spectrum(6, 0.05, 4.0)  # strong positive varpi pushes m to -j
        up = dicke_spectrum(6, 0.05, -4.0)
        assert ground_state_m(down) == -3.0
        assert ground_state_m(up) == 3.0

    def test_matches_enumeration_on_random_draws(self):
        rng = random.Random(20260816)
        for _ in range(200):
            n_atoms = rng.randrange(2, 60)
            lambda_n = rng.uniform(0.05, 2.0)
            varpi = rng.uniform(-3.0, 3.0)
            spectrum = dicke_spectrum(n_atoms, lambda_n, varpi)
            assert ground_state_m(spectrum) == ladder_ground_m(n_atoms, lambda_n, varpi)


class TestGibbs:
    def test_matches_direct_summation(self):
        for theta in (0.05, 0.3, 2.0):
            for varpi in (0.5, -0.5, 0.0):
                spectrum = dicke_spectrum(8, 0.1, varpi)
                obs = gibbs_observables(spectrum, theta)
                assert obs.rz_per_atom == pytest.approx(
                    ladder_rz(8, 0.1, varpi, theta), rel=1e-12, abs=1e-15
                )

    def test_polarization_is_bounded(self):
        spectrum = dicke_spectrum(16, 0.2, -1.0)
        for theta in (0.01, 0.1, 1.0, 10.0):
            obs = gibbs_observables(spectrum, theta)
            assert -0.5 <= obs.rz_per_atom <= 0.5

    def test_symmetric_spectrum_is_unpolarized(self):
        spectrum = dicke_spectrum(8, 0.1, 0.0)
        assert abs(gibbs_observables(spectrum, 0.3).rz_per_atom) <= 1e-14

    def test_tiny_temperature_reaches_the_ground_state(self):
        spectrum = dicke_spectrum(8, 0.075, 0.4)  # lam = 0.6 at N = 8
        obs = gibbs_observables(spectrum, 1e-8)
        assert obs.z_shifted == pytest.approx(1.0, rel=1e-12)
        assert obs.rz_per_atom == pytest.approx(ground_state_m(spectrum) / 8.0, rel=1e-12)
        assert obs.f_per_atom == pytest.approx(float(spectrum.energies.min()) / 8.0, rel=1e-12)

    def test_free_energy_below_ground_energy(self):
        spectrum = dicke_spectrum(8, 0.1, 0.5)
        obs = gibbs_observables(spectrum, 0.4)
        assert obs.f_per_atom <= float(spectrum.energies.min()) / 8.0

    def test_requires_positive_theta(self):
        spectrum = dicke_spectrum(4, 0.1, 0.5)
        with pytest.raises(DomainError):
            gibbs_observables(spectrum, 0.0)


class TestCompareMeanfield:
    def test_record_structure(self):
        comps = compare_meanfield(trad06(), 0.1, [8, 32])
        assert [c.n_atoms for c in comps] == [8, 32]
        for comp in comps:
            assert comp.deviation == pytest.approx(
                abs(comp.rz_exact - comp.rz_meanfield), rel=1e-15
            )
            assert comp.rz_meanfield == comps[0].rz_meanfield  # shared mean-field value

    def test_ordered_phase_deviation_shrinks_with_size(self):
        theta = 0.5 * TRAD_CR_06
        comps = compare_meanfield(trad06(), theta, [8, 16, 32, 64, 128, 256, 512])
        devs = [c.deviation for c in comps]
        for small, large in zip(devs, devs[1:]):
            assert large <= small + 1e-12
        assert devs[-1] < 1e-9

    def test_above_transition_converges_to_relaxation_value(self):
        # the fixed-magnitude ladder has no disordered phase: above the
        # transition it approaches -varpi/(2*lam), not the disordered
        # mean-field polarization
        theta = 2.0 * TRAD_CR_06
        cpl = couplings_at(trad06(), theta)
        target = rz_relaxation(cpl)
        comps = compare_meanfield(trad06(), theta, [8, 16, 32, 64, 128, 256, 512])
        gaps = [abs(c.rz_exact - target) for c in comps]
        for small, large in zip(gaps, gaps[1:]):
            assert large <= small + 1e-12
        assert gaps[-1] < 1e-6

    def test_ground_state_limit_is_quantization_limited(self):
        # at theta -> 0 the ladder pins to one m, so the distance to the
        # saturated mean-field value is at most half a quantization step
        for n_atoms in (8, 64, 512):
            comps = compare_meanfield(trad06(), 1e-6, [n_atoms])
            assert comps[0].deviation <= 0.5 / n_atoms + 1e-9

    def test_requires_positive_theta(self):
        with pytest.raises(DomainError):
            compare_meanfield(trad06(), 0.0, [8])

    def test_rejects_bad_sizes(self):
        with pytest.raises(DomainError):
            compare_meanfield(trad06(), 0.1, [1])
