"""Correspondence engine: ladder predictions, per-eigenstate spectrum
matching, momentum extraction, inhomogeneity independence, and the
inverse problem in both start modes."""

import numpy as np
import pytest

from vertexdual import (
    ChainParams,
    inverse_spectral_solve,
    joint_diagonalize,
    lax_from_chain_state,
    lax_from_velocities,
    predicted_integrals,
    predicted_strings,
    verify_duality,
    verify_momentum_identification,
)
from vertexdual.sampling import draw_chain_params, rng_from_seed

CHAIN = ChainParams(L=3, eta=0.41, h=0.23, inhom=(0.1, 0.9, 1.75))


class TestPredictedSpectra:
    def test_single_site(self):
        spec = predicted_strings(1, 0, 0.3, 0.5)
        assert spec.values.shape == (1,)
        assert abs(spec.values[0] - np.exp(0.3)) < 1e-15

    def test_two_sites(self):
        up = predicted_strings(2, 0, 0.3, 0.5)
        assert sorted(np.round(v.real, 10) for v in up.values) == sorted(
            np.round(v, 10) for v in (np.exp(0.6 - 0.5), np.exp(0.6 + 0.5))
        )
        mixed = predicted_strings(2, 1, 0.3, 0.5)
        expected = sorted((np.exp(0.6), np.exp(-0.6)))
        assert np.allclose(sorted(v.real for v in mixed.values), expected)

    def test_sector_sizes(self):
        spec = predicted_strings(5, 2, 0.1, 0.3)
        assert spec.M1 == 3 and spec.M2 == 2 and spec.values.size == 5

    def test_power_sums_match_closed_form(self):
        for L, m2 in ((2, 1), (4, 2), (5, 3)):
            spec = predicted_strings(L, m2, 0.17, 0.44)
            for n in range(1, L + 1):
                direct = np.sum(spec.values ** n)
                closed = predicted_integrals(L, m2, 0.17, 0.44, n)
                assert abs(direct - closed) < 1e-12 * max(1.0, abs(closed))

    def test_balanced_sector_at_zero_field(self):
        value = predicted_integrals(4, 2, 0.0, 0.37, 3)
        expected = 2 * np.sinh(2 * 0.37 * 3) / np.sinh(0.37 * 3)
        assert abs(value - expected) < 1e-13


class TestLaxFromChain:
    def test_single_site(self):
        chain = ChainParams(L=1, eta=0.5, h=0.3, inhom=(0.2,))
        lax = lax_from_chain_state(chain, [np.exp(0.3)])
        assert abs(lax.entries[0, 0] - np.exp(0.3)) < 1e-15

    def test_off_diagonal_entry(self):
        h_vals = np.array([1.3 - 0.2j, 0.7 + 0.1j, 2.0])
        lax = lax_from_chain_state(CHAIN, h_vals).entries
        x = CHAIN.inhom
        expected = np.sinh(CHAIN.eta) * h_vals[0] / np.sinh(x[1] - x[0] + CHAIN.eta)
        assert abs(lax[0, 1] - expected) < 1e-14 * abs(expected)
        assert np.max(np.abs(np.diag(lax) - h_vals)) < 1e-14

    def test_agrees_with_velocity_build(self):
        h_vals = np.array([1.1, 0.4 - 0.3j, 1.9 + 0.2j])
        a = lax_from_chain_state(CHAIN, h_vals).entries
        b = lax_from_velocities(np.array(CHAIN.inhom), -h_vals, CHAIN.eta).entries
        assert np.max(np.abs(a - b)) == 0.0


class TestVerifyDuality:
    def test_single_site(self):
        chain = ChainParams(L=1, eta=0.5, h=0.3, inhom=(0.0,))
        report = verify_duality(chain)
        assert report.n_states == 2
        assert report.worst_error < 1e-12
        assert report.passed

    def test_l2_random_real(self):
        rng = rng_from_seed(10)
        chain = draw_chain_params(rng, 2)
        report = verify_duality(chain, seed=1)
        assert report.worst_error < 1e-9

    def test_l3_all_sectors_recorded(self):
        report = verify_duality(CHAIN, seed=0)
        assert report.n_states == 8
        assert report.worst_error < 1e-8
        from math import comb

        for m2 in range(4):
            recs = [r for r in report.records if r.sector_M2 == m2]
            assert len(recs) == comb(3, m2)
            for rec in recs:
                assert rec.matched_string.M2 == m2
                assert rec.matched_string.values.size == 3


class TestMomentumIdentification:
    def test_single_site_reduction(self):
        chain = ChainParams(L=1, eta=0.5, h=0.3, inhom=(0.0,))
        spec = joint_diagonalize(chain)
        assert verify_momentum_identification(chain, spec) < 1e-12

    def test_all_states_l3(self):
        spec = joint_diagonalize(CHAIN, seed=0)
        assert verify_momentum_identification(CHAIN, spec) < 1e-9

    def test_momentum_branch_consistency(self):
        spec = joint_diagonalize(CHAIN, seed=0)
        for state in spec.states:
            p = -np.log(-CHAIN.eta * state.G) / CHAIN.eta
            assert np.max(np.abs(np.exp(-CHAIN.eta * p) + CHAIN.eta * state.G)) < 1e-12


class TestSpectrumUniversality:
    def test_independent_of_inhomogeneities(self):
        chain_b = ChainParams(L=3, eta=0.41, h=0.23, inhom=(0.3, 1.25, 1.9))
        rep_a = verify_duality(CHAIN, seed=0)
        rep_b = verify_duality(chain_b, seed=5)
        def sector_values(report, m2):
            vals = np.concatenate(
                [r.lax_eigenvalues for r in report.records if r.sector_M2 == m2]
            )
            return vals[np.lexsort((vals.imag, vals.real))]

        for m2 in range(4):
            va = sector_values(rep_a, m2)
            vb = sector_values(rep_b, m2)
            assert np.max(np.abs(va - vb)) < 1e-8 * max(1.0, np.max(np.abs(va)))

    def test_charge_vectors_distinct(self):
        # Empirical injectivity of state -> charge tuple at L=3.
        spec = joint_diagonalize(CHAIN, seed=0)
        vectors = [s.H for s in spec.states]
        for i in range(len(vectors)):
            for j in range(i + 1, len(vectors)):
                assert np.max(np.abs(vectors[i] - vectors[j])) > 1e-6


class TestInverseSpectral:
    def test_single_site_unique(self):
        sols = inverse_spectral_solve((0.2,), 0.5, 0.3, 0, seed=0, mode="both")
        assert len(sols) == 1
        assert abs(sols[0].H[0] - np.exp(0.3)) < 1e-10

    def test_validation_mode_recovers_all_states(self):
        for m2 in range(4):
            sols = inverse_spectral_solve(
                CHAIN.inhom, CHAIN.eta, CHAIN.h, m2, seed=1, mode="validation"
            )
            from math import comb

            spec = joint_diagonalize(CHAIN, seed=1)
            n_states = comb(3, m2)
            assert len(sols) == n_states
            matched = {s.matched_state for s in sols}
            assert len(matched) == n_states
            for s in sols:
                assert s.residual <= 1e-9
                assert s.match_error is not None and s.match_error <= 1e-6
            del spec

    def test_discovery_mode_l2_balanced_sector(self):
        sols = inverse_spectral_solve((0.25, 1.35), 0.45, 0.3, 1, seed=2, mode="discovery")
        assert len(sols) >= 2
        for s in sols:
            assert s.residual <= 1e-9
            assert s.match_error is not None and s.match_error <= 1e-6

    def test_discovery_finds_exact_non_eigenstate_solutions(self):
        # The invariant equations are symmetric under swapping the two
        # charge slots at L=2, so the one-state sectors carry a second
        # exact solution that matches no eigenstate.
        sols = inverse_spectral_solve((0.25, 1.35), 0.45, 0.3, 0, seed=3, mode="discovery")
        assert len(sols) == 2
        assert all(s.residual <= 1e-9 for s in sols)
        match_errors = sorted(s.match_error for s in sols)
        assert match_errors[0] <= 1e-6
        assert match_errors[1] > 1e-3

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            inverse_spectral_solve((0.2,), 0.5, 0.3, 0, mode="guess")
