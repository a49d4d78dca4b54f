"""Tests for inequality assembly, thresholds and sampled estimates."""

import math

import numpy as np
import pytest

from bellsquare import (
    DensityState,
    PAIR_SIGNS,
    S_TERMS,
    SEQUENCE_ORDER,
    estimate_inequality,
    evaluate_chi,
    evaluate_s,
    fidelity_from_visibility,
    find_violation_threshold,
    four_qubit_state,
    omega,
    sweep,
    visibility_threshold,
)

from conftest import random_density_matrix

ROOT_V = (math.sqrt(21) - 1) / 4  # visibility where signed omega reaches 16


class TestChi:
    def test_ideal_state(self, ideal_state):
        terms = evaluate_chi(ideal_state)
        assert terms.chi == pytest.approx(6.0, abs=1e-9)
        for name in SEQUENCE_ORDER:
            expected = -1.0 if name == "γcC" else 1.0
            assert terms.terms[name] == pytest.approx(expected, abs=1e-10)

    def test_maximally_mixed_state(self, mixed_state):
        assert evaluate_chi(mixed_state).chi == pytest.approx(6.0, abs=1e-9)

    def test_state_independence_random_products(self):
        rng = np.random.default_rng(2024)
        for _ in range(5):
            rho = DensityState(
                np.kron(random_density_matrix(rng, 4), random_density_matrix(rng, 4))
            )
            assert evaluate_chi(rho).chi == pytest.approx(6.0, abs=1e-9)


class TestS:
    def test_ideal_state_both_variants(self, ideal_state):
        for variant in ("abs", "signed"):
            _, total = evaluate_s(ideal_state, variant)
            assert total == pytest.approx(12.0, abs=1e-9)

    def test_terms_have_quantum_signs(self, ideal_state):
        s_terms, _ = evaluate_s(ideal_state, "signed")
        for term in S_TERMS:
            assert s_terms.terms[term.key] == pytest.approx(PAIR_SIGNS[term.alice], abs=1e-10)

    def test_mixed_state(self, mixed_state):
        for variant in ("abs", "signed"):
            _, total = evaluate_s(mixed_state, variant)
            assert total == pytest.approx(0.0, abs=1e-10)

    def test_signed_at_09(self):
        _, total = evaluate_s(four_qubit_state(0.9), "signed")
        assert total == pytest.approx(4 * 0.9 + 8 * 0.9**2, abs=1e-9)  # 10.08

    def test_signed_polynomial_on_grid(self):
        for v in (0.0, 0.25, 0.5, 0.75, 1.0):
            _, total = evaluate_s(four_qubit_state(v), "signed")
            assert total == pytest.approx(4 * v + 8 * v * v, abs=1e-9)

    def test_variant_validated(self, ideal_state):
        with pytest.raises(ValueError):
            evaluate_s(ideal_state, "plain")


class TestOmega:
    def test_ideal_state(self, ideal_state):
        report = omega(ideal_state)
        assert report.omega_signed == pytest.approx(18.0, abs=1e-9)
        assert report.omega_abs == pytest.approx(18.0, abs=1e-9)
        assert report.violated_signed and report.violated_abs and report.chi_violated

    def test_mixed_state(self, mixed_state):
        report = omega(mixed_state)
        assert report.omega_signed == pytest.approx(6.0, abs=1e-9)
        assert not report.violated_signed

    def test_at_crossing_visibility(self):
        report = omega(four_qubit_state(ROOT_V))
        assert report.omega_signed == pytest.approx(16.0, abs=1e-9)

    def test_omega_equals_chi_plus_s(self):
        for v in (0.3, 0.8):
            report = omega(four_qubit_state(v))
            assert report.omega_abs == report.chi + report.s_abs
            assert report.omega_signed == report.chi + report.s_signed


class TestVisibilityThreshold:
    def test_ideal_chi(self):
        assert visibility_threshold(6.0) == pytest.approx(ROOT_V, abs=1e-12)

    def test_observed_chi_530(self):
        value = visibility_threshold(5.30)
        assert 0.930 <= value <= 0.934
        assert value == pytest.approx(0.9332159566199232, abs=1e-12)

    def test_observed_chi_459(self):
        value = visibility_threshold(4.59)
        assert 0.969 <= value <= 0.971
        assert value == pytest.approx(0.9701434341912429, abs=1e-12)

    @pytest.mark.parametrize("chi", [-6.0, 0.0, 3.0, 6.0])
    def test_is_positive_quadratic_root(self, chi):
        threshold = visibility_threshold(chi)
        assert 8 * threshold**2 + 4 * threshold + (chi - 16) == pytest.approx(0.0, abs=1e-9)
        assert threshold > 0

    def test_domain(self):
        for bad in (-6.1, 6.1):
            with pytest.raises(ValueError):
                visibility_threshold(bad)

    def test_inverts_engine_sweep(self):
        crossing = find_violation_threshold("signed", tol=1e-10)
        assert crossing == pytest.approx(visibility_threshold(6.0), abs=1e-8)
        report = omega(four_qubit_state(visibility_threshold(6.0)))
        assert report.omega_signed == pytest.approx(16.0, abs=1e-8)


class TestFidelity:
    def test_reported_point(self):
        assert fidelity_from_visibility(0.97) == pytest.approx(0.9886859966642595, abs=1e-12)
        assert round(fidelity_from_visibility(0.97), 2) == 0.99

    def test_endpoints(self):
        assert fidelity_from_visibility(1.0) == pytest.approx(1.0, abs=1e-15)
        assert fidelity_from_visibility(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            fidelity_from_visibility(1.2)


class TestSweep:
    def test_endpoints_and_constancy(self):
        result = sweep([0.0, 0.25, 0.5, 0.75, 1.0], "signed")
        omegas = [row.omega_signed for row in result.rows]
        assert omegas[0] == pytest.approx(6.0, abs=1e-9)
        assert omegas[-1] == pytest.approx(18.0, abs=1e-9)
        for row in result.rows:
            assert row.chi == pytest.approx(6.0, abs=1e-9)

    def test_monotone_nondecreasing(self):
        result = sweep([i / 20 for i in range(21)], "signed")
        omegas = [row.omega_signed for row in result.rows]
        assert all(b >= a - 1e-12 for a, b in zip(omegas, omegas[1:]))

    def test_crossing_bracket_fine_grid(self):
        grid = [0.894 + 0.001 * i for i in range(5)]  # 0.894 .. 0.898
        result = sweep(grid, "signed")
        lo, hi = result.crossing_bracket
        assert 0.895 <= lo < hi <= 0.897
        assert result.crossing == pytest.approx(ROOT_V, abs=1e-6)

    def test_coarse_grid_refines_crossing(self):
        result = sweep([0.0, 0.5, 1.0], "signed")
        assert result.crossing_bracket == (0.5, 1.0)
        assert result.crossing == pytest.approx(ROOT_V, abs=1e-8)

    def test_validation(self):
        with pytest.raises(ValueError):
            sweep([], "signed")
        with pytest.raises(ValueError):
            sweep([0.0, 1.5], "signed")
        with pytest.raises(ValueError):
            sweep([0.5, 0.5], "signed")
        with pytest.raises(ValueError):
            sweep([0.0, 1.0], "nope")


class TestEstimate:
    def test_deterministic_at_full_visibility(self):
        # Every correlator is certain at V=1, so estimates are exactly ±1.
        estimate = estimate_inequality(1.0, 2000, seed=42)
        assert estimate.omega_signed == 18.0
        assert all(t.estimate in (1.0, -1.0) for t in estimate.s_terms.values())
        assert estimate.max_abs_z < 1e-3  # exact values carry ~1e-16 rounding

    def test_within_five_sigma_noisy(self):
        estimate = estimate_inequality(0.9, 20_000, seed=42)
        assert estimate.within(5.0)
        assert estimate.omega_signed == pytest.approx(estimate.exact.omega_signed, abs=0.2)

    def test_seed_reproducibility(self):
        first = estimate_inequality(0.8, 5000, seed=1)
        second = estimate_inequality(0.8, 5000, seed=1)
        assert first.omega_signed == second.omega_signed
        assert all(
            first.s_terms[k].estimate == second.s_terms[k].estimate for k in first.s_terms
        )

    def test_chi_terms_are_exact_products(self):
        # Sequence products are deterministic at every visibility.
        estimate = estimate_inequality(0.37, 1000, seed=3)
        for term in estimate.chi_terms.values():
            assert term.estimate in (1.0, -1.0)
            assert term.sigma <= 1e-8
            assert abs(term.estimate - term.exact) <= 1e-12

    def test_shots_validated(self):
        with pytest.raises(ValueError):
            estimate_inequality(1.0, 0, seed=1)
