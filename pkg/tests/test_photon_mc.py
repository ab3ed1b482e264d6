"""Monte Carlo photon-fate tests against the analytic branching ratios."""

import math

import numpy as np
import pytest

from pillarkit.efficiency import efficiency_eq3, mirror_q_int
from pillarkit.errors import InputDomainError
from pillarkit.loss_budget import compose
from pillarkit.photon_mc import FATES, ChannelRates, FateTally, estimate_eta, simulate

# The worked loss budget: q_total = 1500, q_2d = 2000, q_ext = 30000,
# beta = 0.9, opaque bottom mirror -> analytic eta = 0.63.
WORKED = ChannelRates.from_budget(
    0.9, compose(mirror_q_int(2000.0, 30000.0), 30000.0, 6000.0), top_fraction=1.0
)


def random_rates(rng):
    budget = compose(
        10.0 ** rng.uniform(2.5, 4.0),
        10.0 ** rng.uniform(3.5, 5.0),
        10.0 ** rng.uniform(2.5, 5.0),
    )
    return ChannelRates.from_budget(
        float(rng.uniform(0.05, 0.98)), budget, top_fraction=float(rng.uniform(0.5, 1.0))
    )


class TestChannelRates:
    def test_worked_budget_analytic_eta(self):
        assert WORKED.analytic_eta() == pytest.approx(0.63, rel=1e-12)
        assert WORKED.analytic_eta() == pytest.approx(
            efficiency_eq3(0.9, 1500.0, 2000.0, 30000.0), rel=1e-12
        )

    def test_fate_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            probs = random_rates(rng).fate_probabilities()
            assert sum(probs.values()) == pytest.approx(1.0, abs=1e-12)

    def test_mode_weights_normalize_to_inverse_q_total(self):
        budget = compose(mirror_q_int(2000.0, 30000.0), 30000.0, 6000.0)
        rates = ChannelRates.from_budget(0.9, budget)
        assert sum(rates.mode_weights) == pytest.approx(1.0 / budget.q_total, rel=1e-12)

    def test_invalid_rates_rejected(self):
        with pytest.raises(InputDomainError):
            ChannelRates(0.5, -1.0, 0.0, 0.0, 0.0)
        with pytest.raises(InputDomainError):
            ChannelRates(1.5, 1.0, 0.0, 0.0, 0.0)
        with pytest.raises(InputDomainError):
            ChannelRates(0.5, 0.0, 0.0, 0.0, 0.0)


class TestSimulate:
    def test_single_open_channel_collects_everything(self):
        rates = ChannelRates(1.0, 1e-3, 0.0, 0.0, 0.0)
        tally = simulate(rates, 10_000, seed=1)
        assert tally.collected_top == 10_000

    def test_same_seed_reproduces_bit_for_bit(self):
        t1 = simulate(WORKED, 100_000, seed=77)
        t2 = simulate(WORKED, 100_000, seed=77)
        assert t1 == t2

    def test_merged_tally_independent_of_thread_count(self):
        t1 = simulate(WORKED, 300_000, seed=9, threads=1)
        t4 = simulate(WORKED, 300_000, seed=9, threads=4)
        assert t1 == t4

    def test_different_seeds_stay_within_binomial_spread(self):
        etas = [estimate_eta(simulate(WORKED, 50_000, seed=s))[0] for s in range(12)]
        se = math.sqrt(0.63 * 0.37 / 50_000)
        assert np.std(etas) < 3.0 * se
        assert abs(np.mean(etas) - 0.63) < 3.0 * se

    def test_worked_example_at_one_million_photons(self):
        tally = simulate(WORKED, 1_000_000, seed=20020923)
        eta_hat, se = estimate_eta(tally)
        assert abs(eta_hat - 0.63) < 3.0 * se

    def test_randomized_configs_match_analytic_eta(self):
        rng = np.random.default_rng(123)
        for i in range(50):
            rates = random_rates(rng)
            tally = simulate(rates, 100_000, seed=1000 + i)
            eta_hat, se = estimate_eta(tally)
            eta_true = rates.analytic_eta()
            se_true = math.sqrt(max(eta_true * (1 - eta_true), 1e-12) / 100_000)
            assert abs(eta_hat - eta_true) < 5.0 * se_true

    def test_error_scaling_with_photon_count(self):
        # quadrupling the sample roughly halves the mean absolute error
        def mean_abs_err(n):
            errs = [
                abs(estimate_eta(simulate(WORKED, n, seed=s))[0] - 0.63)
                for s in range(100, 160)
            ]
            return np.mean(errs)

        ratio = mean_abs_err(10_000) / mean_abs_err(40_000)
        assert 1.4 < ratio < 2.9

    def test_bottom_channel_quantifies_the_opaque_mirror_assumption(self):
        budget = compose(mirror_q_int(2000.0, 30000.0), 30000.0, 6000.0)
        rates = ChannelRates.from_budget(0.9, budget, top_fraction=0.07 / 0.071)
        tally = simulate(rates, 200_000, seed=3)
        assert tally.lost_bottom > 0
        eta_hat, se = estimate_eta(tally)
        assert abs(eta_hat - rates.analytic_eta()) < 5.0 * se

    def test_invalid_photon_count_rejected(self):
        with pytest.raises(InputDomainError):
            simulate(WORKED, 0, seed=1)


class TestEstimator:
    def test_reference_tally(self):
        tally = FateTally(630_000, 0, 0, 0, 370_000, 1_000_000, seed=0)
        eta_hat, se = estimate_eta(tally)
        assert eta_hat == pytest.approx(0.63, abs=1e-15)
        assert se == pytest.approx(math.sqrt(0.63 * 0.37 / 1e6), rel=1e-12)
        assert se == pytest.approx(4.828043081829324e-4, rel=1e-9)

    def test_all_collected(self):
        tally = FateTally(1000, 0, 0, 0, 0, 1000, seed=0)
        assert estimate_eta(tally) == (1.0, 0.0)

    def test_none_collected(self):
        tally = FateTally(0, 0, 0, 0, 1000, 1000, seed=0)
        assert estimate_eta(tally) == (0.0, 0.0)

    def test_count_bookkeeping_enforced(self):
        with pytest.raises(InputDomainError):
            FateTally(10, 0, 0, 0, 0, 11, seed=0)
        with pytest.raises(InputDomainError):
            FateTally(-1, 0, 0, 0, 1, 0, seed=0)

    def test_fate_fractions_converge_to_channel_products(self):
        tally = simulate(WORKED, 2_000_000, seed=42)
        probs = WORKED.fate_probabilities()
        for fate in FATES:
            observed = tally.counts[fate] / tally.total
            se = math.sqrt(max(probs[fate] * (1 - probs[fate]), 1e-12) / tally.total)
            assert abs(observed - probs[fate]) < 5.0 * se
