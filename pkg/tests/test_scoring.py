import math

import numpy as np
import pytest

from expinfo import DiscreteMeasure, DomainError, InstanceFamily, divergence, entropy, solve_maxent
from expinfo.measures import kraft_sum, total_mass
from expinfo.scoring import (
    ExpertReport,
    GameConfig,
    expected_payoff,
    honesty_gap_scan,
    payoff,
    perturbed_reports,
    worst_case_payoff,
)

from conftest import random_family


def game(f, fee=1.0, price=1.0):
    sol = solve_maxent(f)
    return GameConfig(f, fee, price, sol.p), sol


@pytest.fixture
def three():
    return InstanceFamily.from_arrays(["a", "b", "c"], [[4, 1, 1], [1, 4, 1], [1, 1, 4]])


class TestConfig:
    def test_defaults(self, symmetric_family):
        cfg = GameConfig(symmetric_family)
        assert (cfg.f, cfg.k) == (1.0, 1.0)
        assert cfg.prior.weights.tolist() == [0.5, 0.5]

    @pytest.mark.parametrize("k", [0.0, -1.0])
    def test_price_must_be_positive(self, symmetric_family, k):
        with pytest.raises(DomainError):
            GameConfig(symmetric_family, k=k)

    def test_prior_length(self, symmetric_family):
        with pytest.raises(DomainError):
            GameConfig(symmetric_family, prior=[1.0])

    def test_report_mass(self):
        with pytest.raises(DomainError):
            ExpertReport(DiscreteMeasure(["a", "b"], [0.6, 0.5]))
        ExpertReport(DiscreteMeasure(["a", "b"], [0.5, 0.5 + 1e-13]))


class TestPayoff:
    def test_honest_supported_instance(self, three):
        cfg, sol = game(three, fee=3.0, price=2.0)
        honest = ExpertReport.honest(sol)
        for i in sol.support:
            assert payoff(cfg, honest, i) == pytest.approx(3.0 - 2.0 * sol.c, abs=1e-9)

    def test_single_symbol(self):
        f = InstanceFamily.from_arrays(["a"], [[3], [7]])
        cfg = GameConfig(f, 2.5, 1.0)
        report = ExpertReport(DiscreteMeasure(["a"], [1.0]))
        assert payoff(cfg, report, 0) == payoff(cfg, report, 1) == 2.5

    def test_missing_symbol(self, symmetric_family):
        cfg = GameConfig(symmetric_family)
        report = ExpertReport(DiscreteMeasure(["a", "b"], [1.0, 0.0]))
        assert payoff(cfg, report, 1) == -math.inf
        assert payoff(cfg, report, 0) == 1.0

    def test_index_out_of_range(self, symmetric_family):
        with pytest.raises(DomainError):
            payoff(GameConfig(symmetric_family), ExpertReport(DiscreteMeasure(["a", "b"], [0.5, 0.5])), 2)

    def test_affine_in_instance(self, rng):
        # payoff(mix) = f - k L(mix) is affine in the counted text
        f = InstanceFamily.from_arrays(["a", "b", "c"], [[2, 1, 0], [0, 3, 3], [5, 0, 1]])
        q = DiscreteMeasure(f.alphabet, rng.dirichlet(np.ones(3)))
        cfg = GameConfig(f, 1.5, 0.7)
        pays = [payoff(cfg, ExpertReport(q), i) for i in range(3)]
        both = InstanceFamily.from_arrays(f.alphabet, [f.matrix[0] + f.matrix[1]])
        combined = payoff(GameConfig(both, 1.5, 0.7), ExpertReport(q), 0)
        assert combined == pytest.approx(pays[0] + pays[1] - 1.5, abs=1e-12)


class TestWorstCase:
    def test_honest_is_f_minus_kc(self, three):
        cfg, sol = game(three, 2.0, 0.5)
        assert worst_case_payoff(cfg, ExpertReport.honest(sol)) == pytest.approx(2.0 - 0.5 * sol.c, abs=1e-9)

    def test_no_report_beats_honest(self, rng):
        for _ in range(10):
            f = random_family(rng)
            cfg, sol = game(f)
            bound = cfg.f - cfg.k * sol.c
            for _ in range(100):
                q = DiscreteMeasure(f.alphabet, rng.dirichlet(np.ones(len(f.alphabet))))
                assert worst_case_payoff(cfg, ExpertReport(q)) <= bound + 1e-9

    def test_singleton(self):
        f = InstanceFamily.from_arrays(["a", "b"], [[3, 1]])
        cfg, sol = game(f)
        value = worst_case_payoff(cfg, ExpertReport.honest(sol))
        assert value == pytest.approx(1.0 - entropy(f.instances[0]), abs=1e-12)


class TestExpected:
    def test_honest_at_optimal_prior(self, three):
        cfg, sol = game(three)
        assert expected_payoff(cfg, ExpertReport.honest(sol)) == pytest.approx(1.0 - sol.c, abs=1e-9)

    def test_point_mass_prior(self, three):
        q = ExpertReport(DiscreteMeasure(three.alphabet, [0.2, 0.3, 0.5]))
        cfg = GameConfig(three, prior=[0, 1, 0])
        assert expected_payoff(cfg, q) == payoff(cfg, q, 1)

    def test_dishonest_is_strictly_worse(self, three):
        cfg, sol = game(three)
        honest = expected_payoff(cfg, ExpertReport.honest(sol))
        rng = np.random.default_rng(0)
        for q in perturbed_reports(ExpertReport.honest(sol).Q, 200, 0.3, rng):
            if divergence(sol.mu_star, q.scaled(total_mass(sol.mu_star))) >= 1e-4:
                assert expected_payoff(cfg, ExpertReport(q)) < honest

    def test_exact_gap_formula(self, rng):
        for _ in range(10):
            f = random_family(rng)
            cfg, sol = game(f, price=rng.uniform(0.1, 3))
            honest = expected_payoff(cfg, ExpertReport.honest(sol))
            m = total_mass(sol.mu_star)
            for _ in range(50):
                q = DiscreteMeasure(f.alphabet, rng.dirichlet(np.ones(len(f.alphabet))))
                gap = honest - expected_payoff(cfg, ExpertReport(q))
                assert gap == pytest.approx(cfg.k * divergence(sol.mu_star, q.scaled(m)), abs=1e-9)

    def test_gap_formula_subnormalized_report(self, three):
        # a report of mass s < 1 loses an extra k ||mu*|| (1 - s)
        cfg, sol = game(three, price=2.0)
        m = total_mass(sol.mu_star)
        q = DiscreteMeasure(three.alphabet, [0.2, 0.3, 0.4])
        gap = expected_payoff(cfg, ExpertReport.honest(sol)) - expected_payoff(cfg, ExpertReport(q))
        assert gap == pytest.approx(2.0 * (divergence(sol.mu_star, q.scaled(m)) + m * 0.1), abs=1e-9)


class TestScan:
    def test_radius_zero(self, three):
        cfg, sol = game(three)
        report = honesty_gap_scan(cfg, 50, 0.0, seed=1, solution=sol)
        assert report.gap == pytest.approx(0.0, abs=1e-12)

    def test_random_games(self, rng):
        for _ in range(5):
            cfg, sol = game(random_family(rng), price=rng.uniform(0.5, 2))
            report = honesty_gap_scan(cfg, 300, 0.1, seed=2, solution=sol)
            assert report.passed and report.gap <= 1e-9
            assert report.formula_error <= 1e-9
            assert report.n == 300

    def test_perturbations_are_admissible(self, three):
        sol = solve_maxent(three)
        q0 = ExpertReport.honest(sol).Q
        for q in perturbed_reports(q0, 200, 0.1, np.random.default_rng(0)):
            assert total_mass(q) == pytest.approx(1.0, abs=1e-15)
            assert np.abs(q.weights - q0.weights).sum() <= 0.1 + 1e-12

    def test_honest_report_is_kraft_tight(self, three):
        report = ExpertReport.honest(solve_maxent(three))
        assert kraft_sum(report.lengths) == pytest.approx(1.0, abs=1e-15)

    def test_wrong_prior_rejected(self):
        f = InstanceFamily.from_arrays(["a", "b"], [[4, 0], [0, 4], [1, 1]])
        with pytest.raises(DomainError):
            honesty_gap_scan(GameConfig(f, prior=[0, 0, 1]), 10)

    def test_deterministic(self, three):
        cfg, sol = game(three)
        a = honesty_gap_scan(cfg, 100, 0.1, seed=3, solution=sol)
        b = honesty_gap_scan(cfg, 100, 0.1, seed=3, solution=sol)
        assert a == b
