"""The logarithmic scoring contract between a coder and an expert.

The expert reveals a coding measure ``Q`` and is paid ``f - k * L`` where
``L = sum_a -ln Q(a) * mu_w(a)`` is the total code length of the text ``w``
that ends up being coded. Revealing the normalized maximum entropy measure
guarantees ``f - k c`` on every text in the support of the optimal mixture,
and any other report earns strictly less in expectation under that mixture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from expinfo.maxent import InstanceFamily, MaxEntSolution, solve_maxent
from expinfo.measures import (
    CodeLengthFunction,
    DiscreteMeasure,
    DomainError,
    MixtureWeights,
    check_same_alphabet,
    divergence,
    normalize,
    total_code_length,
    total_mass,
)

KRAFT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class GameConfig:
    family: InstanceFamily
    f: float = 1.0
    k: float = 1.0
    prior: MixtureWeights | None = None

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError("price per nat k must be positive")
        prior = self.prior
        if prior is None:
            prior = MixtureWeights.uniform(len(self.family))
        elif not isinstance(prior, MixtureWeights):
            prior = MixtureWeights(prior)
        if len(prior) != len(self.family):
            raise DomainError("prior must have one weight per instance")
        object.__setattr__(self, "prior", prior)


@dataclass(frozen=True, eq=False)
class ExpertReport:
    Q: DiscreteMeasure

    def __post_init__(self):
        if total_mass(self.Q) > 1 + KRAFT_SLACK:
            raise DomainError(f"reported measure has mass {total_mass(self.Q)!r} > 1")

    @classmethod
    def honest(cls, solution: MaxEntSolution) -> "ExpertReport":
        return cls(normalize(solution.mu_star))

    @property
    def lengths(self) -> CodeLengthFunction:
        return CodeLengthFunction.from_coding_measure(self.Q)


def _code_length(config: GameConfig, report: ExpertReport, i: int) -> float:
    if not 0 <= i < len(config.family):
        raise DomainError(f"instance index {i} out of range")
    check_same_alphabet(config.family, report.Q)
    return total_code_length(report.lengths, config.family.vertices[i])


def payoff(config: GameConfig, report: ExpertReport, instance_index: int) -> float:
    """``f - k * L``; ``-inf`` when ``Q`` misses a symbol the text uses."""
    return config.f - config.k * _code_length(config, report, instance_index)


def worst_case_payoff(config: GameConfig, report: ExpertReport) -> float:
    return min(payoff(config, report, i) for i in range(len(config.family)))


def expected_payoff(config: GameConfig, report: ExpertReport) -> float:
    prior = config.prior.weights
    # instances the prior ignores contribute nothing, even at -inf
    return float(sum(prior[i] * payoff(config, report, i)
                     for i in range(len(config.family)) if prior[i] > 0))


@dataclass(frozen=True)
class ScanReport:
    honest_expected: float
    best_perturbed: float
    gap: float
    n: int
    radius: float
    formula_error: float

    @property
    def passed(self) -> bool:
        return self.gap <= 1e-9

    def to_json(self) -> dict:
        return {"honest_expected": self.honest_expected, "best_perturbed": self.best_perturbed,
                "gap": self.gap, "n": self.n, "radius": self.radius,
                "formula_error": self.formula_error}


def perturbed_reports(honest: DiscreteMeasure, n: int, radius: float,
                      rng: np.random.Generator) -> list[DiscreteMeasure]:
    """Random unit-mass reports within L1 distance ``radius`` of ``honest``.

    Each report moves from ``honest`` toward a uniform random point of the
    simplex by a uniform random L1 distance up to ``radius``.
    """
    q0 = honest.weights
    out = []
    for _ in range(n):
        w = rng.dirichlet(np.ones(q0.size))
        dist = np.abs(w - q0).sum()
        r = rng.uniform(0.0, radius)
        s = 0.0 if dist == 0 else min(1.0, r / dist)
        q = (1.0 - s) * q0 + s * w
        out.append(DiscreteMeasure(honest.alphabet, q / q.sum()))
    return out


def honesty_gap_scan(config: GameConfig, n_perturbations: int = 1000, radius: float = 0.1,
                     seed: int = 0, solution: MaxEntSolution | None = None) -> ScanReport:
    """Search near the honest report for one with higher expected payoff.

    ``gap`` is the best perturbed expected payoff minus the honest one; it is
    never positive when the prior mixes the instances into ``mu*``.
    ``formula_error`` is the largest deviation, over the perturbations, from
    ``expected(honest) - expected(Q) = k * D(mu* || ||mu*|| Q)``.

    Raises
    ------
    DomainError
        If the prior does not represent the maximum entropy measure.
    """
    if solution is None:
        solution = solve_maxent(config.family)
    mixed = config.family.mixture(config.prior)
    if np.max(np.abs(mixed.weights - solution.mu_star.weights)) > 1e-6 * max(1.0, total_mass(mixed)):
        raise DomainError("prior does not mix the instances into the maximum entropy measure")
    honest = ExpertReport.honest(solution)
    base = expected_payoff(config, honest)
    rng = np.random.default_rng(seed)
    best = -math.inf
    formula_error = 0.0
    n = 0
    m_star = total_mass(solution.mu_star)
    for q in perturbed_reports(honest.Q, n_perturbations, radius, rng):
        if total_mass(q) > 1 + KRAFT_SLACK:
            continue
        value = expected_payoff(config, ExpertReport(q))
        predicted = base - config.k * divergence(solution.mu_star, q.scaled(m_star))
        if math.isfinite(value):
            formula_error = max(formula_error, abs(value - predicted))
        best = max(best, value)
        n += 1
    gap = best - base if n else 0.0
    return ScanReport(base, best, gap, n, radius, formula_error)
