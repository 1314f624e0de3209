"""
Paying an expert with the logarithmic score
===========================================

An expert reveals a coding measure ``Q`` and is paid ``f - k L`` where ``L``
is the total code length of the text that gets coded. Revealing the
normalized maximum entropy measure is optimal.
"""

import numpy as np

from expinfo import InstanceFamily, divergence, solve_maxent, total_mass
from expinfo.scoring import (
    ExpertReport,
    GameConfig,
    expected_payoff,
    honesty_gap_scan,
    perturbed_reports,
    worst_case_payoff,
)

family = InstanceFamily.from_arrays(["a", "b", "c"], [[6, 2, 1], [1, 5, 3], [2, 2, 2]])
sol = solve_maxent(family)
config = GameConfig(family, f=10.0, k=0.5, prior=sol.p)
honest = ExpertReport.honest(sol)
print("f - k c =", config.f - config.k * sol.c)
print("worst case, honest:", worst_case_payoff(config, honest))
print("expected, honest:  ", expected_payoff(config, honest))

###############################################################################
# Each deviation costs exactly ``k D(mu* || ||mu*|| Q)`` in expectation.

rng = np.random.default_rng(3)
m = total_mass(sol.mu_star)
for q in perturbed_reports(honest.Q, 5, 0.2, rng):
    loss = expected_payoff(config, honest) - expected_payoff(config, ExpertReport(q))
    print(f"loss {loss:.10f}   k D {config.k * divergence(sol.mu_star, q.scaled(m)):.10f}")

###############################################################################
# A wider random search finds nothing better.

print(honesty_gap_scan(config, n_perturbations=1000, radius=0.1, seed=0, solution=sol).to_json())
