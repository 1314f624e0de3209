"""
Poisson interpretation of divergence
====================================

For finite measures the divergence equals the divergence between the Poisson
point processes having them as expectation measures.
"""

import numpy as np

from expinfo import DiscreteMeasure, divergence
from expinfo.poisson import (
    PoissonProcessSpec,
    chi_square_gof,
    empirical_expectation_check,
    poisson_divergence_truncated,
    sample_process,
)

mu = DiscreteMeasure(["a", "b", "c"], [2.0, 0.5, 4.0])
nu = DiscreteMeasure(["a", "b", "c"], [1.0, 1.5, 3.0])
print("closed form", divergence(mu, nu))
for N in (5, 10, 20, 60):
    print(f"N = {N:3d}   truncated series {poisson_divergence_truncated(mu, nu, N):.15f}")

###############################################################################
# Sampling the process. Each row is one instance, a table of counts.

spec = PoissonProcessSpec(mu)
samples = sample_process(spec, seed=1, n=100_000)
print(samples[:5])
print("mean counts", samples.mean(axis=0))
print(empirical_expectation_check(spec, samples).summary())
for j, lam in enumerate(spec.means):
    print(spec.alphabet[j], "chi-square p-value", round(chi_square_gof(samples[:, j], lam), 4))

###############################################################################
# Counts of disjoint symbols are independent.

print(np.corrcoef(samples.T).round(4))
