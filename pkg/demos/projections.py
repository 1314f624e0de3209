"""
Information projections and e-values
====================================

The forward projection of ``nu`` onto a hull satisfies a Pythagorean
inequality; the reverse projection of ``mu`` yields a likelihood ratio whose
expectation is at most one under every member of the hull.
"""

import numpy as np

from expinfo import ConvexFamily, DiscreteMeasure, divergence
from expinfo.projections import (
    evariable_certificate,
    i_projection,
    poisson_evalue_integral,
    reverse_i_projection,
    verify_pythagorean,
)

C = ConvexFamily.from_arrays(["a", "b", "c"], [[3.0, 1.0, 0.5], [0.5, 2.0, 2.0], [1.0, 0.2, 3.0]])
nu = DiscreteMeasure(["a", "b", "c"], [2.0, 2.0, 2.0])

res = i_projection(C, nu)
print("nu* =", np.round(res.minimizer.weights, 6), " D(C||nu) =", res.optimum)
print(verify_pythagorean(C, nu, res, n_samples=1000).summary())

###############################################################################
# Reverse projection. Vertices with positive weight sit exactly on the bound,
# the others strictly below it.

mu = DiscreteMeasure(["a", "b", "c"], [0.4, 2.5, 0.1])
rev = reverse_i_projection(C, mu)
print("nu_hat =", np.round(rev.minimizer.weights, 6), " weights", np.round(rev.p.weights, 4))
print(evariable_certificate(C, mu, rev.minimizer).summary())

###############################################################################
# Lifted to Poisson processes, ``dPo(mu)/dPo(nu_hat)`` integrates to at most
# one against ``Po(nu)`` for every vertex.

for v in C.vertices:
    print(poisson_evalue_integral(mu, rev.minimizer, v))

###############################################################################
# Replacing ``nu_hat`` by another hull member breaks the bound somewhere.

other = C.mixture([1 / 3, 1 / 3, 1 / 3])
print("D(mu||other) - D(mu||nu_hat) =", divergence(mu, other) - rev.optimum)
print(evariable_certificate(C, mu, other).summary())
