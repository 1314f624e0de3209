"""
Minimax coding of a small corpus
================================

Three texts of eleven characters are turned into tables of letter counts.
We look for one code that keeps the worst total code length over the three
texts as small as possible.
"""

import numpy as np

from expinfo import solve_maxent, total_code_length, verify_equilibrium
from expinfo.corpus import tokenize
from expinfo.maxent import InstanceFamily
from expinfo.measures import Alphabet, EmpiricalMeasure

texts = [b"abracadabra", b"banana band", b"cabbage car"]
tables = [tokenize(t) for t in texts]
symbols = sorted(set().union(*tables))
alphabet = Alphabet(tuple(symbols))
family = InstanceFamily([EmpiricalMeasure(alphabet, [t.count(s) for s in symbols])
                         for t in tables], names=["abra", "banana", "cabbage"])
print(family.matrix)

###############################################################################
# The optimal code is the code of the maximum entropy member of the convex
# hull of the three tables. Every text used by the optimal mixture is coded
# in exactly ``c`` nats; the others cost no more.

sol = solve_maxent(family)
print("c =", sol.c, "nats")
print("mixture:", np.round(sol.p.weights, 4))
for name, mu in zip(family.names, family.instances):
    print(f"{name:8s} {total_code_length(sol.ell_star, mu):.6f}")

###############################################################################
# The saddle point conditions can be checked independently of the solver.

print(verify_equilibrium(sol, family, tol=1e-7).summary())

###############################################################################
# Any other unit-mass code is worse on at least one text.

rng = np.random.default_rng(0)
worst = []
for q in rng.dirichlet(np.ones(len(alphabet)), size=2000):
    ell = -np.log(q)
    worst.append(max(float(ell @ mu.weights) for mu in family.instances))
print("best random code, worst case:", min(worst), ">=", sol.c)
