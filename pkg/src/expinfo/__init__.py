"""Information theory for finite, non-normalized discrete measures."""

__version__ = "0.1.0"

from expinfo._frankwolfe import ConvergenceError
from expinfo.measures import (
    Alphabet,
    CodeLengthFunction,
    ConvexFamily,
    DiscreteMeasure,
    DomainError,
    EmpiricalMeasure,
    MixtureWeights,
    chain_rule_decompose,
    code_length_from_measure,
    divergence,
    entropy,
    kraft_sum,
    normalize,
    scalar_divergence,
    total_code_length,
    total_mass,
)
from expinfo.maxent import (
    InstanceFamily,
    MaxEntSolution,
    brute_force_maxent,
    maxent_on_subset,
    minimax_equals_mean_check,
    solve_maxent,
    verify_equilibrium,
)
from expinfo.reports import CertificateReport

__all__ = [
    "Alphabet",
    "CertificateReport",
    "CodeLengthFunction",
    "ConvergenceError",
    "ConvexFamily",
    "DiscreteMeasure",
    "DomainError",
    "EmpiricalMeasure",
    "InstanceFamily",
    "MaxEntSolution",
    "MixtureWeights",
    "brute_force_maxent",
    "chain_rule_decompose",
    "code_length_from_measure",
    "divergence",
    "entropy",
    "kraft_sum",
    "maxent_on_subset",
    "minimax_equals_mean_check",
    "normalize",
    "scalar_divergence",
    "solve_maxent",
    "total_code_length",
    "total_mass",
    "verify_equilibrium",
]
