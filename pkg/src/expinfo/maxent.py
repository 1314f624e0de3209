"""Minimax coding over the convex hull of finitely many empirical measures.

Coding any text from a finite collection with one code, the worst-case total
code length is minimized by the code of the maximum entropy measure ``mu*`` in
the convex hull of the texts' frequency tables. At the optimum every text in
the support of the optimal mixture has the same total code length ``c``
(the code is *cost stable* there) and no text exceeds it.

The solver works on mixture weights ``p``. The gradient of ``H(sum p mu)`` in
direction ``mu_w`` is the total code length of text ``w`` under the current
code, so the Frank-Wolfe oracle simply picks the text that is currently most
expensive to code.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from expinfo import _frankwolfe as fw
from expinfo._frankwolfe import ConvergenceError
from expinfo._jsonio import as_float, as_floats, read_json, write_json
from expinfo.measures import (
    CodeLengthFunction,
    ConvexFamily,
    DiscreteMeasure,
    DomainError,
    EmpiricalMeasure,
    MixtureWeights,
    code_length_from_measure,
    divergence,
    entropy,
    kraft_sum,
    total_code_length,
    total_mass,
)
from expinfo.reports import CertificateReport

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10_000
SUPPORT_THRESHOLD = 1e-8


class InstanceFamily(ConvexFamily):
    """Finite collection of texts, each given by its table of symbol counts."""

    measure_type = EmpiricalMeasure

    def __init__(self, instances: Sequence[DiscreteMeasure], names: Sequence[str] | None = None):
        super().__init__(instances, names)
        if not np.any(self.matrix.sum(axis=1) > 0):
            raise DomainError("at least one instance must have positive mass")

    @property
    def instances(self) -> tuple[EmpiricalMeasure, ...]:
        return self.vertices


def read_family(path: str | Path, empirical: bool = True) -> ConvexFamily:
    cls = InstanceFamily if empirical else ConvexFamily
    return cls.from_json(read_json(path))


def write_family(family: ConvexFamily, path: str | Path) -> None:
    write_json(family.to_json(), path)


class _NegEntropy(fw.Objective):
    # -H(x) = sum x ln(x / ||x||)

    def value(self, x):
        m = x.sum()
        used = x > 0
        return float(np.sum(x[used] * np.log(x[used] / m))) if m > 0 else 0.0

    def grad(self, x):
        with np.errstate(divide="ignore"):
            return np.log(x / x.sum())

    def slope(self, x, d):
        used = d != 0
        with np.errstate(divide="ignore"):
            return float(np.dot(d[used], np.log(x[used] / x.sum())))


@dataclass(frozen=True, eq=False)
class MaxEntSolution:
    """Maximum entropy measure of a hull together with its minimax code.

    Attributes
    ----------
    mu_star : DiscreteMeasure
        The maximum entropy measure, equal to ``sum_w p_w mu_w``.
    ell_star : CodeLengthFunction
        Its code, ``ln(||mu*|| / mu*(a))``.
    c : float
        Equilibrium value ``H(mu*)`` in nats.
    p : MixtureWeights
        One mixture representing ``mu*``; not unique in general.
    support : tuple of int
        Indices with ``p_w > 1e-8``.
    iterations, gap, away_gap
        Solver diagnostics. ``gap`` is ``max_w L_w - c`` where ``L_w`` is
        the total code length of instance ``w`` under ``ell_star``.
    """

    mu_star: DiscreteMeasure
    ell_star: CodeLengthFunction
    c: float
    p: MixtureWeights
    support: tuple[int, ...]
    iterations: int = 0
    gap: float = math.nan
    away_gap: float = math.nan
    history: tuple[float, ...] = ()
    gap_history: tuple[float, ...] = ()
    divergence_to_parent: float | None = None

    @classmethod
    def from_mixture(cls, family: ConvexFamily, p, **diagnostics) -> "MaxEntSolution":
        """Package the hull member ``sum p_w mu_w`` as a candidate solution."""
        p = p if isinstance(p, MixtureWeights) else MixtureWeights.normalized(p)
        mu = family.mixture(p)
        ell = code_length_from_measure(mu)
        c = entropy(mu)
        gap = max(total_code_length(ell, v) for v in family.vertices) - c
        support = tuple(int(i) for i in np.flatnonzero(p.weights > SUPPORT_THRESHOLD))
        diagnostics.setdefault("gap", gap)
        return cls(mu, ell, c, p, support, **diagnostics)

    def instance_code_lengths(self, family: ConvexFamily) -> np.ndarray:
        return np.array([total_code_length(self.ell_star, v) for v in family.vertices])

    def to_json(self) -> dict:
        return {
            "mu_star": self.mu_star.weights.tolist(),
            "ell_star_nats": self.ell_star.lengths.tolist(),
            "c_nats": self.c,
            "p": self.p.weights.tolist(),
            "support": list(self.support),
            "gap": self.gap,
            "iterations": self.iterations,
        }

    @classmethod
    def from_json(cls, obj: dict, family: ConvexFamily) -> "MaxEntSolution":
        """Rebuild a solution from its JSON form; the alphabet comes from ``family``."""
        try:
            mu = DiscreteMeasure(family.alphabet, as_floats(obj["mu_star"]))
            ell = CodeLengthFunction(family.alphabet, as_floats(obj["ell_star_nats"]))
            p = MixtureWeights(as_floats(obj["p"]))
            return cls(mu, ell, as_float(obj["c_nats"]), p,
                       tuple(int(i) for i in obj.get("support", [])),
                       int(obj.get("iterations", 0)), as_float(obj.get("gap", "NaN")))
        except (KeyError, ValueError, TypeError) as exc:
            raise DomainError(f"malformed solution: {exc}") from exc


def read_solution(path: str | Path, family: ConvexFamily) -> MaxEntSolution:
    return MaxEntSolution.from_json(read_json(path), family)


def write_solution(solution: MaxEntSolution, path: str | Path) -> None:
    write_json(solution.to_json(), path)


def _initial_mixture(family: ConvexFamily, init) -> np.ndarray:
    n = len(family)
    masses = family.matrix.sum(axis=1)
    if isinstance(init, str):
        if init == "uniform":
            return np.full(n, 1.0 / n)
        if init == "vertex":
            # instance 0, or the first instance with positive mass
            i = int(np.flatnonzero(masses > 0)[0])
            return MixtureWeights.point_mass(n, i).weights.copy()
        raise ValueError(f"unknown init {init!r}")
    p0 = MixtureWeights.normalized(init).weights.copy()
    if p0.shape != (n,) or p0 @ masses <= 0:
        raise DomainError("initial mixture must give a measure of positive mass")
    return p0


def solve_maxent(family: ConvexFamily, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, init="uniform") -> MaxEntSolution:
    """Maximum entropy measure of the hull of ``family`` and its minimax code.

    Parameters
    ----------
    family : InstanceFamily or ConvexFamily
    tol : float
        Target duality gap in nats.
    max_iter : int
    init : {"uniform", "vertex"} or array_like
        Starting mixture: uniform weights, a point mass on instance 0, or an
        explicit weight vector.

    Raises
    ------
    DomainError
        If every instance is the zero measure or ``tol`` is not positive.
    ConvergenceError
        If the gap is still above ``tol`` after ``max_iter`` iterations. The
        last iterate is attached as ``exc.best``.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    if not np.any(family.matrix.sum(axis=1) > 0):
        raise DomainError("all instances are the zero measure")
    p0 = _initial_mixture(family, init)
    res = fw.minimize(_NegEntropy(), np.asarray(family.matrix), p0, tol, max_iter)
    sol = MaxEntSolution.from_mixture(
        family, MixtureWeights.normalized(res.p),
        iterations=res.iterations, away_gap=res.away_gap,
        history=tuple(-v for v in res.values), gap_history=tuple(res.gaps))
    if not res.converged:
        raise ConvergenceError(
            f"maxent solver did not reach gap {tol:g} in {max_iter} iterations "
            f"(gap {res.gap:.3e})", best=sol)
    return sol


def simplex_grid(n: int, resolution: int) -> Iterator[np.ndarray]:
    """Yield chunks of all mixtures with weights in ``{0, 1/R, ..., 1}``."""
    R = int(resolution)
    if n == 1:
        yield np.ones((1, 1))
        return
    if n == 2:
        k = np.arange(R + 1)
        yield np.column_stack([k, R - k]) / R
        return
    for head in itertools.product(range(R + 1), repeat=n - 2):
        used = sum(head)
        if used > R:
            continue
        k = np.arange(R - used + 1)
        rows = np.empty((k.size, n))
        rows[:, : n - 2] = head
        rows[:, n - 2] = k
        rows[:, n - 1] = R - used - k
        yield rows / R


def brute_force_maxent(family: ConvexFamily, grid_resolution: int = 1000) -> MaxEntSolution:
    """Entropy maximizer over a regular grid of mixtures.

    Exhaustive and slow; meant as an independent check of
    :func:`solve_maxent` on families of at most four instances.
    """
    n = len(family)
    if n > 4:
        raise DomainError("brute force supports at most 4 instances")
    if grid_resolution < 1:
        raise DomainError("grid_resolution must be positive")
    V = np.asarray(family.matrix)
    best_h, best_p, count = -math.inf, None, 0
    for P in simplex_grid(n, grid_resolution):
        X = P @ V
        m = X.sum(axis=1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(X > 0, X * np.log(X / m), 0.0)
        H = -terms.sum(axis=1)
        i = int(np.argmax(H))
        count += len(P)
        if H[i] > best_h:
            best_h, best_p = H[i], P[i]
    return MaxEntSolution.from_mixture(family, MixtureWeights.normalized(best_p), iterations=count)


def verify_equilibrium(solution: MaxEntSolution, family: ConvexFamily,
                       tol: float = DEFAULT_TOL) -> CertificateReport:
    """Check the saddle-point conditions of a claimed minimax solution.

    Three parts are reported:

    ``code_length_bound``
        every instance codes within ``c + tol``; slack ``c - L_w``.
    ``kraft``
        ``kraft_sum(ell*) = 1`` within ``tol``; a sum below one means the code
        wastes length.
    ``cost_stability``
        instances with ``p_w > tol`` code to exactly ``c``; slack ``-|L_w - c|``.
    """
    L = solution.instance_code_lengths(family)
    c = solution.c
    with np.errstate(invalid="ignore"):
        bound = CertificateReport.from_slacks("code_length_bound", c - L, tol)
    kraft = CertificateReport.from_slacks(
        "kraft", [-abs(kraft_sum(solution.ell_star) - 1.0)], tol)
    on_support = np.flatnonzero(solution.p.weights > tol)
    stable = CertificateReport.from_slacks(
        "cost_stability", [-abs(L[i] - c) for i in on_support], tol)
    return CertificateReport.combine("equilibrium", [bound, kraft, stable])


def minimax_equals_mean_check(family: ConvexFamily, p: MixtureWeights,
                              solution: MaxEntSolution, tol: float = DEFAULT_TOL) -> bool:
    """Whether the prior ``p`` mixes the instances into ``mu*``.

    Exactly then is the code minimizing the ``p``-expected code length also the
    one minimizing the worst-case code length.
    """
    mixed = family.mixture(p)
    return bool(np.max(np.abs(mixed.weights - solution.mu_star.weights)) <= tol)


class _ScaledDivergence(fw.Objective):
    # D(x || mu* ||x|| / ||mu*||) = sum x ln(x / ||x||) + <ell*, x>

    def __init__(self, ell: np.ndarray):
        self.ell = ell

    def value(self, x):
        m = x.sum()
        used = x > 0
        return float(np.sum(x[used] * np.log(x[used] / m)) + np.dot(self.ell, x)) if m > 0 else 0.0

    def grad(self, x):
        with np.errstate(divide="ignore"):
            return np.log(x / x.sum()) + self.ell

    def slope(self, x, d):
        used = d != 0
        with np.errstate(divide="ignore"):
            return float(np.dot(d[used], np.log(x[used] / x.sum()) + self.ell[used]))


def maxent_on_subset(sub_family: ConvexFamily, mu_star: DiscreteMeasure,
                     tol: float = 1e-7, max_iter: int = DEFAULT_MAX_ITER) -> MaxEntSolution:
    """Maximum entropy measure on a convex subset ``K`` of the hull.

    ``K`` is the hull of ``sub_family``. The maximizer is found as the member
    ``nu`` of ``K`` closest to ``mu*`` in the sense of
    ``D(nu || mu* ||nu|| / ||mu*||)``, which requires the code of ``mu*`` to
    be cost stable on ``K``. The identity
    ``H(nu) = H(mu*) - D(nu || mu* ||nu|| / ||mu*||)`` and the optimality of
    the result over ``K`` are both verified to ``tol``.

    Raises
    ------
    DomainError
        If ``K`` charges symbols outside the support of ``mu*``, or the
        divergence minimizer is not the entropy maximizer of ``K`` (the code
        of ``mu*`` is not cost stable on ``K``).
    ConvergenceError
        If the inner solver does not converge.
    """
    check = sub_family.alphabet == mu_star.alphabet
    if not check:
        raise DomainError("alphabet mismatch")
    m_star = total_mass(mu_star)
    if m_star <= 0:
        raise DomainError("mu_star has zero mass")
    cols = mu_star.weights > 0
    if np.any(sub_family.matrix[:, ~cols] > 0):
        raise DomainError("subset charges symbols outside the support of mu_star")
    if not np.any(sub_family.matrix.sum(axis=1) > 0):
        raise DomainError("all members of the subset are the zero measure")
    ell = code_length_from_measure(mu_star).lengths[cols]
    V = np.asarray(sub_family.matrix[:, cols])
    p0 = _initial_mixture(sub_family, "uniform")
    res = fw.minimize(_ScaledDivergence(ell), V, p0, min(tol, DEFAULT_TOL), max_iter)
    p = MixtureWeights.normalized(res.p)
    nu = sub_family.mixture(p)
    d_min = divergence(nu, mu_star.scaled(total_mass(nu) / m_star))
    sol = MaxEntSolution.from_mixture(sub_family, p, iterations=res.iterations,
                                      away_gap=res.away_gap, divergence_to_parent=d_min)
    if not res.converged:
        raise ConvergenceError("subset solver did not converge", best=sol)
    identity_error = abs(entropy(nu) - (entropy(mu_star) - d_min))
    if identity_error > tol or sol.gap > tol:
        raise DomainError(
            "code of mu_star is not cost stable on the subset: "
            f"identity error {identity_error:.3e}, entropy gap {sol.gap:.3e}")
    return sol
