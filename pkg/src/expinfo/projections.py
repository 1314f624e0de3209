"""Information projections onto convex hulls of finite measures.

``i_projection`` minimizes ``D(mu || nu)`` over ``mu`` in the hull and
``reverse_i_projection`` minimizes ``D(mu || nu)`` over ``nu`` in the hull.
Both run the away-step Frank-Wolfe core on mixture weights. The certificate
functions check the optimality conditions directly: the Pythagorean
inequality for the forward projection, and the e-variable bound for the
reverse one, both at the level of measures and at the level of the Poisson
point processes having those measures as expectation measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from expinfo import _frankwolfe as fw
from expinfo._frankwolfe import ConvergenceError
from expinfo.maxent import DEFAULT_MAX_ITER
from expinfo.measures import (
    ConvexFamily,
    DiscreteMeasure,
    DomainError,
    MixtureWeights,
    _divergence_terms,
    check_same_alphabet,
    divergence,
    total_mass,
)
from expinfo.poisson import poisson_divergence_closed_form
from expinfo.reports import CertificateReport

# Solver gap used by default; certificates are checked at 1e-9 and the
# optimality slacks are bounded below by minus this gap.
DEFAULT_TOL = 1e-11

__all__ = [
    "ConvexFamily",
    "ProjectionResult",
    "i_projection",
    "reverse_i_projection",
    "verify_pythagorean",
    "evariable_certificate",
    "poisson_evalue_integral",
    "log_poisson_evalue_integral",
    "verify_ripr_poisson_lift",
    "verify_iproj_poisson_lift",
]


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    """Outcome of a projection.

    ``certificate`` holds, per vertex ``v_i``, the directional derivative of
    the objective at the minimizer toward ``v_i``. All entries are
    nonnegative at an exact minimizer and vanish on vertices with positive
    weight. ``minimizer`` and ``p`` are None when the optimum is infinite.
    """

    minimizer: DiscreteMeasure | None
    p: MixtureWeights | None
    optimum: float
    certificate: tuple[float, ...]
    iterations: int = 0
    gap: float = math.nan
    history: tuple[float, ...] = ()

    def to_json(self) -> dict:
        return {
            "minimizer": None if self.minimizer is None else self.minimizer.weights.tolist(),
            "p": None if self.p is None else self.p.weights.tolist(),
            "optimum_nats": self.optimum,
            "certificate": list(self.certificate),
            "gap": self.gap,
            "iterations": self.iterations,
        }


class _ForwardKL(fw.Objective):
    def __init__(self, nu):
        self.nu = nu

    def value(self, x):
        return float(np.sum(_divergence_terms(x, self.nu)))

    def grad(self, x):
        with np.errstate(divide="ignore"):
            return np.log(x / self.nu)

    def slope(self, x, d):
        used = d != 0
        with np.errstate(divide="ignore"):
            return float(np.dot(d[used], np.log(x[used] / self.nu[used])))


class _ReverseKL(fw.Objective):
    def __init__(self, mu):
        self.mu = mu

    def value(self, x):
        return float(np.sum(_divergence_terms(self.mu, x)))

    def grad(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 - np.where(self.mu > 0, self.mu / x, 0.0)

    def slope(self, x, d):
        used = d != 0
        mu = self.mu[used]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(mu > 0, mu / x[used], 0.0)
        return float(np.dot(d[used], 1.0 - ratio))


def _run(obj, family: ConvexFamily, V: np.ndarray, allowed: np.ndarray, tol, max_iter, objective):
    if tol <= 0:
        raise DomainError("tol must be positive")
    p0 = np.where(allowed, 1.0, 0.0)
    res = fw.minimize(obj, V, p0 / p0.sum(), tol, max_iter, active=allowed)
    p = MixtureWeights.normalized(res.p)
    x = family.mixture(p)
    g = obj.grad(res.x)
    here = fw._dot(g, res.x)
    slack = fw.vertex_products(g, V) - here
    slack[~allowed] = math.inf
    result = ProjectionResult(x, p, objective(x), tuple(slack), res.iterations, res.gap,
                              tuple(res.values))
    if not res.converged:
        raise ConvergenceError(
            f"projection did not reach gap {tol:g} in {max_iter} iterations "
            f"(gap {res.gap:.3e})", best=result)
    return result


def _infinite(family: ConvexFamily) -> ProjectionResult:
    return ProjectionResult(None, None, math.inf, (math.inf,) * len(family))


def i_projection(C: ConvexFamily, nu: DiscreteMeasure, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> ProjectionResult:
    """Minimize ``D(mu || nu)`` over ``mu`` in the hull of ``C``.

    Vertices charging a symbol outside the support of ``nu`` are excluded,
    since any mixture using them has infinite divergence. When every vertex
    is excluded the optimum is ``inf`` and no minimizer is returned.
    """
    check_same_alphabet(C, nu)
    cols = nu.weights > 0
    allowed = ~np.any(C.matrix[:, ~cols] > 0, axis=1)
    if not np.any(allowed):
        return _infinite(C)
    V = np.asarray(C.matrix[:, cols])
    return _run(_ForwardKL(nu.weights[cols]), C, V, allowed, tol, max_iter,
                lambda x: divergence(x, nu))


def reverse_i_projection(C: ConvexFamily, mu: DiscreteMeasure, tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER) -> ProjectionResult:
    """Minimize ``D(mu || nu)`` over ``nu`` in the hull of ``C``.

    For probability measures this is the reverse information projection,
    which generalizes maximum likelihood over a mixture family. The hull must
    cover the support of ``mu``; otherwise the optimum is ``inf``.
    """
    check_same_alphabet(C, mu)
    covered = np.any(C.matrix > 0, axis=0)
    if np.any(mu.support & ~covered):
        return _infinite(C)
    allowed = np.ones(len(C), bool)
    return _run(_ReverseKL(mu.weights), C, np.asarray(C.matrix), allowed, tol, max_iter,
                lambda x: divergence(mu, x))


def _dirichlet_mixtures(n_vertices: int, n_samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(n_vertices), size=n_samples)


def _pythagorean_slack(mu: DiscreteMeasure, nu, nu_star, optimum: float) -> float:
    lhs = divergence(mu, nu)
    if math.isinf(lhs):
        return math.inf
    return lhs - divergence(mu, nu_star) - optimum


def verify_pythagorean(C: ConvexFamily, nu: DiscreteMeasure, result: ProjectionResult,
                       n_samples: int = 1000, tol: float = 1e-7, seed: int = 0) -> CertificateReport:
    """Check ``D(mu||nu) >= D(mu||nu*) + D(C||nu)`` on sampled hull members.

    Hull members are drawn with symmetric Dirichlet(1) mixture weights from a
    generator seeded with ``seed``. ``per_vertex`` holds the slack at each
    vertex; ``worst_slack`` covers vertices and samples together.
    """
    if result.minimizer is None:
        return CertificateReport.from_slacks("pythagorean", [math.inf] * len(C), tol)
    nu_star = result.minimizer
    vertex = [_pythagorean_slack(v, nu, nu_star, result.optimum) for v in C.vertices]
    sampled = [_pythagorean_slack(C.mixture(p), nu, nu_star, result.optimum)
               for p in _dirichlet_mixtures(len(C), n_samples, seed)]
    worst = min(vertex + sampled)
    return CertificateReport("pythagorean", bool(worst >= -tol), worst, tuple(vertex), tol)


def _require_support(mu: DiscreteMeasure, nu_hat: DiscreteMeasure) -> None:
    check_same_alphabet(mu, nu_hat)
    if np.any(mu.support & ~nu_hat.support):
        raise DomainError("support of mu is not contained in the support of nu_hat")


def _ratio_sum(mu: DiscreteMeasure, nu_hat: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    s = mu.support
    return float(np.sum(mu.weights[s] * nu.weights[s] / nu_hat.weights[s]))


def evariable_certificate(C: ConvexFamily, mu: DiscreteMeasure, nu_hat: DiscreteMeasure,
                          tol: float = 1e-9) -> CertificateReport:
    """Check ``sum_a mu(a) nu(a) / nu_hat(a) <= ||nu|| + ||mu|| - ||nu_hat||`` per vertex.

    This is the first-order optimality condition of ``nu_hat`` as reverse
    projection of ``mu``. For probability measures it is the familiar bound
    ``E_nu[dmu / dnu_hat] <= 1``.
    """
    _require_support(mu, nu_hat)
    check_same_alphabet(C, mu)
    m_mu, m_hat = total_mass(mu), total_mass(nu_hat)
    slacks = [total_mass(v) + m_mu - m_hat - _ratio_sum(mu, nu_hat, v) for v in C.vertices]
    return CertificateReport.from_slacks("evariable", slacks, tol)


def log_poisson_evalue_integral(mu: DiscreteMeasure, nu_hat: DiscreteMeasure,
                                nu: DiscreteMeasure) -> float:
    _require_support(mu, nu_hat)
    check_same_alphabet(mu, nu)
    return _ratio_sum(mu, nu_hat, nu) - total_mass(nu) - total_mass(mu) + total_mass(nu_hat)


def poisson_evalue_integral(mu: DiscreteMeasure, nu_hat: DiscreteMeasure,
                            nu: DiscreteMeasure) -> float:
    """``E_{Po(nu)}[dPo(mu) / dPo(nu_hat)]`` in closed form.

    With independent Poisson counts per symbol the probability generating
    function ``E r^N = exp(lam (r - 1))`` gives
    ``exp(sum_a nu mu / nu_hat - ||nu|| - ||mu|| + ||nu_hat||)``.
    """
    return math.exp(log_poisson_evalue_integral(mu, nu_hat, nu))


def verify_ripr_poisson_lift(C: ConvexFamily, mu: DiscreteMeasure, nu_hat: DiscreteMeasure,
                             tol: float = 1e-9) -> CertificateReport:
    """Check that ``dPo(mu)/dPo(nu_hat)`` is an e-variable for every ``Po(nu)``.

    The integral is linear in the integrating measure, so the vertex bound
    extends to every mixture of the ``Po(nu)``.
    """
    slacks = [1.0 - poisson_evalue_integral(mu, nu_hat, v) for v in C.vertices]
    return CertificateReport.from_slacks("poisson_evalue", slacks, tol)


def verify_iproj_poisson_lift(C: ConvexFamily, nu: DiscreteMeasure, nu_star: DiscreteMeasure,
                              n_samples: int = 1000, tol: float = 1e-7,
                              seed: int = 0) -> CertificateReport:
    """Pythagorean check for the Poisson processes ``Po(mu)``, ``mu`` in the hull.

    The process-level inequality for Poisson processes reduces, through
    ``D(Po(mu) || Po(nu)) = D(mu || nu)``, to the measure-level one with
    ``D(C || nu) = D(nu* || nu)``.
    """
    optimum = poisson_divergence_closed_form(nu_star, nu)

    def slack(mu):
        lhs = poisson_divergence_closed_form(mu, nu)
        if math.isinf(lhs):
            return math.inf
        return lhs - poisson_divergence_closed_form(mu, nu_star) - optimum

    vertex = [slack(v) for v in C.vertices]
    sampled = [slack(C.mixture(p)) for p in _dirichlet_mixtures(len(C), n_samples, seed)]
    worst = min(vertex + sampled)
    return CertificateReport("poisson_pythagorean", bool(worst >= -tol), worst, tuple(vertex), tol)
