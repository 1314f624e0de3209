"""Away-step Frank-Wolfe over mixture weights of a finite vertex set.

The feasible set is the convex hull of the rows of ``V``. The iterate is kept
as a mixture ``p`` with ``x = p @ V``. Each objective supplies its gradient in
``x``-space (entries may be ``-inf`` on the boundary of the domain) and the
derivative of its restriction to a segment, which the exact line search
bisects.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

LINE_SEARCH_STEPS = 60


class ConvergenceError(RuntimeError):
    """Solver stopped at ``max_iter`` before reaching the tolerance.

    ``best`` holds the final iterate in the caller's result type.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class Objective:
    """Convex function of ``x`` minimized over the hull."""

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def grad(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def slope(self, x: np.ndarray, d: np.ndarray) -> float:
        """Directional derivative at ``x`` along ``d``."""
        raise NotImplementedError


def vertex_products(g: np.ndarray, V: np.ndarray) -> np.ndarray:
    """``<g, v>`` for each row ``v`` of ``V`` with ``inf * 0 = 0``."""
    out = np.empty(V.shape[0])
    for i, v in enumerate(V):
        used = v != 0
        out[i] = np.dot(g[used], v[used])
    return out


def _dot(g: np.ndarray, x: np.ndarray) -> float:
    used = x != 0
    return float(np.dot(g[used], x[used]))


def line_search(obj: Objective, x: np.ndarray, d: np.ndarray, gamma_max: float) -> float:
    """Minimize ``obj(x + gamma d)`` over ``[0, gamma_max]`` by bisection on the slope."""
    end = np.clip(x + gamma_max * d, 0.0, None)
    if obj.slope(end, d) <= 0:
        return gamma_max
    lo, hi = 0.0, gamma_max
    for _ in range(LINE_SEARCH_STEPS):
        mid = 0.5 * (lo + hi)
        if obj.slope(np.clip(x + mid * d, 0.0, None), d) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass
class FWResult:
    p: np.ndarray
    x: np.ndarray
    iterations: int
    gap: float
    away_gap: float
    converged: bool
    values: list[float] = field(default_factory=list)
    gaps: list[float] = field(default_factory=list)


def minimize(obj: Objective, V: np.ndarray, p0: np.ndarray, tol: float,
             max_iter: int, active: np.ndarray | None = None) -> FWResult:
    """Run away-step Frank-Wolfe from mixture ``p0``.

    Parameters
    ----------
    obj : Objective
    V : ndarray, shape (n_vertices, n_symbols)
    p0 : ndarray
        Starting mixture; must give a point of finite objective value.
    tol : float
        Stop once both the Frank-Wolfe gap ``<g, x> - min_i <g, v_i>`` and
        the away gap ``max_{p_i > 0} <g, v_i> - <g, x>`` are at most ``tol``.
    max_iter : int
    active : bool ndarray, optional
        Vertices allowed to enter the mixture; the rest stay at weight 0.

    Returns
    -------
    FWResult
        ``converged`` is False when ``max_iter`` was exhausted.

    Ties in the linear oracle go to the lowest vertex index.
    """
    n = V.shape[0]
    allowed = np.ones(n, bool) if active is None else np.asarray(active, bool)
    p = np.where(allowed, np.asarray(p0, dtype=float), 0.0)
    p /= p.sum()
    x = p @ V
    values, gaps = [], []
    gap = away_gap = math.inf
    for it in range(max_iter + 1):
        g = obj.grad(x)
        gv = vertex_products(g, V)
        gv[~allowed] = math.inf
        here = _dot(g, x)
        fw_i = int(np.argmin(gv))
        gap = here - gv[fw_i]
        support = np.flatnonzero(p > 0)
        aw_i = int(support[np.argmax(gv[support])])
        away_gap = gv[aw_i] - here
        values.append(obj.value(x))
        gaps.append(gap)
        log.debug("iter %d value %.17g gap %.3e away %.3e", it, values[-1], gap, away_gap)
        if max(gap, away_gap) <= tol:
            return FWResult(p, x, it, max(gap, 0.0), max(away_gap, 0.0), True, values, gaps)
        if it == max_iter:
            break
        if gap >= away_gap or p[aw_i] >= 1.0:
            d = V[fw_i] - x
            gamma = line_search(obj, x, d, 1.0)
            p *= 1.0 - gamma
            p[fw_i] += gamma
        else:
            w = p[aw_i]
            gamma_max = w / (1.0 - w)
            d = x - V[aw_i]
            gamma = line_search(obj, x, d, gamma_max)
            p *= 1.0 + gamma
            p[aw_i] -= gamma
            if gamma == gamma_max:
                p[aw_i] = 0.0
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        x = p @ V
    return FWResult(p, x, max_iter, gap, away_gap, False, values, gaps)
