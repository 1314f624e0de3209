"""Poisson point processes on a finite alphabet.

``Po(mu)`` draws an independent Poisson count with mean ``mu(a)`` for every
symbol ``a``; its expectation measure is ``mu``. For finite measures
``D(Po(mu) || Po(nu)) = D(mu || nu)``, which is what lets statements about
unnormalized measures be read as statements about point processes. This
module samples such processes and checks the identity against truncated
series computed in log space.

Sampling uses numpy's PCG64 bit generator (128-bit state) seeded with the
caller's seed. Symbols are sampled column by column in alphabet order.
Means up to 10 use inversion by sequential search; larger means use numpy's
transformed-rejection Poisson sampler.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import stats

from expinfo.measures import (
    Alphabet,
    DiscreteMeasure,
    DomainError,
    check_same_alphabet,
    divergence,
)
from expinfo.reports import CertificateReport

INVERSION_MAX_MEAN = 10.0


@dataclass(frozen=True)
class PoissonProcessSpec:
    """The Poisson point process with the given expectation measure."""

    expectation: DiscreteMeasure

    @property
    def alphabet(self) -> Alphabet:
        return self.expectation.alphabet

    @property
    def means(self) -> np.ndarray:
        return self.expectation.weights


def _inversion(rng: np.random.Generator, lam: float, n: int) -> np.ndarray:
    u = rng.random(n)
    k = np.zeros(n, dtype=np.int64)
    pk = math.exp(-lam)
    cdf = pk
    todo = u > cdf
    j = 0
    while np.any(todo) and pk > 0:
        k[todo] += 1
        j += 1
        pk *= lam / j
        cdf += pk
        todo &= u > cdf
    return k


def sample_process(spec: PoissonProcessSpec, seed: int, n: int) -> np.ndarray:
    """Draw ``n`` independent instances of the process.

    Returns
    -------
    ndarray of int64, shape (n, len(alphabet))
        One count vector per row, deterministic given ``seed``.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.zeros((n, len(spec.alphabet)), dtype=np.int64)
    for j, lam in enumerate(spec.means):
        if lam == 0:
            continue
        if lam <= INVERSION_MAX_MEAN:
            out[:, j] = _inversion(rng, float(lam), n)
        else:
            out[:, j] = rng.poisson(lam, n)
    return out


def log_factorials(n: int) -> np.ndarray:
    """Table of ``ln k!`` for ``k = 0..n``."""
    table = np.zeros(n + 1)
    if n > 0:
        table[1:] = np.cumsum(np.log(np.arange(1, n + 1)))
    return table


def poisson_log_pmf(k: np.ndarray, lam: float, log_fact: np.ndarray | None = None) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64)
    if log_fact is None:
        log_fact = log_factorials(int(k.max(initial=0)))
    if lam == 0:
        return np.where(k == 0, 0.0, -math.inf)
    return k * math.log(lam) - lam - log_fact[k]


def poisson_divergence_closed_form(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """``D(Po(mu) || Po(nu))``, which equals ``divergence(mu, nu)`` exactly."""
    return divergence(mu, nu)


def poisson_marginal_divergence_truncated(lam1: float, lam2: float, N: int) -> float:
    """``sum_{k=0}^{N} p_k ln(p_k / q_k)`` for Poisson(lam1) against Poisson(lam2)."""
    if lam1 <= 0 or lam2 <= 0:
        raise DomainError("Poisson rates must be positive")
    if N < 1:
        raise DomainError("truncation N must be at least 1")
    k = np.arange(N + 1)
    table = log_factorials(N)
    logp = poisson_log_pmf(k, lam1, table)
    logq = poisson_log_pmf(k, lam2, table)
    return float(np.sum(np.exp(logp) * (logp - logq)))


def default_truncation(*measures: DiscreteMeasure) -> int:
    top = max(float(np.max(m.weights)) for m in measures)
    return max(40, math.ceil(10 * top))


def poisson_divergence_truncated(mu: DiscreteMeasure, nu: DiscreteMeasure,
                                 N: int | None = None) -> float:
    """Sum of truncated per-symbol Poisson divergences.

    Symbols are independent under both processes, so the process divergence
    is the sum of the marginal ones. Zero means are handled exactly: a
    Poisson(0) count is identically 0.
    """
    check_same_alphabet(mu, nu)
    if N is None:
        N = 60 + 10 * math.ceil(max(np.max(mu.weights), np.max(nu.weights)))
    total = 0.0
    for a, b in zip(mu.weights, nu.weights):
        if a == 0:
            total += b
        elif b == 0:
            return math.inf
        else:
            total += poisson_marginal_divergence_truncated(a, b, N)
    return total


def poisson_evalue_truncated(mu: DiscreteMeasure, nu_hat: DiscreteMeasure,
                             nu: DiscreteMeasure, N: int | None = None) -> float:
    """``E_{Po(nu)}[dPo(mu) / dPo(nu_hat)]`` by explicit summation over count vectors.

    Enumerates every ``k`` in ``{0..N}^A``, so only practical on alphabets of
    at most three symbols.
    """
    check_same_alphabet(mu, nu_hat, nu)
    if len(mu.alphabet) > 3:
        raise DomainError("explicit enumeration supports at most 3 symbols")
    if np.any(mu.support & ~nu_hat.support):
        raise DomainError("support of mu is not contained in the support of nu_hat")
    if N is None:
        N = default_truncation(mu, nu_hat, nu)
    table = log_factorials(N)
    ks = np.arange(N + 1)
    log_p = [poisson_log_pmf(ks, a, table) for a in mu.weights]
    log_h = [poisson_log_pmf(ks, a, table) for a in nu_hat.weights]
    log_q = [poisson_log_pmf(ks, a, table) for a in nu.weights]
    total = 0.0
    for k in itertools.product(range(N + 1), repeat=len(mu.alphabet)):
        lq = sum(log_q[j][kj] for j, kj in enumerate(k))
        if lq == -math.inf:
            continue
        lp = sum(log_p[j][kj] for j, kj in enumerate(k))
        if lp == -math.inf:
            continue
        lh = sum(log_h[j][kj] for j, kj in enumerate(k))
        total += math.exp(lq + lp - lh)
    return total


def empirical_expectation_check(spec: PoissonProcessSpec, samples: np.ndarray,
                                sigmas: float = 4.0) -> CertificateReport:
    """Per symbol, check ``|mean count - mu(a)| <= sigmas * sqrt(mu(a) / n)``.

    A symbol with mean zero passes only if every sampled count is zero.
    """
    samples = np.asarray(samples)
    if samples.ndim != 2 or samples.shape[0] == 0:
        raise DomainError("samples must be a nonempty 2-D array")
    if samples.shape[1] != len(spec.alphabet):
        raise DomainError("samples do not match the alphabet")
    n = samples.shape[0]
    means = samples.mean(axis=0)
    slack = sigmas * np.sqrt(spec.means / n) - np.abs(means - spec.means)
    return CertificateReport.from_slacks("expectation", slack, 0.0)


def chi_square_gof(counts: Sequence[int], lam: float, min_expected: float = 5.0) -> float:
    """p-value of a chi-square goodness-of-fit test of counts against Poisson(lam).

    Cells ``k = 0, 1, ...`` plus an upper tail cell are merged left to right
    until each expects at least ``min_expected`` observations.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    if lam <= 0:
        raise DomainError("rate must be positive")
    top = int(max(counts.max(), math.ceil(lam + 10 * math.sqrt(lam) + 10)))
    observed = np.bincount(counts, minlength=top + 1)[: top + 1].astype(float)
    observed[top] += np.sum(counts > top)
    pmf = stats.poisson.pmf(np.arange(top), lam)
    expected = n * np.append(pmf, max(0.0, 1.0 - pmf.sum()))
    obs_cells, exp_cells = [], []
    o = e = 0.0
    for oi, ei in zip(observed, expected):
        o += oi
        e += ei
        if e >= min_expected:
            obs_cells.append(o)
            exp_cells.append(e)
            o = e = 0.0
    if not obs_cells:
        return 1.0
    if e > 0 or o > 0:
        obs_cells[-1] += o
        exp_cells[-1] += e
    if len(obs_cells) < 2:
        return 1.0
    exp_cells = np.array(exp_cells)
    exp_cells *= n / exp_cells.sum()
    return float(stats.chisquare(obs_cells, exp_cells).pvalue)


def write_samples_csv(samples: np.ndarray, alphabet: Alphabet, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(alphabet))
        writer.writerows(np.asarray(samples, dtype=np.int64).tolist())


def read_samples_csv(path: str | Path) -> tuple[Alphabet, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DomainError(f"{path}: empty sample file")
    alphabet = Alphabet(tuple(rows[0]))
    data = np.array([[int(c) for c in r] for r in rows[1:]], dtype=np.int64).reshape(-1, len(alphabet))
    return alphabet, data
