"""Finite discrete measures, entropy and the extended information divergence.

Measures are dense nonnegative weight vectors over an explicit, ordered
alphabet. They need not be normalized: a frequency table of a text is a
measure whose total mass is the text length. All logarithms are natural, so
entropies, divergences and code lengths are in nats.

Operations on measures defined over different alphabets raise
:class:`DomainError` rather than silently taking the union of the alphabets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from expinfo._jsonio import as_floats, read_json, write_json


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class Alphabet:
    """Ordered, nonempty collection of distinct symbol identifiers."""

    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(str(s) for s in self.symbols)
        if not symbols:
            raise DomainError("alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            raise DomainError("alphabet symbols must be pairwise distinct")
        object.__setattr__(self, "symbols", symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i: int) -> str:
        return self.symbols[i]

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)


def _as_alphabet(alphabet: Alphabet | Iterable[str]) -> Alphabet:
    if isinstance(alphabet, Alphabet):
        return alphabet
    return Alphabet(tuple(alphabet))


def _frozen_vector(values, n: int, what: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{what} must be numeric") from exc
    if arr.shape != (n,):
        raise DomainError(f"{what} has shape {arr.shape}, expected ({n},)")
    arr.setflags(write=False)
    return arr


class DiscreteMeasure:
    """A finite measure on a finite alphabet.

    Parameters
    ----------
    alphabet : Alphabet or iterable of str
        The ordered symbols the measure lives on.
    weights : array_like
        One finite, nonnegative mass per symbol.

    Instances are immutable; arithmetic returns new measures.
    """

    __slots__ = ("alphabet", "weights")

    def __init__(self, alphabet: Alphabet | Iterable[str], weights: Sequence[float] | np.ndarray):
        alphabet = _as_alphabet(alphabet)
        w = _frozen_vector(weights, len(alphabet), "weights")
        if not np.all(np.isfinite(w)):
            raise DomainError("weights must be finite")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float],
                     alphabet: Alphabet | Iterable[str] | None = None):
        """Build a measure from ``{symbol: mass}``; missing symbols get mass 0."""
        alphabet = _as_alphabet(mapping.keys() if alphabet is None else alphabet)
        unknown = set(mapping) - set(alphabet.symbols)
        if unknown:
            raise DomainError(f"symbols not in alphabet: {sorted(unknown)}")
        return cls(alphabet, [mapping.get(s, 0) for s in alphabet])

    @classmethod
    def zeros(cls, alphabet: Alphabet | Iterable[str]):
        alphabet = _as_alphabet(alphabet)
        return cls(alphabet, np.zeros(len(alphabet)))

    def __len__(self) -> int:
        return len(self.alphabet)

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {w:g}" for s, w in zip(self.alphabet, self.weights))
        return f"{type(self).__name__}({{{body}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return self.alphabet == other.alphabet and np.array_equal(self.weights, other.weights)

    __hash__ = None

    def __getitem__(self, symbol: str) -> float:
        return float(self.weights[self.alphabet.index(symbol)])

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of symbols with positive mass."""
        return self.weights > 0

    def scaled(self, c: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.alphabet, self.weights * c)

    def __mul__(self, c: float) -> "DiscreteMeasure":
        return self.scaled(float(c))

    __rmul__ = __mul__

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        check_same_alphabet(self, other)
        return DiscreteMeasure(self.alphabet, self.weights + other.weights)

    def as_dict(self) -> dict[str, float]:
        return {s: float(w) for s, w in zip(self.alphabet, self.weights)}

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet), "weights": self.weights.tolist()}


class EmpiricalMeasure(DiscreteMeasure):
    """A measure with nonnegative integer weights, i.e. a table of counts."""

    __slots__ = ()

    def __init__(self, alphabet, weights):
        super().__init__(alphabet, weights)
        if not np.all(self.weights == np.round(self.weights)):
            raise DomainError("empirical measure weights must be integers")

    @property
    def counts(self) -> np.ndarray:
        return self.weights.astype(np.int64)

    def to_json(self) -> dict:
        return {"alphabet": list(self.alphabet), "weights": self.counts.tolist()}


@dataclass(frozen=True, eq=False)
class CodeLengthFunction:
    """Per-symbol code lengths in nats, each in ``[0, inf]``."""

    alphabet: Alphabet
    lengths: np.ndarray

    def __post_init__(self):
        alphabet = _as_alphabet(self.alphabet)
        lengths = _frozen_vector(self.lengths, len(alphabet), "lengths")
        if np.any(np.isnan(lengths)) or np.any(lengths < 0):
            raise DomainError("code lengths must lie in [0, inf]")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def from_coding_measure(cls, q: DiscreteMeasure) -> "CodeLengthFunction":
        """Lengths ``-ln Q(a)`` of a coding measure with ``||Q|| <= 1``."""
        if total_mass(q) > 1 + 1e-12:
            raise DomainError(f"coding measure has mass {total_mass(q)!r} > 1")
        with np.errstate(divide="ignore"):
            lengths = -np.log(q.weights)
        return cls(q.alphabet, np.maximum(lengths, 0.0))

    def in_bits(self) -> np.ndarray:
        return self.lengths / math.log(2)

    def is_admissible(self, tol: float = 1e-12) -> bool:
        """Whether the lengths satisfy Kraft's inequality up to ``tol``."""
        return kraft_sum(self) <= 1 + tol


def check_same_alphabet(*objs) -> Alphabet:
    first = objs[0].alphabet
    for other in objs[1:]:
        if other.alphabet != first:
            raise DomainError("alphabet mismatch")
    return first


# ---------------------------------------------------------------------------
# operations


def total_mass(mu: DiscreteMeasure) -> float:
    return float(np.sum(mu.weights))


def normalize(mu: DiscreteMeasure) -> DiscreteMeasure:
    """Return ``mu / ||mu||``."""
    m = total_mass(mu)
    if m <= 0:
        raise DomainError("cannot normalize the zero measure")
    return DiscreteMeasure(mu.alphabet, mu.weights / m)


def entropy(mu: DiscreteMeasure) -> float:
    """Entropy ``||mu|| * H(mu / ||mu||)`` in nats; 0 for the zero measure."""
    m = total_mass(mu)
    if m <= 0:
        return 0.0
    w = mu.weights[mu.weights > 0]
    return float(-np.sum(w * np.log(w / m)))


def _divergence_terms(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Termwise ``x ln(x/y) - x + y`` with the conventions for zeros.

    Evaluated as ``x * (u - log1p(u))`` with ``u = (y - x) / x``, which equals
    the plain form algebraically but never rounds below zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.where(x > 0, 0.0, y)
    out = np.where((x > 0) & (y == 0), math.inf, out)
    both = (x > 0) & (y > 0)
    if np.any(both):
        xb, yb = x[both], y[both]
        u = (yb - xb) / xb
        out[both] = xb * (u - np.log1p(u))
    return out


def divergence(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """Information divergence ``D(mu || nu)`` for finite measures.

    Equal to the Kullback-Leibler divergence when both arguments have mass
    one. The result is ``inf`` exactly when ``mu`` charges a symbol that ``nu``
    does not.
    """
    check_same_alphabet(mu, nu)
    return float(np.sum(_divergence_terms(mu.weights, nu.weights)))


def scalar_divergence(s: float, t: float) -> float:
    """Divergence between the one-point measures with masses ``s`` and ``t``."""
    if s < 0 or t < 0:
        raise DomainError("masses must be nonnegative")
    return float(_divergence_terms(np.array([s]), np.array([t]))[0])


def chain_rule_decompose(nu: DiscreteMeasure, mu: DiscreteMeasure) -> tuple[float, float]:
    """Split ``D(nu || mu)`` into a total-mass term and a conditional term.

    Returns ``(D(||nu|| || ||mu||), D(nu || mu * ||nu|| / ||mu||))``. The first
    term accounts for the sample size, the second for the letters given the
    sample size.
    """
    check_same_alphabet(nu, mu)
    m_mu = total_mass(mu)
    if m_mu <= 0:
        raise DomainError("reference measure has zero mass")
    if math.isinf(divergence(nu, mu)):
        raise DomainError("divergence is infinite; support of nu not contained in support of mu")
    m_nu = total_mass(nu)
    mass_term = scalar_divergence(m_nu, m_mu)
    conditional = divergence(nu, mu.scaled(m_nu / m_mu))
    return mass_term, conditional


def code_length_from_measure(mu: DiscreteMeasure) -> CodeLengthFunction:
    """Lengths ``ln(||mu|| / mu(a))``, infinite off the support."""
    m = total_mass(mu)
    if m <= 0:
        raise DomainError("zero measure has no code")
    with np.errstate(divide="ignore"):
        lengths = np.log(m / mu.weights)
    return CodeLengthFunction(mu.alphabet, np.maximum(lengths, 0.0))


def total_code_length(ell: CodeLengthFunction, mu: DiscreteMeasure) -> float:
    """``sum_a ell(a) * mu(a)`` with ``inf * 0 = 0``."""
    check_same_alphabet(ell, mu)
    used = mu.weights > 0
    return float(np.dot(ell.lengths[used], mu.weights[used]))


def kraft_sum(ell: CodeLengthFunction) -> float:
    return float(np.sum(np.exp(-ell.lengths)))


# ---------------------------------------------------------------------------
# mixtures and finite convex families


@dataclass(frozen=True, eq=False)
class MixtureWeights:
    """Probability vector over the members of a finite family."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DomainError("mixture weights must be a nonempty vector")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise DomainError("mixture weights must be finite and nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"mixture weights sum to {w.sum()!r}, not 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized(cls, w) -> "MixtureWeights":
        w = np.clip(np.asarray(w, dtype=float), 0.0, None)
        return cls(w / w.sum())

    @classmethod
    def uniform(cls, n: int) -> "MixtureWeights":
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def point_mass(cls, n: int, i: int) -> "MixtureWeights":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]


class ConvexFamily:
    """Convex hull of finitely many measures on a shared alphabet.

    Parameters
    ----------
    vertices : sequence of DiscreteMeasure
        Generators of the hull. They are not required to be extreme points.
    names : sequence of str, optional
        Labels parallel to ``vertices``.
    """

    measure_type = DiscreteMeasure

    def __init__(self, vertices: Sequence[DiscreteMeasure], names: Sequence[str] | None = None):
        vertices = tuple(vertices)
        if not vertices:
            raise DomainError("a family needs at least one member")
        self.alphabet = check_same_alphabet(*vertices)
        self.vertices = tuple(self.measure_type(v.alphabet, v.weights) for v in vertices)
        if names is not None:
            names = tuple(str(n) for n in names)
            if len(names) != len(vertices):
                raise DomainError("names must parallel the family members")
        self.names = names
        self.matrix = np.vstack([v.weights for v in self.vertices])
        self.matrix.setflags(write=False)

    @classmethod
    def from_arrays(cls, alphabet, rows, names=None):
        alphabet = _as_alphabet(alphabet)
        return cls([cls.measure_type(alphabet, r) for r in rows], names)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={len(self)}, alphabet={list(self.alphabet)})"

    def mixture(self, p: MixtureWeights | Sequence[float]) -> DiscreteMeasure:
        """The hull member ``sum_i p_i * vertex_i``."""
        w = p.weights if isinstance(p, MixtureWeights) else np.asarray(p, dtype=float)
        if w.shape != (len(self),):
            raise DomainError("mixture length does not match family size")
        return DiscreteMeasure(self.alphabet, np.clip(w @ self.matrix, 0.0, None))

    def subfamily(self, indices: Sequence[int]):
        names = None if self.names is None else [self.names[i] for i in indices]
        return type(self)([self.vertices[i] for i in indices], names)

    def to_json(self) -> dict:
        out = {"alphabet": list(self.alphabet),
               "instances": [v.to_json()["weights"] for v in self.vertices]}
        if self.names is not None:
            out["names"] = list(self.names)
        return out

    @classmethod
    def from_json(cls, obj: Mapping):
        if "alphabet" not in obj:
            raise DomainError("family file lacks 'alphabet'")
        rows = obj.get("instances", obj.get("vertices"))
        if not isinstance(rows, list) or not rows:
            raise DomainError("family file needs a nonempty 'instances' array")
        alphabet = _as_alphabet(obj["alphabet"])
        try:
            members = [cls.measure_type(alphabet, as_floats(r)) for r in rows]
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
        return cls(members, obj.get("names"))


# ---------------------------------------------------------------------------
# measure files


def measure_from_json(obj: Mapping, empirical: bool = False) -> DiscreteMeasure:
    if not isinstance(obj, Mapping) or "alphabet" not in obj or "weights" not in obj:
        raise DomainError("measure file needs 'alphabet' and 'weights'")
    try:
        weights = as_floats(obj["weights"])
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    cls = EmpiricalMeasure if empirical else DiscreteMeasure
    return cls(obj["alphabet"], weights)


def read_measure(path: str | Path, empirical: bool = False) -> DiscreteMeasure:
    return measure_from_json(read_json(path), empirical=empirical)


def write_measure(mu: DiscreteMeasure, path: str | Path) -> None:
    write_json(mu.to_json(), path)
