"""Value types, Pareto dominance and ideal/nadir bookkeeping."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class ContractError(ValueError):
    """Raised when an operation is called outside its preconditions."""


class ParameterError(ValueError):
    """Raised for invalid algorithm or scalarizer parameters."""


class Dominance(enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    INCOMPARABLE = "incomparable"
    EQUAL = "equal"


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        up = np.asarray(self.upper, dtype=float)
        if lo.shape != up.shape or lo.ndim != 1:
            raise ContractError("lower and upper bounds must be 1-D and equal length")
        if not np.all(lo < up):
            raise ContractError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @property
    def n(self) -> int:
        return self.lower.size

    @classmethod
    def uniform(cls, n: int, lo: float, up: float) -> "Bounds":
        return cls(np.full(n, lo), np.full(n, up))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))


@dataclass(frozen=True)
class Individual:
    """A decision vector with its cached objective vector."""

    x: np.ndarray
    f: np.ndarray


@dataclass(frozen=True)
class IdealNadir:
    z_star: np.ndarray
    z_nad: np.ndarray


def _as_pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ContractError(f"length mismatch: {u.shape} vs {v.shape}")
    return u, v


def dominates(u, v) -> Dominance:
    """Classify the Pareto relation of objective vector ``u`` to ``v``.

    Minimization throughout: ``u`` dominates ``v`` when it is no worse in every
    objective and strictly better in at least one.
    """
    u, v = _as_pair(u, v)
    le = np.all(u <= v)
    ge = np.all(u >= v)
    if le and ge:
        return Dominance.EQUAL
    if le:
        return Dominance.DOMINATES
    if ge:
        return Dominance.DOMINATED
    return Dominance.INCOMPARABLE


def nondominated_mask(points) -> np.ndarray:
    """Boolean mask of the nondominated rows of ``points``.

    Duplicate rows collapse to their first occurrence.
    """
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return np.zeros(len(P), dtype=bool)
    from ._backend import kernels

    return np.asarray(kernels.nondominated_mask(np.ascontiguousarray(P)), dtype=bool)


def nondominated_filter(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return P.reshape(0, P.shape[1] if P.ndim == 2 else 0)
    return P[nondominated_mask(P)]


def update_ideal(zn: IdealNadir, f) -> IdealNadir:
    z, f = _as_pair(zn.z_star, f)
    return IdealNadir(np.minimum(z, f), zn.z_nad)


def compute_nadir(pop) -> np.ndarray:
    """Componentwise worst objective values of the current population.

    ``pop`` may be a sequence of :class:`Individual` or an ``(N, m)`` array.
    """
    if len(pop) == 0:
        raise ContractError("cannot compute a nadir estimate of an empty population")
    if isinstance(pop[0], Individual):
        F = np.array([ind.f for ind in pop], dtype=float)
    else:
        F = np.asarray(pop, dtype=float)
    return F.max(axis=0)
