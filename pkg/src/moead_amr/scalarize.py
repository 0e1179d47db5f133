"""Scalarizing functions.

All functions follow a "smaller is better" convention. The reverse
Tchebycheff value is therefore returned negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import IdealNadir, ParameterError

NORM_EPS = 1e-12

CLASSIC_KINDS = ("WS", "TCH", "PBI", "aTCH", "mTCH", "rTCH", "Lp", "MSF", "pTCH")
SPECIAL_CASE_KINDS = ("TCH", "mTCH", "pTCH", "QiVariant")


@dataclass(frozen=True)
class PSParams:
    """Reference point ``a`` and direction ``r`` of a minimax PS subproblem."""

    a: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if a.shape != r.shape:
            raise ParameterError("reference point and direction must have equal length")
        if not np.all(r > 0):
            raise ParameterError("every direction component must be strictly positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class ScalarizerSpec:
    kind: str
    w: np.ndarray | None = None
    theta: float = 5.0
    rho: float = 0.01
    p: float = 2.0
    beta: float = 1.0
    lam: np.ndarray | None = None
    ps: PSParams | None = field(default=None)

    def __post_init__(self):
        if self.kind not in CLASSIC_KINDS + ("PS", "PSnorm"):
            raise ParameterError(f"unknown scalarizer kind {self.kind!r}")
        if self.theta <= 0 or self.rho <= 0 or self.p < 1 or self.beta < 0:
            raise ParameterError("scalarizer parameter out of range")


def _weights(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if not np.all(w > 0):
        raise ParameterError("weight components must be strictly positive")
    return w


def ps_scalarize(f, ps: PSParams) -> float:
    """max_i (f_i - a_i) / r_i."""
    f = np.asarray(f, dtype=float)
    return float(np.max((f - ps.a) / ps.r))


def normalize(f, zn: IdealNadir) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    span = np.maximum(np.asarray(zn.z_nad) - np.asarray(zn.z_star), NORM_EPS)
    return (f - zn.z_star) / span


def degenerate_axes(zn: IdealNadir) -> np.ndarray:
    """Mask of objective axes whose nadir-ideal span is below the clamp."""
    return (np.asarray(zn.z_nad) - np.asarray(zn.z_star)) < NORM_EPS


def ps_scalarize_normalized(f, ps: PSParams, zn: IdealNadir) -> float:
    return ps_scalarize(normalize(f, zn), ps)


def classic_scalarize(f, spec: ScalarizerSpec, zn: IdealNadir | None = None) -> float:
    f = np.asarray(f, dtype=float)
    kind = spec.kind
    if kind == "PS":
        return ps_scalarize(f, spec.ps)
    if kind == "PSnorm":
        return ps_scalarize_normalized(f, spec.ps, zn)

    if kind == "pTCH":
        lam = np.asarray(spec.lam if spec.lam is not None else spec.w, dtype=float)
        lam = _weights(lam)
        lam = lam / np.linalg.norm(lam, ord=spec.p)
        return float(np.max((f - zn.z_star) / lam))

    w = _weights(spec.w)
    if kind == "WS":
        return float(np.dot(w, f))
    if kind == "rTCH":
        return -float(np.min(w * (zn.z_nad - f)))

    d = f - zn.z_star
    if kind == "TCH":
        return float(np.max(w * d))
    if kind == "mTCH":
        return float(np.max(d / w))
    if kind == "aTCH":
        return float(np.max(w * np.abs(d)) + spec.rho * np.sum(np.abs(d)))
    if kind == "PBI":
        d1 = abs(float(np.dot(d, w))) / float(np.linalg.norm(w))
        d2 = float(np.linalg.norm(f - (zn.z_star + d1 * w)))
        return d1 + spec.theta * d2
    if kind == "Lp":
        scaled = np.abs(d) / w
        if math.isinf(spec.p):
            return float(np.max(scaled))
        if spec.p == 1:
            return float(np.sum(scaled))
        return float(np.sum(scaled**spec.p) ** (1.0 / spec.p))
    if kind == "MSF":
        scaled = d / w
        hi = float(np.max(scaled))
        if spec.beta == 0:
            return hi
        lo = float(np.min(scaled))
        if lo <= 0:
            return math.inf
        return hi ** (1 + spec.beta) / lo**spec.beta
    raise ParameterError(f"unsupported kind {kind!r}")


def special_case_params(kind: str, direction, z_star, p: float = 2.0) -> PSParams:
    """(a, r) that make :func:`ps_scalarize` reproduce a weight-based scalarizer.

    ``direction`` is the weight vector for TCH, mTCH and QiVariant, and the
    direction ``lambda`` (normalized to unit ``p``-norm) for pTCH.
    """
    w = _weights(direction)
    a = np.asarray(z_star, dtype=float).copy()
    if kind == "TCH":
        r = 1.0 / w
    elif kind == "mTCH":
        r = w.copy()
    elif kind == "pTCH":
        r = w / np.linalg.norm(w, ord=p)
    elif kind == "QiVariant":
        r = np.sum(1.0 / w) / (1.0 / w)
    else:
        raise ParameterError(f"no special-case row for {kind!r}")
    return PSParams(a, r)


def qi_variant_scalarize(f, w, z_star) -> float:
    """Tchebycheff form with per-axis factor (1/w_i) / sum_j (1/w_j)."""
    w = _weights(w)
    inv = 1.0 / w
    return float(np.max(inv / inv.sum() * (np.asarray(f, dtype=float) - z_star)))


def nbi_tch_reference(i: int, N: int, F1, F2) -> tuple[np.ndarray, np.ndarray]:
    """Reference point b^i (1-based i) and scaling gamma of the NBI-style Tchebycheff subproblem."""
    F1 = np.asarray(F1, dtype=float)
    F2 = np.asarray(F2, dtype=float)
    xi = (N - i) / (N - 1)
    b = xi * F1 + (1 - xi) * F2
    gamma = np.array([abs(F2[1] - F1[1]), abs(F2[0] - F1[0])])
    return b, gamma


def nbi_tch_scalarize(f, b, gamma) -> float:
    f = np.asarray(f, dtype=float)
    return float(max(gamma[0] * (f[0] - b[0]), gamma[1] * (f[1] - b[1])))


def nbi_tch_params(b, gamma) -> PSParams:
    """PS parameters whose minimax value equals the NBI-style Tchebycheff value."""
    return PSParams(np.asarray(b, dtype=float), 1.0 / np.asarray(gamma, dtype=float))
