"""IGD, normalized hypervolume and per-group aggregation."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from .core import ContractError, nondominated_filter

HV_REF = 1.1


@dataclass(frozen=True)
class MetricResult:
    metric: str
    value: float
    problem: str = ""
    algorithm: str = ""
    seed: int = 0
    run_id: int = 0


def igd(approx, reference, chunk: int = 2048) -> float:
    """Mean distance from each reference point to its nearest approximation point."""
    A = np.asarray(approx, dtype=float)
    R = np.asarray(reference, dtype=float)
    if A.size == 0 or R.size == 0:
        raise ContractError("IGD needs nonempty approximation and reference sets")
    if A.ndim != 2 or R.ndim != 2 or A.shape[1] != R.shape[1]:
        raise ContractError("IGD sets must be 2-D with the same number of objectives")
    total = 0.0
    for s in range(0, len(R), chunk):
        diff = R[s : s + chunk, None, :] - A[None, :, :]
        total += np.sqrt(np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)).sum()
    return float(total / len(R))


def _hv2d(P: np.ndarray, ref: float) -> float:
    P = nondominated_filter(P)
    P = P[np.argsort(P[:, 0], kind="stable")]
    x_next = np.r_[P[1:, 0], ref]
    return float(np.sum((x_next - P[:, 0]) * (ref - P[:, 1])))


def _hv3d(P: np.ndarray, ref: float) -> float:
    P = nondominated_filter(P)
    P = P[np.argsort(P[:, 2], kind="stable")]
    levels = np.r_[np.unique(P[:, 2]), ref]
    vol = 0.0
    for k in range(len(levels) - 1):
        active = P[P[:, 2] <= levels[k], :2]
        vol += _hv2d(active, ref) * (levels[k + 1] - levels[k])
    return float(vol)


def hypervolume(points, ref: float = HV_REF) -> float:
    """Volume dominated by ``points`` inside the box bounded by ``(ref, ..., ref)``."""
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return 0.0
    m = P.shape[1]
    P = P[np.all(P < ref, axis=1)]
    if len(P) == 0:
        return 0.0
    if m == 2:
        return _hv2d(P, ref)
    if m == 3:
        return _hv3d(P, ref)
    raise ContractError(f"hypervolume supports 2 or 3 objectives, got {m}")


def hv_normalized(approx, front_ideal, front_nadir, nadir_scale: float = 1.0,
                  ref: float = HV_REF) -> float:
    """Hypervolume after mapping ``front_ideal`` to 0 and ``front_nadir`` to ``1 / nadir_scale``.

    ``nadir_scale=1`` is the plain ideal/nadir normalization. ``nadir_scale=1.1``
    divides by 1.1 times the span, which is the convention behind the
    published HV tables (their maxima exceed what the plain form allows).
    """
    lo = np.asarray(front_ideal, dtype=float)
    hi = np.asarray(front_nadir, dtype=float)
    if not np.all(hi > lo):
        raise ContractError("front nadir must exceed front ideal in every objective")
    A = np.asarray(approx, dtype=float)
    if A.size == 0:
        return 0.0
    return hypervolume((A - lo) / ((hi - lo) * nadir_scale), ref)


def aggregate(results: Iterable[MetricResult]) -> dict[tuple[str, str, str], tuple[float, float, int]]:
    """Mean and sample standard deviation (divisor n - 1) per (problem, algorithm, metric).

    A group with a single result reports a standard deviation of 0.
    """
    groups: dict[tuple[str, str, str], list[float]] = defaultdict(list)
    for r in results:
        groups[(r.problem, r.algorithm, r.metric)].append(r.value)
    out = {}
    for key, vals in groups.items():
        v = np.asarray(vals, dtype=float)
        std = float(v.std(ddof=1)) if len(v) > 1 else 0.0
        out[key] = (float(v.mean()), std, len(v))
    return out
