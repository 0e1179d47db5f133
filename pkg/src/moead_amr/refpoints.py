"""Reference-point lattice on the hyperplane sum(y) = 0 and its adaptation."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ParameterError

log = logging.getLogger(__name__)

H0_TOL = 1e-10
ADJ_RTOL = 1e-9
# Distances within this fraction of the lattice spacing count as ties, not as
# "closer than the spacing". Degenerate fronts put whole lattice rows at exactly
# the spacing once converged, and run noise scatters them by a few percent.
PROMISING_RTOL = 0.05


@dataclass
class PromisingPartition:
    points: np.ndarray  # L_pro, (k, m)
    indices: np.ndarray  # I_pro, strictly increasing
    X: np.ndarray  # decision vectors attached to L_pro
    F: np.ndarray  # their objective vectors


def generate_base_points(m: int, l: int) -> np.ndarray:
    """Grid points of {0, 1/l, ..., 1}^m with at least one zero coordinate."""
    if m < 2:
        raise ParameterError("need at least two objectives")
    if l < 1:
        raise ParameterError("number of divisions l must be >= 1")
    pts = [k for k in itertools.product(range(l + 1), repeat=m) if min(k) == 0]
    return np.array(pts, dtype=float) / l


def project_to_h0(p) -> np.ndarray:
    """Orthogonal projection along 1_m onto the hyperplane sum(y) = 0.

    Works row-wise on 2-D input.
    """
    p = np.asarray(p, dtype=float)
    return p - p.mean(axis=-1, keepdims=True)


def generate_reference_points(m: int, l: int) -> np.ndarray:
    return project_to_h0(generate_base_points(m, l))


def reference_point_count(m: int, l: int) -> int:
    return (l + 1) ** m - l**m


def pairwise_distances(A, B=None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = A if B is None else np.asarray(B, dtype=float)
    diff = A[:, None, :] - B[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def min_pairwise_distance(L) -> float:
    D = pairwise_distances(L)
    np.fill_diagonal(D, np.inf)
    return float(D.min())


def compute_neighborhoods(L, T: int) -> np.ndarray:
    """Indices of the T closest points to each point, self first.

    Ties are broken by lower index (stable sort).
    """
    L = np.asarray(L, dtype=float)
    N = len(L)
    if T > N:
        raise ParameterError(f"neighborhood size T={T} exceeds the number of points N={N}")
    if T < 1:
        raise ParameterError("neighborhood size must be positive")
    D = pairwise_distances(L)
    return np.argsort(D, axis=1, kind="stable")[:, :T].astype(np.intp)


def _normalize_population(F, z_star, z_nad) -> np.ndarray:
    span = np.maximum(np.asarray(z_nad) - np.asarray(z_star), 1e-12)
    return (np.asarray(F, dtype=float) - z_star) / span


def identify_promising(L, X, F, z_star, z_nad, rtol: float = PROMISING_RTOL) -> PromisingPartition:
    """Keep the reference points that have a projected solution within the lattice spacing.

    A point counts as promising when its nearest projected solution lies within
    ``(1 - rtol)`` times the minimum spacing of ``L``. ``rtol=0`` is the plain
    ``d <= d_min`` test.
    """
    L = np.asarray(L, dtype=float)
    d_ll = min_pairwise_distance(L)
    Q = project_to_h0(_normalize_population(F, z_star, z_nad))
    d_lq = pairwise_distances(L, Q).min(axis=1)
    keep = np.flatnonzero(d_lq <= d_ll * (1.0 - rtol))
    X = np.asarray(X)
    F = np.asarray(F)
    return PromisingPartition(L[keep], keep, X[keep], F[keep])


def adjacent_pairs(points) -> list[tuple[int, int]]:
    """Index pairs (i < j) whose distance equals the current minimum spacing."""
    P = np.asarray(points, dtype=float)
    if len(P) < 2:
        return []
    D = pairwise_distances(P)
    iu = np.triu_indices(len(P), k=1)
    d = D[iu]
    dmin = d.min()
    sel = d <= dmin * (1 + ADJ_RTOL)
    return list(zip(iu[0][sel].tolist(), iu[1][sel].tolist()))


def add_new_reference_points(
    part: PromisingPartition, L, X, F, N: int, T: int, rng, z_star=None, z_nad=None
):
    """Refill the promising set to N points with midpoints of adjacent pairs.

    The unpromising individuals are kept; each is attached, in index order, to
    the nearest still-unassigned new reference point.

    Returns ``(L_new, X_new, F_new, B_new)``.
    """
    k = len(part.points)
    L = np.asarray(L, dtype=float)
    X = np.asarray(X)
    F = np.asarray(F)
    if k < 2:
        # no adjacent pair can seed new points
        log.warning("only %d promising reference point(s); adaptation skipped", k)
        return L, X, F, compute_neighborhoods(L, T)
    pts = [p for p in part.points]
    while len(pts) < N:
        P = np.array(pts)
        pairs = adjacent_pairs(P)
        mids = np.array([(P[i] + P[j]) / 2 for i, j in pairs])
        # drop midpoints that coincide with an existing point
        if len(mids):
            clash = pairwise_distances(mids, P).min(axis=1) < 1e-12
            mids = mids[~clash]
        if len(mids) == 0:
            log.warning("no new midpoints available at %d points; adaptation skipped", len(pts))
            return L, X, F, compute_neighborhoods(L, T)
        need = N - len(pts)
        if need <= len(mids):
            chosen = np.sort(rng.choice(len(mids), size=need, replace=False))
            mids = mids[chosen]
        pts.extend(mids)
    L_new = np.array(pts)

    if z_star is None or z_nad is None:
        z_star, z_nad = F.min(axis=0), F.max(axis=0)
    unpro = np.setdiff1d(np.arange(len(X)), part.indices)
    new_pts = L_new[k:]
    X_new = list(part.X)
    F_new = list(part.F)
    if len(new_pts):
        free = np.ones(len(new_pts), dtype=bool)
        slot = np.empty(len(new_pts), dtype=np.intp)
        Q = project_to_h0(_normalize_population(F[unpro], z_star, z_nad))
        for idx, q in zip(unpro, Q):
            d = np.where(free, np.linalg.norm(new_pts - q, axis=1), np.inf)
            t = int(np.argmin(d))
            free[t] = False
            slot[t] = idx
        X_new.extend(X[slot])
        F_new.extend(F[slot])
    return L_new, np.array(X_new), np.array(F_new), compute_neighborhoods(L_new, T)


def save_points_csv(path, L) -> None:
    L = np.asarray(L, dtype=float)
    header = ",".join(f"a{j + 1}" for j in range(L.shape[1]))
    np.savetxt(Path(path), L, delimiter=",", header=header, comments="", fmt="%.17g")


def load_points_csv(path) -> np.ndarray:
    return np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
