"""Benchmark and engineering problems, their reference fronts and a CSV cache.

Each built-in problem carries two evaluators: a scalar one inside the kernels
(used by the optimizer) and a vectorized numpy one here (used for reference
fronts and as an independent transcription check).
"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import PROBLEM_IDS, kernels
from .core import Bounds, ContractError, nondominated_filter

log = logging.getLogger(__name__)

MZDT1_M = 0.5
HC_E = 700000.0


class UnsupportedProblemError(KeyError):
    """Unknown problem name or a problem without a front sampler."""


@dataclass(frozen=True)
class ProblemDef:
    name: str
    m: int
    n: int
    bounds: Bounds
    evaluator: Callable[[np.ndarray], np.ndarray]
    batch_evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    front_sampler: Callable[[int], np.ndarray] | None = None
    kernel_id: int = -1
    default_front_size: int = field(default=0)

    def __post_init__(self):
        if self.bounds.n != self.n:
            raise ContractError(f"{self.name}: bounds length {self.bounds.n} != n={self.n}")
        if self.default_front_size == 0:
            object.__setattr__(self, "default_front_size", 1000 if self.m == 2 else 5000)


def evaluate(problem: ProblemDef, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ContractError(f"{problem.name} expects {problem.n} variables, got shape {x.shape}")
    if not problem.bounds.contains(x):
        raise ContractError(f"{problem.name}: decision vector outside bounds")
    return np.asarray(problem.evaluator(x), dtype=float)


# vectorized evaluators, rows of X are decision vectors


def _zdt_g(X):
    return 1.0 + 9.0 * X[:, 1:].sum(axis=1) / (X.shape[1] - 1)


def zdt1(X):
    g = _zdt_g(X)
    return np.column_stack([X[:, 0], g * (1 - np.sqrt(X[:, 0] / g))])


def zdt3(X):
    g = _zdt_g(X)
    t = X[:, 0] / g
    return np.column_stack([X[:, 0], g * (1 - np.sqrt(t) - t * np.sin(10 * np.pi * X[:, 0]))])


def mzdt1(X):
    g = _zdt_g(X)
    return np.column_stack([X[:, 0], g * (1 - (X[:, 0] / g) ** (1 / MZDT1_M))])


def _glt_g(X):
    return ((X[:, 1:] - np.sin(2 * np.pi * X[:, [0]])) ** 2).sum(axis=1)


def glt1(X):
    g1 = 1 + _glt_g(X)
    x1 = X[:, 0]
    return np.column_stack([g1 * x1, g1 * (2 - x1 - np.sign(np.cos(2 * np.pi * x1)))])


def glt3(X):
    g1 = 1 + _glt_g(X)
    x1 = X[:, 0]
    h = np.where(x1 <= 0.05, 1 - 19 * x1, 1 / 19 - x1 / 19)
    return np.column_stack([g1 * x1, g1 * h])


def sch1(X):
    return np.column_stack([X[:, 0] ** 2, (X[:, 0] - 2) ** 2])


def f1(X):
    g = _zdt_g(X)
    return np.column_stack([g * (1 - 1 / (1 + np.exp(-10 * X[:, 0]))), X[:, 0]])


def dtlz1(X):
    t = X[:, 2:] - 0.5
    g = 100 * (t.shape[1] + (t**2 - np.cos(20 * np.pi * t)).sum(axis=1))
    x1, x2 = X[:, 0], X[:, 1]
    return 0.5 * (1 + g)[:, None] * np.column_stack([x1 * x2, x1 * (1 - x2), 1 - x1])


def _dtlz2_like(X, theta2):
    g = ((X[:, 2:] - 0.5) ** 2).sum(axis=1)
    a = 0.5 * np.pi * X[:, 0]
    b = theta2(X[:, 1], g)
    return (1 + g)[:, None] * np.column_stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(a)]), g


def dtlz2(X):
    return _dtlz2_like(X, lambda x2, g: 0.5 * np.pi * x2)[0]


def dtlz5(X):
    return _dtlz2_like(X, lambda x2, g: np.pi / (4 * (1 + g)) * (1 + 2 * g * x2))[0]


def dtlz7(X):
    k = X.shape[1] - 2
    g = 1 + 9 / k * X[:, 2:].sum(axis=1)
    head = X[:, :2]
    h = 3 - (head / (1 + g)[:, None] * (1 + np.sin(3 * np.pi * head))).sum(axis=1)
    return np.column_stack([head, (1 + g) * h])


def idtlz1(X):
    t = X[:, 2:] - 0.5
    g = 100 * (t.shape[1] + (t**2 - np.cos(20 * np.pi * t)).sum(axis=1))
    return 0.5 * (1 + g)[:, None] - dtlz1(X)


def idtlz2(X):
    F, g = _dtlz2_like(X, lambda x2, g: 0.5 * np.pi * x2)
    return (1 + g)[:, None] - F


def vnt2(X):
    x1, x2 = X[:, 0], X[:, 1]
    return np.column_stack([
        (x1 - 2) ** 2 / 2 + (x2 + 1) ** 2 / 13 + 3,
        (x1 + x2 - 3) ** 2 / 36 + (-x1 + x2 + 2) ** 2 / 8 - 17,
        (x1 + 2 * x2 - 1) ** 2 / 175 + (2 * x2 - x1) ** 2 / 17 - 13,
    ])


def f2(X):
    g = ((X[:, 2:] - 0.5) ** 2).sum(axis=1)
    a = 0.5 * np.pi * X[:, 0]
    b = 0.5 * np.pi * X[:, 1]
    # third component uses sin(pi x2 / 2) exactly as the published formula states
    C = np.column_stack([np.cos(a) * np.cos(b), np.cos(a) * np.sin(b), np.sin(b)])
    base = (1 + g)[:, None] * (1 - C)
    return np.maximum(base, 0.0) ** 1.8


def hc(X):
    x1, x2 = X[:, 0], X[:, 1]
    rho_b = 4500 / (x1 * x2)
    tau = 1800 / x2
    theta = 562000 / (HC_E * x1 * x2**2)
    rho_k = HC_E * x1**2 / 100
    g = np.column_stack([1 - rho_b / 700, 1 - tau / 450, 1 - theta / 1.5, 1 - rho_b / rho_k])
    return np.column_stack([x1 + 120 * x2, np.maximum(-g, 0).sum(axis=1)])


# (coefficient, exponents of x1..x4) per objective
_RI_TERMS = (
    [(0.692, (0, 0, 0, 0)), (0.477, (1, 0, 0, 0)), (-0.687, (0, 1, 0, 0)), (-0.08, (0, 0, 1, 0)),
     (-0.065, (0, 0, 0, 1)), (-0.167, (2, 0, 0, 0)), (-0.0129, (1, 1, 0, 0)), (0.0796, (0, 2, 0, 0)),
     (-0.0634, (1, 0, 1, 0)), (-0.0257, (0, 1, 1, 0)), (0.0877, (0, 0, 2, 0)), (-0.0521, (1, 0, 0, 1)),
     (0.00156, (0, 1, 0, 1)), (0.00198, (0, 0, 1, 1)), (0.0184, (0, 0, 0, 2))],
    [(0.153, (0, 0, 0, 0)), (-0.322, (1, 0, 0, 0)), (0.396, (0, 1, 0, 0)), (0.424, (0, 0, 1, 0)),
     (0.0226, (0, 0, 0, 1)), (0.175, (2, 0, 0, 0)), (0.0185, (1, 1, 0, 0)), (-0.0701, (0, 2, 0, 0)),
     (-0.251, (1, 0, 1, 0)), (0.179, (0, 1, 1, 0)), (0.015, (0, 0, 2, 0)), (0.0134, (1, 0, 0, 1)),
     (0.0296, (0, 1, 0, 1)), (0.0752, (0, 0, 1, 1)), (0.0192, (0, 0, 0, 2))],
    [(0.37, (0, 0, 0, 0)), (-0.205, (1, 0, 0, 0)), (0.0307, (0, 1, 0, 0)), (0.108, (0, 0, 1, 0)),
     (1.019, (0, 0, 0, 1)), (-0.135, (2, 0, 0, 0)), (0.0141, (1, 1, 0, 0)), (0.0998, (0, 2, 0, 0)),
     (0.208, (1, 0, 1, 0)), (-0.0301, (0, 1, 1, 0)), (-0.226, (0, 0, 2, 0)), (0.353, (1, 0, 0, 1)),
     (-0.0497, (0, 0, 1, 1)), (-0.423, (0, 0, 0, 2)), (0.202, (2, 1, 0, 0)), (-0.281, (2, 0, 1, 0)),
     (-0.342, (1, 2, 0, 0)), (-0.245, (0, 2, 1, 0)), (0.281, (0, 1, 2, 0)), (-0.184, (1, 0, 0, 2)),
     (-0.281, (1, 1, 1, 0))],
)


def ri(X):
    out = np.zeros((len(X), 3))
    for j, terms in enumerate(_RI_TERMS):
        for c, e in terms:
            out[:, j] += c * np.prod(X ** np.array(e), axis=1)
    return out


def eval_F1(x) -> np.ndarray:
    return evaluate(get_problem("f1"), x)


def eval_F2(x) -> np.ndarray:
    return evaluate(get_problem("f2"), x)


def eval_HC(x) -> np.ndarray:
    return evaluate(get_problem("hc"), x)


def eval_RI(x) -> np.ndarray:
    return evaluate(get_problem("ri"), x)


# reference fronts


def thin_front(P, count: int) -> np.ndarray:
    """Farthest-point subsample of ``count`` rows, seeded at the lexicographic minimum."""
    P = np.ascontiguousarray(P, dtype=float)
    if len(P) <= count:
        return P
    start = int(np.lexsort(P.T[::-1])[0])
    chosen = np.sort(kernels.farthest_point_indices(P, count, start))
    return P[chosen]


def _curve_front(batch, n, lo, hi, rest, dense=200_001, var=0):
    def sampler(count):
        X = np.tile(np.asarray(rest, dtype=float), (dense, 1)).reshape(dense, n)
        X[:, var] = np.linspace(lo, hi, dense)
        return thin_front(nondominated_filter(batch(X)), count)

    return sampler


def _surface_front(batch, n, rest, grid=301):
    def sampler(count):
        u = np.linspace(0, 1, grid)
        a, b = np.meshgrid(u, u, indexing="ij")
        X = np.empty((grid * grid, n))
        X[:, 2:] = rest
        X[:, 0] = a.ravel()
        X[:, 1] = b.ravel()
        return thin_front(nondominated_filter(batch(X)), count)

    return sampler


def _zdt1_front(count):
    s = np.linspace(0, 1, count)
    return np.column_stack([s**2, 1 - s])


def _glt_rest(x1_grid, n):
    # g = 0 requires x_i = sin(2 pi x1) for i >= 2
    X = np.repeat(np.sin(2 * np.pi * x1_grid)[:, None], n, axis=1)
    X[:, 0] = x1_grid
    return X


def _glt_front(batch, n, dense=200_001):
    def sampler(count):
        X = _glt_rest(np.linspace(0, 1, dense), n)
        return thin_front(nondominated_filter(batch(X)), count)

    return sampler


def _brute_front(batch, bounds: Bounds, grid=None, samples=None, seed=12345, chunk=500_000):
    def sampler(count):
        lo, up = bounds.lower, bounds.upper
        kept = []
        if grid is not None:
            axes = [np.linspace(lo[j], up[j], grid) for j in range(len(lo))]
            mesh = np.meshgrid(*axes, indexing="ij")
            X = np.column_stack([c.ravel() for c in mesh])
            for s in range(0, len(X), chunk):
                kept.append(nondominated_filter(batch(X[s : s + chunk])))
        else:
            rng = np.random.default_rng(seed)
            for s in range(0, samples, chunk):
                X = lo + (up - lo) * rng.random((min(chunk, samples - s), len(lo)))
                kept.append(nondominated_filter(batch(X)))
        return thin_front(nondominated_filter(np.vstack(kept)), count)

    return sampler


def _make(name, m, n, lo, up, batch, sampler=None, **kw) -> ProblemDef:
    bounds = Bounds(np.broadcast_to(np.asarray(lo, float), n).copy(),
                    np.broadcast_to(np.asarray(up, float), n).copy())
    pid = PROBLEM_IDS[name]

    def scalar(x, _pid=pid, _m=m):
        out = np.empty(_m)
        kernels.evaluate(_pid, np.ascontiguousarray(x, dtype=float), out)
        return out

    return ProblemDef(name, m, n, bounds, scalar, batch, sampler, pid, **kw)


SCH1_BOUND = 10.0
RI_SAMPLES = 10_000_000


def _build_registry() -> dict[str, ProblemDef]:
    half = np.full(10, 0.5)
    glt_lo = np.r_[0.0, np.full(9, -1.0)]
    reg = [
        _make("zdt1", 2, 30, 0, 1, zdt1, _zdt1_front),
        _make("zdt3", 2, 30, 0, 1, zdt3, _curve_front(zdt3, 30, 0, 1, np.zeros(30))),
        _make("mzdt1", 2, 30, 0, 1, mzdt1, _curve_front(mzdt1, 30, 0, 1, np.zeros(30))),
        _make("glt1", 2, 10, glt_lo, 1, glt1, _glt_front(glt1, 10)),
        _make("glt3", 2, 10, glt_lo, 1, glt3, _glt_front(glt3, 10)),
        _make("sch1", 2, 1, -SCH1_BOUND, SCH1_BOUND, sch1, _curve_front(sch1, 1, 0, 2, np.zeros(1))),
        _make("f1", 2, 30, np.r_[-1.0, np.zeros(29)], 1, f1, _curve_front(f1, 30, -1, 1, np.zeros(30))),
        _make("dtlz1", 3, 7, 0.0001, 0.9999, dtlz1, _surface_front(dtlz1, 7, 0.5)),
        _make("dtlz2", 3, 12, 0, 1, dtlz2, _surface_front(dtlz2, 12, half)),
        _make("dtlz5", 3, 12, 0, 1, dtlz5, _curve_front(dtlz5, 12, 0, 1, np.r_[0.0, 0.0, half])),
        _make("dtlz7", 3, 15, 0, 1, dtlz7, _surface_front(dtlz7, 15, 0.0)),
        _make("idtlz1", 3, 7, 0, 1, idtlz1, _surface_front(idtlz1, 7, 0.5)),
        _make("idtlz2", 3, 12, 0, 1, idtlz2, _surface_front(idtlz2, 12, half)),
        # with the published third component the front is the curve x1 = 0
        _make("f2", 3, 12, 0, 1, f2, _curve_front(f2, 12, 0, 1, np.r_[0.0, 0.0, half], var=1)),
    ]
    vnt2_b = Bounds.uniform(2, -4, 4)
    hc_b = Bounds(np.array([0.5, 0.5]), np.array([4.0, 50.0]))
    ri_b = Bounds.uniform(4, 0, 1)
    reg += [
        _make("vnt2", 3, 2, -4, 4, vnt2, _brute_front(vnt2, vnt2_b, grid=1000)),
        _make("hc", 2, 2, hc_b.lower, hc_b.upper, hc, _brute_front(hc, hc_b, grid=2000)),
        _make("ri", 3, 4, 0, 1, ri, _brute_front(ri, ri_b, samples=RI_SAMPLES)),
    ]
    return {p.name: p for p in reg}


REGISTRY: dict[str, ProblemDef] = _build_registry()


def get_problem(name: str) -> ProblemDef:
    try:
        return REGISTRY[name.lower()]
    except KeyError:
        raise UnsupportedProblemError(f"unknown problem {name!r}; known: {sorted(REGISTRY)}") from None


def register_problem(problem: ProblemDef) -> None:
    REGISTRY[problem.name.lower()] = problem


def sample_reference_front(problem: ProblemDef | str, count: int | None = None) -> np.ndarray:
    if isinstance(problem, str):
        problem = get_problem(problem)
    if problem.front_sampler is None:
        raise UnsupportedProblemError(f"{problem.name} has no reference-front sampler")
    return problem.front_sampler(count or problem.default_front_size)


def default_cache_dir() -> Path:
    env = os.environ.get("MOEAD_AMR_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "moead_amr"


def reference_front(problem: ProblemDef | str, count: int | None = None,
                    cache_dir: str | Path | None = None) -> np.ndarray:
    """Reference front from the CSV cache, sampled and stored on a miss."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    count = count or problem.default_front_size
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = cache / f"{problem.name}_{count}.csv"
    if path.exists():
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    front = sample_reference_front(problem, count)
    cache.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".tmp{os.getpid()}")
    save_front_csv(tmp, front)
    tmp.replace(path)
    log.info("cached reference front %s", path)
    return front


def save_front_csv(path, F) -> None:
    F = np.asarray(F, dtype=float)
    header = ",".join(f"f{j + 1}" for j in range(F.shape[1]))
    np.savetxt(Path(path), F, delimiter=",", header=header, comments="", fmt="%.17g")
