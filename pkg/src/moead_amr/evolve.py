"""Steady-state decomposition loop with adaptive reference points, plus the
classic MOEA/D-DE baseline.

Random stream contract
----------------------
A run owns one ``numpy.random.Generator`` seeded with ``config.seed``. It first
draws the initial population (``rng.random((N, n))``). Each generation then
pre-draws, in this order:

1. ``u_pool``  shape ``(N,)``, mating pool is the neighborhood iff ``u <= delta``
2. ``u_par``   shape ``(N, 2)``, parent positions inside the pool
3. ``u_cr``    shape ``(N, n)``, DE crossover mask
4. ``u_pm``    shape ``(N, n)``, mutation mask
5. ``u_sig``   shape ``(N, n)``, mutation magnitude
6. ``u_rep``   shape ``(sum of pool sizes,)``, partial Fisher-Yates replacement order

Offspring are compared after normalizing with the best values seen so far and
the worst values of the current population. By default (``nadir_rule=2``) an
offspring that no member weakly dominates also widens that nadir for its own
comparisons, so a newly reached front segment is not judged on a scale the
population has already shrunk past.

The adaptation event, when it runs, draws its pair choices from the same
stream after the generation's arrays. Because nothing drawn depends on the
state, the compiled and pure-Python kernels consume identical numbers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from . import refpoints
from ._backend import BACKEND, MODES, kernels
from .core import Bounds, ContractError, IdealNadir, ParameterError
from .metrics import hv_normalized, igd
from .problems import ProblemDef
from .scalarize import NORM_EPS, PSParams, ScalarizerSpec, classic_scalarize, ps_scalarize_normalized

log = logging.getLogger(__name__)

BASELINE_KINDS = ("WS", "TCH", "PBI", "aTCH", "mTCH", "rTCH", "Lp", "MSF", "pTCH")
WEIGHT_FLOOR = 1e-6
NADIR_POPULATION, NADIR_WITH_OFFSPRING, NADIR_NONDOMINATED = 0, 1, 2
_CADENCE = "population nadir per generation and after every replacement batch"
NADIR_REFRESH = {
    NADIR_POPULATION: _CADENCE,
    NADIR_WITH_OFFSPRING: _CADENCE + ", widened by each offspring",
    NADIR_NONDOMINATED: _CADENCE + ", widened by each offspring no member weakly dominates",
}


@dataclass(frozen=True)
class RunConfig:
    """Algorithm knobs. ``None`` means "derive from the problem"."""

    l: int | None = None
    T: int = 20
    delta: float = 0.9
    n_rep: int = 2
    SF: float = 0.5
    CR: float = 1.0
    p_m: float | None = None
    eta: float = 20.0
    epsilon: float = 0.8
    G_max: int = 500
    seed: int = 0
    mode: str = "amr"
    scalarizer: str = "TCH"
    direction: tuple[float, ...] | None = None
    theta: float = 5.0
    rho: float = 0.01
    p: float = 2.0
    beta: float = 1.0
    population: int | None = None
    nadir_rule: int = NADIR_NONDOMINATED
    promising_rtol: float = refpoints.PROMISING_RTOL

    def validate(self, m: int) -> None:
        if self.mode not in ("amr", "baseline"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.mode == "baseline" and self.scalarizer not in BASELINE_KINDS:
            raise ParameterError(f"unknown baseline scalarizer {self.scalarizer!r}")
        for name in ("delta", "CR"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name}={v} must lie in [0, 1]")
        if self.p_m is not None and not 0.0 <= self.p_m <= 1.0:
            raise ParameterError(f"p_m={self.p_m} must lie in [0, 1]")
        if not 0.0 < self.epsilon <= 1.0:
            raise ParameterError(f"epsilon={self.epsilon} must lie in (0, 1]")
        if self.n_rep < 1:
            raise ParameterError("n_rep must be at least 1")
        if self.eta <= 0:
            raise ParameterError("eta must be positive")
        if self.G_max < 0:
            raise ParameterError("G_max must be nonnegative")
        if self.T < 2:
            raise ParameterError("T must be at least 2 so two distinct parents exist")
        if self.nadir_rule not in (NADIR_POPULATION, NADIR_WITH_OFFSPRING, NADIR_NONDOMINATED):
            raise ParameterError(f"nadir_rule={self.nadir_rule} must be 0, 1 or 2")
        if not 0.0 <= self.promising_rtol < 1.0:
            raise ParameterError("promising_rtol must lie in [0, 1)")
        if self.l is not None and self.l < 1:
            raise ParameterError("l must be at least 1")
        if self.direction is not None:
            r = np.asarray(self.direction, dtype=float)
            if r.shape != (m,) or not np.all(r > 0):
                raise ParameterError("direction must have m strictly positive components")

    def divisions(self, m: int) -> int:
        return self.l if self.l is not None else (50 if m == 2 else 10)

    def mutation_rate(self, n: int) -> float:
        return self.p_m if self.p_m is not None else 1.0 / n

    def adaptation_generation(self) -> int:
        return math.ceil(self.epsilon * self.G_max)


@dataclass
class AlgoState:
    gen: int
    X: np.ndarray
    F: np.ndarray
    L: np.ndarray  # reference points (AMR) or weight vectors (baseline)
    B: np.ndarray
    z_star: np.ndarray
    z_nad: np.ndarray
    rng: np.random.Generator

    @property
    def ideal_nadir(self) -> IdealNadir:
        return IdealNadir(self.z_star.copy(), self.z_nad.copy())


@dataclass
class AdaptationInfo:
    generation: int
    promising: int
    invoked: bool
    skipped: bool = False


@dataclass
class Trace:
    z_star: list[np.ndarray] = field(default_factory=list)
    replacements: list[np.ndarray] = field(default_factory=list)
    degenerate: list[np.ndarray] = field(default_factory=list)
    igd: list[float] = field(default_factory=list)
    hv: list[float] = field(default_factory=list)
    adaptation: AdaptationInfo | None = None
    nadir_refresh: str = _CADENCE


@dataclass
class RunResult:
    X: np.ndarray
    F: np.ndarray
    L: np.ndarray
    B: np.ndarray
    trace: Trace
    backend: str


# reference operators; the kernels fuse the same steps


def de_mutation(xi, xv1, xv2, SF: float, CR: float, rng=None, u=None) -> np.ndarray:
    """DE/rand/1 with binomial mask ``u < CR``; ``u`` may be supplied explicitly."""
    xi, xv1, xv2 = (np.asarray(v, dtype=float) for v in (xi, xv1, xv2))
    if u is None:
        u = rng.random(xi.shape)
    return np.where(np.asarray(u) < CR, xi + SF * (xv1 - xv2), xi)


def pm_sigma(u, eta: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    e = 1.0 / (1.0 + eta)
    lo = np.power(2.0 * np.minimum(u, 0.5), e) - 1.0
    hi = 1.0 - np.power(2.0 - 2.0 * np.maximum(u, 0.5), e)
    return np.where(u < 0.5, lo, hi)


def polynomial_mutation(y_bar, p_m: float, eta: float, bounds: Bounds, rng=None,
                        u_mask=None, u_sigma=None) -> np.ndarray:
    y = np.asarray(y_bar, dtype=float)
    if u_mask is None:
        u_mask = rng.random(y.shape)
    if u_sigma is None:
        u_sigma = rng.random(y.shape)
    step = pm_sigma(u_sigma, eta) * (bounds.upper - bounds.lower)
    return np.where(np.asarray(u_mask) < p_m, y + step, y)


def repair(y, bounds: Bounds) -> np.ndarray:
    return np.clip(np.asarray(y, dtype=float), bounds.lower, bounds.upper)


def select_mating_pool(i: int, B, N: int, delta: float, rng=None, u_pool=None,
                       u_par=None) -> tuple[np.ndarray, int, int]:
    """Return ``(V, v1, v2)`` with ``v1 != v2`` drawn uniformly from ``V``."""
    if u_pool is None:
        u_pool = rng.random()
    if u_par is None:
        u_par = rng.random(2)
    V = np.asarray(B[i]) if u_pool <= delta else np.arange(N)
    s = len(V)
    k1 = min(int(u_par[0] * s), s - 1)
    k2 = min(int(u_par[1] * (s - 1)), s - 2)
    if k2 >= k1:
        k2 += 1
    return V, int(V[k1]), int(V[k2])


def comparison_nadir(fy, F, z_star, z_nad, rule: int) -> np.ndarray:
    """Nadir used to normalize the comparisons of offspring ``fy``.

    Rule 0 is the population nadir, rule 1 widens it by ``fy``, rule 2 widens
    it by ``fy`` only when no population member weakly dominates ``fy``. The
    rule-2 test allows a slack of ``NORM_EPS`` times the objective span, so a
    member better by rounding noise alone still counts as dominating.
    """
    fy = np.asarray(fy, dtype=float)
    z_nad = np.asarray(z_nad, dtype=float)
    if rule == NADIR_POPULATION:
        return z_nad
    if rule == NADIR_NONDOMINATED:
        tol = NORM_EPS * np.maximum(z_nad - np.asarray(z_star, dtype=float), NORM_EPS)
        if np.any(np.all(np.asarray(F) <= fy + tol, axis=1)):
            return z_nad
    return np.maximum(z_nad, fy)


def update_solutions(y, fy, V, state: AlgoState, n_rep: int, value, rng=None, u_rep=None,
                     nadir_rule: int = 0) -> int:
    """Replace at most ``n_rep`` members of ``V`` that ``y`` matches or beats.

    ``value(f, j, zn)`` is the subproblem-``j`` scalarizing value. Visits ``V``
    in a random order (partial Fisher-Yates on ``u_rep``) and returns the
    replacement count. The nadir estimate is refreshed after any replacement.
    """
    perm = list(np.asarray(V).tolist())
    s = len(perm)
    if u_rep is None:
        u_rep = rng.random(s)
    state.z_star = np.minimum(state.z_star, fy)
    z_nad = comparison_nadir(fy, state.F, state.z_star, state.z_nad, nadir_rule)
    zn = IdealNadir(state.z_star, z_nad)
    c = 0
    for k in range(s):
        if c >= n_rep:
            break
        j = min(k + int(u_rep[k] * (s - k)), s - 1)
        perm[k], perm[j] = perm[j], perm[k]
        idx = perm[k]
        if value(fy, idx, zn) <= value(state.F[idx], idx, zn):
            state.X[idx] = y
            state.F[idx] = fy
            c += 1
    if c:
        state.z_nad = state.F.max(axis=0)
    return c


def das_dennis_weights(m: int, H: int) -> np.ndarray:
    """Simplex-lattice weights with zero components floored at 1e-6 and renormalized."""
    if H < 1:
        raise ParameterError("H must be at least 1")
    rows = []
    for bars in combinations(range(H + m - 1), m - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(H + m - 2 - prev)
        rows.append(parts)
    W = np.array(rows, dtype=float) / H
    W = np.where(W == 0, WEIGHT_FLOOR, W)
    return W / W.sum(axis=1, keepdims=True)


def baseline_divisions(m: int, target: int) -> int:
    """Lattice resolution whose weight count is closest to ``target`` (smaller on ties)."""
    best, best_gap = 1, None
    for H in range(1, 10 * target + 1):
        count = math.comb(H + m - 1, m - 1)
        gap = abs(count - target)
        if best_gap is None or gap < best_gap:
            best, best_gap = H, gap
        if count > target:
            break
    return best


def subproblem_value(config: RunConfig, A: np.ndarray, r: np.ndarray):
    """Subproblem scalarizing value built from the scalarize module (reference path)."""
    if config.mode == "amr":
        return lambda f, j, zn: ps_scalarize_normalized(f, PSParams(A[j], r), zn)

    def value(f, j, zn):
        kind = config.scalarizer
        spec = ScalarizerSpec(kind, w=A[j], theta=config.theta, rho=config.rho, p=config.p,
                              beta=config.beta, lam=A[j] if kind == "pTCH" else None)
        return classic_scalarize(f, spec, zn)

    return value


def _kernel_weights(config: RunConfig, W: np.ndarray) -> np.ndarray:
    if config.mode == "baseline" and config.scalarizer == "pTCH":
        return W / np.linalg.norm(W, ord=config.p, axis=1, keepdims=True)
    return W


def _evaluate_all(problem: ProblemDef, X: np.ndarray) -> np.ndarray:
    if problem.kernel_id >= 0:
        return kernels.evaluate_batch(problem.kernel_id, np.ascontiguousarray(X), problem.m)
    return np.array([problem.evaluator(x) for x in X], dtype=float).reshape(len(X), problem.m)


def initialize(problem: ProblemDef, config: RunConfig) -> AlgoState:
    m, n = problem.m, problem.n
    config.validate(m)
    if config.mode == "amr":
        L = refpoints.generate_reference_points(m, config.divisions(m))
    else:
        target = config.population or refpoints.reference_point_count(m, config.divisions(m))
        L = das_dennis_weights(m, baseline_divisions(m, target))
    N = len(L)
    if config.T > N:
        raise ParameterError(f"neighborhood size T={config.T} exceeds population size N={N}")
    B = refpoints.compute_neighborhoods(L, config.T)
    rng = np.random.default_rng(config.seed)
    lo, up = problem.bounds.lower, problem.bounds.upper
    X = lo + (up - lo) * rng.random((N, n))
    F = _evaluate_all(problem, X)
    return AlgoState(0, X, F, L, B, F.min(axis=0), F.max(axis=0), rng)


def step(state: AlgoState, problem: ProblemDef, config: RunConfig, r: np.ndarray) -> np.ndarray:
    """One generation in place; returns the per-offspring replacement counts."""
    N, n = state.X.shape
    T = state.B.shape[1]
    rng = state.rng
    u_pool = rng.random(N)
    u_par = rng.random((N, 2))
    u_cr = rng.random((N, n))
    u_pm = rng.random((N, n))
    u_sig = rng.random((N, n))
    sizes = np.where(u_pool <= config.delta, T, N)
    u_rep = rng.random(int(sizes.sum()))
    mode = MODES["PSnorm"] if config.mode == "amr" else MODES[config.scalarizer]
    counts = np.zeros(N, dtype=np.intp)
    A = np.ascontiguousarray(_kernel_weights(config, state.L))
    kernels.run_generation(
        state.X, state.F, A, np.ascontiguousarray(state.B, dtype=np.intp), state.z_star,
        state.z_nad, problem.bounds.lower, problem.bounds.upper, u_pool, u_par, u_cr, u_pm,
        u_sig, u_rep, float(config.delta), int(config.n_rep), float(config.SF),
        float(config.CR), float(config.mutation_rate(n)), float(config.eta), mode, r,
        float(config.theta), float(config.rho), float(config.p), float(config.beta),
        int(problem.kernel_id), problem.evaluator, counts, int(config.nadir_rule),
    )
    state.gen += 1
    return counts


def adapt(state: AlgoState, config: RunConfig) -> AdaptationInfo:
    """Identify promising reference points and, if some were lost, refill the lattice."""
    N = len(state.L)
    part = refpoints.identify_promising(
        state.L, state.X, state.F, state.z_star, state.z_nad, config.promising_rtol
    )
    k = len(part.points)
    if k == N:
        state.B = refpoints.compute_neighborhoods(state.L, config.T)
        return AdaptationInfo(state.gen, k, invoked=False)
    L, X, F, B = refpoints.add_new_reference_points(
        part, state.L, state.X, state.F, N, config.T, state.rng, state.z_star, state.z_nad
    )
    skipped = L is state.L
    state.L, state.X, state.F, state.B = L, np.ascontiguousarray(X), np.ascontiguousarray(F), B
    state.z_nad = state.F.max(axis=0)
    return AdaptationInfo(state.gen, k, invoked=True, skipped=skipped)


def run(problem: ProblemDef, config: RunConfig, reference=None, hv_bounds=None) -> RunResult:
    """Run the full loop.

    With ``reference`` given, the trace records IGD per generation; with
    ``hv_bounds=(ideal, nadir)`` as well, normalized HV too.
    """
    state = initialize(problem, config)
    m = problem.m
    r = np.ones(m) if config.direction is None else np.asarray(config.direction, dtype=float)
    r = np.ascontiguousarray(r)
    trace = Trace(nadir_refresh=NADIR_REFRESH[config.nadir_rule])
    t_adapt = config.adaptation_generation()
    for _ in range(config.G_max):
        counts = step(state, problem, config, r)
        trace.replacements.append(counts)
        if config.mode == "amr" and state.gen == t_adapt:
            trace.adaptation = adapt(state, config)
        trace.z_star.append(state.z_star.copy())
        trace.degenerate.append((state.z_nad - state.z_star) < NORM_EPS)
        if reference is not None:
            trace.igd.append(igd(state.F, reference))
            if hv_bounds is not None:
                trace.hv.append(hv_normalized(state.F, *hv_bounds))
    if not np.all((state.X >= problem.bounds.lower) & (state.X <= problem.bounds.upper)):
        raise ContractError("population left the decision bounds")
    return RunResult(state.X, state.F, state.L, state.B, trace, BACKEND)


def algo_config(algo: str, base: RunConfig) -> RunConfig:
    """Map an algorithm name (``amr`` or ``moead-de-<kind>``) onto a config."""
    name = algo.lower()
    if name == "amr":
        return replace(base, mode="amr")
    if name.startswith("moead-de"):
        kind = name[len("moead-de"):].lstrip("-") or "tch"
        lookup = {k.lower(): k for k in BASELINE_KINDS}
        if kind not in lookup:
            raise ParameterError(f"unknown baseline scalarizer in {algo!r}")
        return replace(base, mode="baseline", scalarizer=lookup[kind])
    raise ParameterError(f"unknown algorithm {algo!r}")


def write_trace_csv(path, trace: Trace) -> None:
    """Per-generation ``gen,igd,hv`` rows; ``hv`` is empty when it was not tracked."""
    with open(path, "w", newline="") as fh:
        fh.write("gen,igd,hv\n")
        for g, v in enumerate(trace.igd, start=1):
            h = repr(float(trace.hv[g - 1])) if g <= len(trace.hv) else ""
            fh.write(f"{g},{float(v)!r},{h}\n")
