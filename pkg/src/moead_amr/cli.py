"""Batch experiment harness: seed x problem x algorithm grids written to CSV.

Outputs in ``--out``:

* ``front_<problem>_<algo>_<seed>.csv``: final objective vectors, header ``f1..fm``.
* ``refpoints_<problem>_<algo>_<seed>.csv``: final reference points of AMR runs.
* ``trace_<problem>_<algo>_<seed>.csv``: per-generation IGD/HV, only with ``--trace``.
* ``metrics.csv``: one row per run with IGD, HV, table-convention HV and status.
* ``summary.csv``: one row per (problem, algorithm) with mean/std of each metric,
  the successful and failed run counts and the median-IGD seed.

Run ``k`` of a grid uses seed ``base_seed + k``, so extending ``--runs`` keeps
the earlier runs unchanged. Every file is rewritten from scratch in a fixed
order, so a rerun with the same spec reproduces it byte for byte regardless of
``--jobs``.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evolve, problems, refpoints
from .core import ParameterError
from .metrics import MetricResult, aggregate, hv_normalized, igd

log = logging.getLogger(__name__)

METRICS = ("igd", "hv", "hv_table")
TABLE_NADIR_SCALE = 1.1

# flag/config key -> (RunConfig field, parser)
_OVERRIDES = {
    "gens": ("G_max", int),
    "l": ("l", int),
    "T": ("T", int),
    "delta": ("delta", float),
    "nrep": ("n_rep", int),
    "sf": ("SF", float),
    "cr": ("CR", float),
    "pm": ("p_m", float),
    "eta": ("eta", float),
    "epsilon": ("epsilon", float),
}


def _names(text: str) -> list[str]:
    return [t.strip().lower() for t in text.split(",") if t.strip()]


def _flag(text: str) -> bool:
    v = text.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_HARNESS = {
    "problem": _names,
    "algo": _names,
    "runs": int,
    "seed": int,
    "jobs": int,
    "out": str,
    "trace": _flag,
}


@dataclass(frozen=True)
class ExperimentSpec:
    problems: list[str]
    algorithms: list[str] = field(default_factory=lambda: ["amr"])
    runs: int = 30
    base_seed: int = 0
    overrides: dict = field(default_factory=dict)
    output_dir: Path = Path("results")
    jobs: int = 1
    trace: bool = False

    def seeds(self) -> list[int]:
        return [self.base_seed + k for k in range(self.runs)]

    def run_config(self, algo: str, seed: int) -> evolve.RunConfig:
        return evolve.algo_config(algo, evolve.RunConfig(seed=seed, **self.overrides))

    def population_size(self, problem: str, algo: str = "amr") -> int:
        """N for ``problem``: the lattice size for AMR, the weight count for the baseline."""
        p = problems.get_problem(problem)
        cfg = self.run_config(algo, self.base_seed)
        target = refpoints.reference_point_count(p.m, cfg.divisions(p.m))
        if cfg.mode == "amr":
            return target
        return math.comb(evolve.baseline_divisions(p.m, target) + p.m - 1, p.m - 1)

    def validate(self) -> None:
        if self.runs < 1:
            raise ParameterError("runs must be at least 1")
        if self.jobs < 1:
            raise ParameterError("jobs must be at least 1")
        if not self.problems:
            raise ParameterError("no problem given")
        if not self.algorithms:
            raise ParameterError("no algorithm given")
        for name in self.problems:
            p = problems.get_problem(name)
            for algo in self.algorithms:
                cfg = self.run_config(algo, self.base_seed)
                cfg.validate(p.m)
                N = self.population_size(name, algo)
                if cfg.T > N:
                    raise ParameterError(f"T={cfg.T} exceeds the population size N={N} of {name}")


class UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="moead-amr",
        description="Run MOEA/D with adaptive reference points (and the MOEA/D-DE baseline) "
        "over a grid of problems, algorithms and seeds.",
    )
    ap.add_argument("--problem", help="comma-separated problem names, e.g. zdt1,glt3")
    ap.add_argument("--algo", help="comma-separated: amr, moead-de-tch, moead-de-<kind> (default amr)")
    ap.add_argument("--runs", help="independent runs per (problem, algorithm) (default 30)")
    ap.add_argument("--seed", help="base seed; run k uses seed + k (default 0)")
    ap.add_argument("--gens", help="maximal number of generations (default 500)")
    ap.add_argument("--l", help="lattice divisions per axis (default 50 for m=2, 10 for m=3)")
    ap.add_argument("--T", help="neighborhood size (default 20)")
    ap.add_argument("--delta", help="probability of mating within the neighborhood (default 0.9)")
    ap.add_argument("--nrep", help="maximal replacements per offspring (default 2)")
    ap.add_argument("--sf", help="DE scale factor (default 0.5)")
    ap.add_argument("--cr", help="DE crossover rate (default 1.0)")
    ap.add_argument("--pm", help="mutation rate (default 1/n)")
    ap.add_argument("--eta", help="polynomial mutation distribution index (default 20)")
    ap.add_argument("--epsilon", help="fraction of G_max at which reference points adapt (default 0.8)")
    ap.add_argument("--jobs", help="worker processes (default 1)")
    ap.add_argument("--out", help="output directory (default ./results)")
    ap.add_argument("--trace", help="also write per-generation IGD/HV traces (true/false)")
    ap.add_argument("--config", help="file of 'key = value' lines; flags take precedence")
    return ap


def _canonical_key(key: str) -> str:
    k = key.strip().lstrip("-").replace("_", "").replace("-", "")
    return "T" if k in ("T", "t") else k.lower()


def read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = line.split("=", 1)
        k = _canonical_key(key)
        if k not in _HARNESS and k not in _OVERRIDES:
            raise UsageError(f"{path}:{lineno}: unknown key {key.strip()!r}")
        out[k] = value.strip()
    return out


def parse_config(argv: Sequence[str] | None = None) -> ExperimentSpec:
    """Merge defaults, then config-file keys, then command-line flags.

    Raises ``UsageError`` naming the offending key on malformed input.
    """
    args = _build_parser().parse_args(argv)
    raw: dict[str, str] = {}
    if args.config:
        try:
            raw.update(read_config_file(args.config))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from exc
    for k, v in vars(args).items():
        if k != "config" and v is not None:
            raw[_canonical_key(k)] = v

    values: dict = {}
    overrides: dict = {}
    for k, v in raw.items():
        try:
            if k in _HARNESS:
                values[k] = _HARNESS[k](v)
            else:
                fname, conv = _OVERRIDES[k]
                overrides[fname] = conv(v)
        except ValueError as exc:
            raise UsageError(f"malformed value for {k!r}: {v!r}") from exc

    if "problem" not in values:
        raise UsageError("no problem given; use --problem or a 'problem' config key")
    spec = ExperimentSpec(
        problems=values["problem"],
        algorithms=values.get("algo", ["amr"]),
        runs=values.get("runs", 30),
        base_seed=values.get("seed", 0),
        overrides=overrides,
        output_dir=Path(values.get("out", "results")),
        jobs=values.get("jobs", 1),
        trace=values.get("trace", False),
    )
    try:
        spec.validate()
    except (ParameterError, problems.UnsupportedProblemError) as exc:
        raise UsageError(str(exc.args[0] if exc.args else exc)) from exc
    return spec


@dataclass
class RunOutcome:
    problem: str
    algorithm: str
    seed: int
    run_id: int
    F: np.ndarray | None
    L: np.ndarray | None
    trace: evolve.Trace | None
    error: str = ""


def _execute(task) -> RunOutcome:
    name, algo, seed, run_id, spec, reference, bounds = task
    try:
        problem = problems.get_problem(name)
        cfg = spec.run_config(algo, seed)
        res = evolve.run(problem, cfg, reference=reference, hv_bounds=bounds)
        trace = res.trace if reference is not None else None
        L = res.L if cfg.mode == "amr" else None
        return RunOutcome(name, algo, seed, run_id, res.F, L, trace)
    except Exception as exc:  # recorded in metrics.csv, not raised
        return RunOutcome(name, algo, seed, run_id, None, None, None, f"{type(exc).__name__}: {exc}")


def _fmt(v: float) -> str:
    return repr(float(v))


def median_seed(rows: list[tuple[int, float]]) -> int:
    """Seed of the median IGD; for an even count the lower middle, ties by seed."""
    ordered = sorted(rows, key=lambda t: (t[1], t[0]))
    return ordered[(len(ordered) - 1) // 2][0]


def run_experiment(spec: ExperimentSpec) -> int:
    """Execute the grid and write all CSVs; returns the number of failed runs."""
    spec.validate()
    out = Path(spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    fronts = {}
    for name in spec.problems:
        R = problems.reference_front(name)
        fronts[name] = (R, R.min(axis=0), R.max(axis=0))

    tasks = []
    for name in spec.problems:
        R, lo, hi = fronts[name]
        trace_ref = R if spec.trace else None
        trace_bounds = (lo, hi) if spec.trace else None
        for algo in spec.algorithms:
            for run_id, seed in enumerate(spec.seeds()):
                tasks.append((name, algo, seed, run_id, spec, trace_ref, trace_bounds))

    if spec.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            outcomes = list(pool.map(_execute, tasks))
    else:
        outcomes = [_execute(t) for t in tasks]

    header = "problem,algorithm,seed,run_id,igd,hv,hv_table,status\n"
    rows = []
    results: list[MetricResult] = []
    failed = 0
    for o in outcomes:
        tag = f"{o.problem}_{o.algorithm}_{o.seed}"
        if o.error:
            failed += 1
            log.error("run %s failed: %s", tag, o.error)
            status = "failed: " + o.error.replace(",", ";").replace("\n", " ")
            rows.append(f"{o.problem},{o.algorithm},{o.seed},{o.run_id},,,,{status}\n")
            continue
        R, lo, hi = fronts[o.problem]
        problems.save_front_csv(out / f"front_{tag}.csv", o.F)
        if o.L is not None:
            refpoints.save_points_csv(out / f"refpoints_{tag}.csv", o.L)
        if o.trace is not None:
            evolve.write_trace_csv(out / f"trace_{tag}.csv", o.trace)
        vals = {
            "igd": igd(o.F, R),
            "hv": hv_normalized(o.F, lo, hi),
            "hv_table": hv_normalized(o.F, lo, hi, nadir_scale=TABLE_NADIR_SCALE),
        }
        # round-trip through the written text so summary.csv matches metrics.csv exactly
        vals = {k: float(_fmt(v)) for k, v in vals.items()}
        rows.append(
            f"{o.problem},{o.algorithm},{o.seed},{o.run_id},"
            + ",".join(_fmt(vals[k]) for k in METRICS)
            + ",ok\n"
        )
        for k in METRICS:
            results.append(MetricResult(k, vals[k], o.problem, o.algorithm, o.seed, o.run_id))
    (out / "metrics.csv").write_text(header + "".join(rows))

    stats = aggregate(results)
    igd_rows: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for r in results:
        if r.metric == "igd":
            igd_rows.setdefault((r.problem, r.algorithm), []).append((r.seed, r.value))
    cols = "".join(f",{k}_mean,{k}_std" for k in METRICS)
    lines = [f"problem,algorithm,runs,failed{cols},median_igd_seed\n"]
    failures: dict[tuple[str, str], int] = {}
    for o in outcomes:
        if o.error:
            failures[(o.problem, o.algorithm)] = failures.get((o.problem, o.algorithm), 0) + 1
    for name in spec.problems:
        for algo in spec.algorithms:
            nfail = failures.get((name, algo), 0)
            if (name, algo) not in igd_rows:
                lines.append(f"{name},{algo},0,{nfail}" + "," * (2 * len(METRICS)) + ",\n")
                continue
            parts = []
            for k in METRICS:
                mean, std, count = stats[(name, algo, k)]
                parts += [_fmt(mean), _fmt(std)]
            med = median_seed(igd_rows[(name, algo)])
            lines.append(f"{name},{algo},{count},{nfail},{','.join(parts)},{med}\n")
    (out / "summary.csv").write_text("".join(lines))
    return failed


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = parse_config(argv)
    except UsageError as exc:
        _build_parser().print_usage(sys.stderr)
        print(f"moead-amr: error: {exc}", file=sys.stderr)
        return 2
    failed = run_experiment(spec)
    total = len(spec.problems) * len(spec.algorithms) * spec.runs
    log.info("%d of %d runs succeeded; results in %s", total - failed, total, spec.output_dir)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
