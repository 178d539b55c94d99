"""Benchmark harness: oracle-relative errors and timings per test problem."""
import csv
import math
import time
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .dense import EXPM_BUDGET, expm_dense
from .errors import DomainError, StarExpError
from .expm_action import ConditioningWarning, InitialConditionWarning, IntervalMap, solve_arnoldi, solve_direct
from .gallery import GallerySpec, describe, generate

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

CSV_HEADER = (
    "example_id", "n", "M", "k", "method", "rel_err_tmax",
    "rel_err_max_grid", "time_seconds", "condition_warning",
)
METHODS = ("direct", "arnoldi")
StarExpWarning = (ConditioningWarning, InitialConditionWarning)


@dataclass(frozen=True)
class ExperimentConfig:
    spec: GallerySpec
    t_max: float
    M: int
    k: int = 0
    eval_points: int = 100
    repetitions: int = 10
    oracle: str = "dense_expm"
    output: str | None = None
    t0: float = 0.0
    example_id: str = ""
    methods: tuple = ()

    def __post_init__(self):
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")
        if self.eval_points < 2:
            raise DomainError("eval_points must be >= 2")
        if self.oracle not in ("dense_expm", "none"):
            raise DomainError(f"unknown oracle {self.oracle!r}")
        for m in self.methods:
            if m not in METHODS:
                raise DomainError(f"unknown method {m!r}")
        if "arnoldi" in self.methods and self.k < 1:
            raise DomainError("the arnoldi method needs k >= 1")

    @property
    def active_methods(self):
        if self.methods:
            return tuple(self.methods)
        return METHODS if self.k > 0 else ("direct",)


@dataclass
class ResultRow:
    example_id: str
    n: int
    M: int
    k: int
    method: str
    rel_err_tmax: float
    rel_err_max_grid: float
    time_seconds: float
    condition_warning: float | None = None
    solve_seconds: float = field(default=math.nan, compare=False)
    eval_seconds: float = field(default=math.nan, compare=False)
    failure: str | None = field(default=None, compare=False)


class Oracle:
    """Dense reference values ``exp(t A) v`` on the experiment grid.

    The final-time value is one direct exponential; grid values are
    propagated with the one-step exponential ``exp(h A)``.
    """

    def __init__(self, A, v, grid):
        Ad = A.toarray() if sp.issparse(A) else np.asarray(A)
        if Ad.shape[0] > EXPM_BUDGET:
            raise DomainError(f"dense oracle limited to n <= {EXPM_BUDGET}")
        t0, t_max = grid[0], grid[-1]
        v = np.asarray(v, dtype=complex)
        self.final = expm_dense((t_max - t0) * Ad) @ v
        step = expm_dense((grid[1] - grid[0]) * Ad)
        values = np.empty((v.size, grid.size), dtype=complex)
        values[:, 0] = v
        for j in range(1, grid.size):
            values[:, j] = step @ values[:, j - 1]
        values[:, -1] = self.final
        self.grid_values = values


def _rel(err, ref):
    nref = np.linalg.norm(ref, axis=0)
    return np.linalg.norm(err, axis=0) / np.where(nref > 0, nref, 1.0)


def _solve(method, A, v, interval, cfg, M):
    if method == "direct":
        return solve_direct(A, v, interval, M)
    return solve_arnoldi(A, v, interval, M, cfg.k)


def _run_one(cfg, A, v, oracle, method, M):
    interval = IntervalMap(cfg.t0, cfg.t_max)
    grid = np.linspace(cfg.t0, cfg.t_max, cfg.eval_points)
    n = A.shape[0]
    try:
        solve_times, eval_times = [], []
        for _ in range(cfg.repetitions):
            with warnings.catch_warnings():
                for category in StarExpWarning:
                    warnings.simplefilter("ignore", category)
                start = time.perf_counter()
                sol = _solve(method, A, v, interval, cfg, M)
                mid = time.perf_counter()
                values = sol.evaluate_grid(grid)
            solve_times.append(mid - start)
            eval_times.append(time.perf_counter() - mid)
    except StarExpError as exc:
        return ResultRow(
            cfg.example_id, n, M, cfg.k, method, math.nan, math.nan, math.nan,
            failure=f"{type(exc).__name__}: {exc}",
        )
    if oracle is not None:
        rel_tmax = float(_rel(values[:, -1] - oracle.final, oracle.final))
        rel_grid = float(np.max(_rel(values - oracle.grid_values, oracle.grid_values)))
    else:
        rel_tmax = rel_grid = math.nan
    solve_s, eval_s = float(np.mean(solve_times)), float(np.mean(eval_times))
    return ResultRow(
        cfg.example_id, n, M, cfg.k, method, rel_tmax, rel_grid, solve_s + eval_s,
        condition_warning=sol.condition_estimate if (sol.condition_estimate or 0) > 1e6 else None,
        solve_seconds=solve_s, eval_seconds=eval_s,
    )


def _build(cfg):
    A, v = generate(cfg.spec)
    oracle = None
    if cfg.oracle == "dense_expm":
        oracle = Oracle(A, v, np.linspace(cfg.t0, cfg.t_max, cfg.eval_points))
    return A, v, oracle


def run_experiment(cfg):
    """Rows for every configured method; solver failures are recorded, not raised."""
    return sweep_M(cfg, [cfg.M])


def sweep_M(cfg, M_values):
    """Like :func:`run_experiment` for each ``M`` in ``M_values`` (one matrix build)."""
    A, v, oracle = _build(cfg)
    rows = []
    for M in M_values:
        for method in cfg.active_methods:
            rows.append(_run_one(cfg, A, v, oracle, method, int(M)))
    return rows


def _csv_value(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def emit_csv(rows, path):
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for row in rows:
                writer.writerow([_csv_value(getattr(row, name)) for name in CSV_HEADER])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_csv(path):
    """Parse a file written by :func:`emit_csv` back into rows."""
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise DomainError(f"unexpected CSV header {reader.fieldnames}")
        for rec in reader:
            cw = rec["condition_warning"]
            rows.append(ResultRow(
                rec["example_id"], int(rec["n"]), int(rec["M"]), int(rec["k"]), rec["method"],
                float(rec["rel_err_tmax"]), float(rec["rel_err_max_grid"]),
                float(rec["time_seconds"]), float(cw) if cw else None,
            ))
    return rows


def emit_curve(sol, grid, path):
    """CSV ``t,norm,re_0,...`` of the solution sampled on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    values = sol.evaluate_grid(grid)
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "norm"] + [f"re_{i}" for i in range(values.shape[0])])
            for j, t in enumerate(grid):
                col = values[:, j]
                writer.writerow(
                    [f"{t:.17g}", f"{np.linalg.norm(col):.17g}"] + [f"{x:.17g}" for x in col.real]
                )
    except OSError as exc:
        raise OSError(f"cannot write curve to {path}: {exc}") from exc


# configuration files

_CFG_KEYS = {f.name for f in fields(ExperimentConfig)} - {"spec"}
_SPEC_KEYS = {f.name for f in fields(GallerySpec)}


def config_from_dict(d, base_dir=None):
    d = dict(d)
    gal = dict(d.pop("gallery", None) or d.pop("spec", None) or {})
    unknown = (set(d) - _CFG_KEYS) | (set(gal) - _SPEC_KEYS)
    if unknown:
        raise DomainError(f"unknown configuration keys: {sorted(unknown)}")
    if "kind" not in gal:
        raise DomainError("configuration needs a [gallery] table with 'kind'")
    paths = tuple(gal.get("paths", ()))
    if base_dir is not None:
        paths = tuple(str((Path(base_dir) / p)) if not Path(p).is_absolute() else p for p in paths)
        if gal.get("vector_path"):
            vp = Path(gal["vector_path"])
            gal["vector_path"] = str(vp if vp.is_absolute() else Path(base_dir) / vp)
    gal["paths"] = paths
    if "methods" in d:
        d["methods"] = tuple(d["methods"])
    d["example_id"] = str(d.get("example_id", ""))
    return ExperimentConfig(spec=GallerySpec(**gal), **d)


def load_configs(path):
    """Read one or more experiments from a TOML file.

    Either a single ``[experiment]`` table or an ``[[experiment]]`` array,
    each with a nested ``gallery`` table.
    """
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise DomainError(f"{path}: invalid TOML: {exc}") from exc
    exps = data.get("experiment")
    if exps is None:
        raise DomainError(f"{path}: no [experiment] table")
    if isinstance(exps, dict):
        exps = [exps]
    return [config_from_dict(e, base_dir=path.parent) for e in exps]


def with_overrides(cfg, **kw):
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})


def config_summary(cfg):
    return {
        "example_id": cfg.example_id, "gallery": describe(cfg.spec), "t0": cfg.t0,
        "t_max": cfg.t_max, "M": cfg.M, "k": cfg.k, "methods": list(cfg.active_methods),
        "eval_points": cfg.eval_points, "repetitions": cfg.repetitions, "oracle": cfg.oracle,
    }
