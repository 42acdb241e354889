"""Random instance generation and exact-vs-heuristic gap experiments."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .exact import Objective, budget_bounds, budget_levels, solve_exact
from .grasp import GraspParams, grasp_solve
from .pricing import bundled_catalog
from .problem import CandidateView, GainMatrix, ProblemInstance, Query

LEVELS = ("G1", "G2", "G3")

CSV_COLUMNS = [
    "n_q",
    "n_v",
    "level",
    "seed",
    "exact_ms",
    "grasp_ms",
    "exact_tproc_h",
    "grasp_tproc_h",
    "gap_pct",
    "status",
]


@dataclass(frozen=True)
class GenConfig:
    """Knobs for the random instance generator.

    Ranges are uniform; a gain exists for a (query, view) pair with
    probability gain_density and never exceeds 90% of the query's base
    time, so no query can be optimized away entirely.
    """

    n_q: int
    n_v: int
    gain_density: float = 0.3
    base_time_range: tuple[float, float] = (0.1, 2.0)
    view_size_range: tuple[float, float] = (1.0, 100.0)
    mat_time_range: tuple[float, float] = (0.05, 0.5)
    maint_time_range: tuple[float, float] = (0.01, 0.2)
    catalog: str = "ec2-s3"
    fleet_type: str = "m1.small"
    fleet_count: int = 2
    dataset_gb: float = 512.0
    storage_months: float = 1.0
    frequency: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_q < 1 or self.n_v < 1:
            raise ValueError("query and view counts must be >= 1")
        if not (0.0 < self.gain_density <= 1.0):
            raise ValueError("gain density must be in (0, 1]")
        for name in ("base_time_range", "view_size_range", "mat_time_range", "maint_time_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must satisfy 0 < low <= high")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


def generate_instance(cfg: GenConfig) -> ProblemInstance:
    """Deterministically sample an instance from the configured ranges."""
    rng = np.random.default_rng(cfg.seed)
    base_times = rng.uniform(*cfg.base_time_range, size=cfg.n_q)
    sizes = rng.uniform(*cfg.view_size_range, size=cfg.n_v)
    mat_times = rng.uniform(*cfg.mat_time_range, size=cfg.n_v)
    maint_times = rng.uniform(*cfg.maint_time_range, size=cfg.n_v)

    entries: dict[tuple[int, int], float] = {}
    for qi in range(cfg.n_q):
        cap = 0.9 * float(base_times[qi])
        for vk in range(cfg.n_v):
            if rng.random() < cfg.gain_density:
                # (1 - u) maps the half-open uniform onto (0, cap]
                entries[(qi, vk)] = float((1.0 - rng.random()) * cap)

    catalog = bundled_catalog(cfg.catalog)
    queries = tuple(Query(f"q{i + 1}", float(base_times[i])) for i in range(cfg.n_q))
    views = tuple(
        CandidateView(f"v{k + 1}", float(sizes[k]), float(mat_times[k]), float(maint_times[k]))
        for k in range(cfg.n_v)
    )
    return ProblemInstance(
        catalog=catalog,
        fleet=catalog.fleet(cfg.fleet_type, cfg.fleet_count),
        dataset_gb=cfg.dataset_gb,
        storage_months=cfg.storage_months,
        queries=queries,
        views=views,
        gains=GainMatrix(cfg.n_q, cfg.n_v, entries),
        frequency=cfg.frequency,
    )


@dataclass(frozen=True)
class GapRow:
    """One experiment cell: one instance, one budget level."""

    n_q: int
    n_v: int
    level: str
    seed: int
    exact_ms: float
    grasp_ms: float
    exact_tproc_h: float | None
    grasp_tproc_h: float | None
    gap_pct: float | None
    status: str


@dataclass(frozen=True)
class GapSummary:
    n_q: int
    n_v: int
    level: str
    seeds: int
    mean_exact_ms: float
    mean_grasp_ms: float
    mean_gap_pct: float | None
    max_gap_pct: float | None
    feasible: int


@dataclass
class GapReport:
    rows: list[GapRow] = field(default_factory=list)

    def summaries(self) -> list[GapSummary]:
        cells: dict[tuple[int, int, str], list[GapRow]] = {}
        for row in self.rows:
            cells.setdefault((row.n_q, row.n_v, row.level), []).append(row)
        out = []
        for (n_q, n_v, level), rows in cells.items():
            gaps = [r.gap_pct for r in rows if r.gap_pct is not None]
            out.append(
                GapSummary(
                    n_q=n_q,
                    n_v=n_v,
                    level=level,
                    seeds=len(rows),
                    mean_exact_ms=sum(r.exact_ms for r in rows) / len(rows),
                    mean_grasp_ms=sum(r.grasp_ms for r in rows) / len(rows),
                    mean_gap_pct=sum(gaps) / len(gaps) if gaps else None,
                    max_gap_pct=max(gaps) if gaps else None,
                    feasible=len(gaps),
                )
            )
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(
                [
                    r.n_q,
                    r.n_v,
                    r.level,
                    r.seed,
                    repr(r.exact_ms),
                    repr(r.grasp_ms),
                    "" if r.exact_tproc_h is None else repr(r.exact_tproc_h),
                    "" if r.grasp_tproc_h is None else repr(r.grasp_tproc_h),
                    "" if r.gap_pct is None else repr(r.gap_pct),
                    r.status,
                ]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GapReport":
        reader = csv.DictReader(io.StringIO(text))
        rows = []
        for rec in reader:
            rows.append(
                GapRow(
                    n_q=int(rec["n_q"]),
                    n_v=int(rec["n_v"]),
                    level=rec["level"],
                    seed=int(rec["seed"]),
                    exact_ms=float(rec["exact_ms"]),
                    grasp_ms=float(rec["grasp_ms"]),
                    exact_tproc_h=float(rec["exact_tproc_h"]) if rec["exact_tproc_h"] else None,
                    grasp_tproc_h=float(rec["grasp_tproc_h"]) if rec["grasp_tproc_h"] else None,
                    gap_pct=float(rec["gap_pct"]) if rec["gap_pct"] else None,
                    status=rec["status"],
                )
            )
        return cls(rows)

    def to_dict(self) -> dict:
        return {
            "rows": [vars(r).copy() for r in self.rows],
            "summary": [vars(s).copy() for s in self.summaries()],
        }


def cell_config(base: GenConfig, n_q: int, n_v: int, seed: int) -> GenConfig:
    """The generator configuration an experiment cell uses; exposed so results can be replayed."""
    return replace(base, n_q=n_q, n_v=n_v, seed=seed)


DEFAULT_BASE_CONFIG = GenConfig(n_q=1, n_v=1)


def run_gap_experiment(
    sizes: list[tuple[int, int]],
    seeds_per_size: int,
    levels: tuple[str, ...] = LEVELS,
    master_seed: int = 0,
    grasp_params: GraspParams | None = None,
    base_config: GenConfig = DEFAULT_BASE_CONFIG,
    enum_limit: int = 22,
) -> GapReport:
    """Solve each generated instance exactly and heuristically at each budget level.

    Budgets come from the instance's own cost bounds. Wall times are
    monotonic-clock milliseconds. Cells are independent; rows are emitted
    in declaration order.
    """
    for level in levels:
        if level not in LEVELS:
            raise ValueError(f"unknown budget level {level!r}; expected a subset of {LEVELS}")
    for n_q, n_v in sizes:
        if n_v > enum_limit:
            raise ValueError(f"size ({n_q}, {n_v}) exceeds the enumeration limit {enum_limit}")
    if seeds_per_size < 1:
        raise ValueError("seeds_per_size must be >= 1")

    master = np.random.default_rng(master_seed)
    cell_seeds = master.integers(0, 2**31 - 1, size=(len(sizes), seeds_per_size))
    rows: list[GapRow] = []
    for si, (n_q, n_v) in enumerate(sizes):
        for rep in range(seeds_per_size):
            seed = int(cell_seeds[si][rep])
            instance = generate_instance(cell_config(base_config, n_q, n_v, seed))
            c_minus, c_plus = budget_bounds(instance, enum_limit)
            budgets = dict(zip(LEVELS, budget_levels(c_minus, c_plus)))
            params = grasp_params or GraspParams(seed=seed)
            for level in levels:
                budget = budgets[level]
                t0 = time.perf_counter()
                exact = solve_exact(instance, Objective.mv1(budget), enum_limit)
                exact_ms = (time.perf_counter() - t0) * 1e3
                t0 = time.perf_counter()
                heur = grasp_solve(instance, budget, params)
                grasp_ms = (time.perf_counter() - t0) * 1e3
                if exact.optimal and heur.optimal:
                    e_t = exact.breakdown.t_proc
                    g_t = heur.breakdown.t_proc
                    rows.append(
                        GapRow(n_q, n_v, level, seed, exact_ms, grasp_ms, e_t, g_t,
                               (g_t - e_t) / e_t * 100.0, "ok")
                    )
                elif not exact.optimal and not heur.optimal:
                    rows.append(
                        GapRow(n_q, n_v, level, seed, exact_ms, grasp_ms, None, None, None, "infeasible")
                    )
                else:
                    status = "grasp_infeasible" if exact.optimal else "exact_infeasible"
                    rows.append(
                        GapRow(
                            n_q, n_v, level, seed, exact_ms, grasp_ms,
                            exact.breakdown.t_proc if exact.optimal else None,
                            heur.breakdown.t_proc if heur.optimal else None,
                            None, status,
                        )
                    )
    return GapReport(rows)
