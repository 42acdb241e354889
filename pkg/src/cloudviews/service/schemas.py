"""Request and response models for the HTTP API.

Domain documents (catalogs, instances) travel as plain JSON objects in the
shapes the core loaders define; everything around them is validated here.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class FleetIn(BaseModel):
    type: str
    count: int = Field(ge=1)


class PeriodIn(BaseModel):
    size_gb: float = Field(ge=0)
    months: float = Field(ge=0)


class PriceRequest(BaseModel):
    catalog: str | dict
    fleet: FleetIn
    periods: list[PeriodIn] = []
    hours: float = Field(default=0.0, ge=0)
    download_gb: float = Field(default=0.0, ge=0)


class CostBreakdownOut(BaseModel):
    t_proc_h: float
    t_mat_h: float
    t_maint_h: float
    total_h: float
    c_c: float
    c_s: float
    c_t: float
    total_cost: float
    stored_gb: float


class ObjectiveIn(BaseModel):
    kind: Literal["mv1", "mv2", "mv3"]
    budget: float | None = None  # omitted means unlimited
    tmax: float | None = None  # omitted means unlimited
    alpha: float | None = None


class GraspParamsIn(BaseModel):
    it_gr: int = Field(default=100, ge=1)
    it_rc: int = Field(default=200, ge=1)
    sel_rc: float = Field(default=0.1, gt=0, le=1)
    sel_ls: float = Field(default=0.1, gt=0, le=1)
    seed: int = Field(default=0, ge=0)


class SolveRequest(BaseModel):
    instance: dict
    objective: ObjectiveIn
    method: Literal["exact", "grasp"] = "exact"
    grasp: GraspParamsIn | None = None
    enum_limit: int = Field(default=22, ge=0)


class SolveResponse(BaseModel):
    status: Literal["optimal", "infeasible"]
    objective: float | None
    t_proc_h: float | None
    cost_usd: float | None
    materialized: list[str]
    assignment: dict[str, str]
    explored: int


class GenerateRequest(BaseModel):
    n_q: int = Field(ge=1)
    n_v: int = Field(ge=1)
    gain_density: float = Field(default=0.3, gt=0, le=1)
    base_time_range: tuple[float, float] = (0.1, 2.0)
    view_size_range: tuple[float, float] = (1.0, 100.0)
    mat_time_range: tuple[float, float] = (0.05, 0.5)
    maint_time_range: tuple[float, float] = (0.01, 0.2)
    catalog: str = "ec2-s3"
    fleet_type: str = "m1.small"
    fleet_count: int = Field(default=2, ge=1)
    dataset_gb: float = Field(default=512.0, ge=0)
    storage_months: float = Field(default=1.0, ge=0)
    frequency: float = Field(default=1.0, ge=1)
    seed: int = Field(default=0, ge=0)


class BenchRequest(BaseModel):
    sizes: list[tuple[int, int]]
    seeds_per_size: int = Field(default=5, ge=1)
    levels: list[Literal["G1", "G2", "G3"]] = ["G1", "G2", "G3"]
    master_seed: int = Field(default=0, ge=0)
    grasp: GraspParamsIn | None = None
    enum_limit: int = Field(default=22, ge=0)


class GapRowOut(BaseModel):
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


class GapSummaryOut(BaseModel):
    n_q: int
    n_v: int
    level: str
    seeds: int
    mean_exact_ms: float
    mean_grasp_ms: float
    mean_gap_pct: float | None
    max_gap_pct: float | None
    feasible: int


class BenchResponse(BaseModel):
    rows: list[GapRowOut]
    summary: list[GapSummaryOut]


class ExportLpRequest(BaseModel):
    instance: dict
    objective: ObjectiveIn


class CatalogListResponse(BaseModel):
    catalogs: list[str]
