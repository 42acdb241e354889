"""HTTP service around the cost models and solvers.

Run with: uvicorn cloudviews.service.app:app
"""

from __future__ import annotations

import math

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse, Response

from .. import bench as bench_mod
from ..exact import EnumerationLimitExceeded, Objective, solve_exact
from ..grasp import GraspParams, grasp_solve
from ..lpexport import export_lp
from ..pricing import (
    StoragePeriod,
    bundled_catalog,
    bundled_catalog_names,
    catalog_to_dict,
    resolve_catalog,
)
from ..problem import baseline_breakdown, instance_from_dict, instance_to_dict
from . import schemas

app = FastAPI(
    title="cloudviews",
    description=(
        "Pay-as-you-go cost modelling and materialized-view selection for "
        "cloud data warehouses: baseline pricing, exact and GRASP solvers, "
        "instance generation, gap benchmarks, and LP export."
    ),
    version="0.1.0",
)


def _objective(spec: schemas.ObjectiveIn) -> Objective:
    if spec.kind == "mv1":
        return Objective.mv1(math.inf if spec.budget is None else spec.budget)
    if spec.kind == "mv2":
        return Objective.mv2(math.inf if spec.tmax is None else spec.tmax)
    if spec.alpha is None:
        raise ValueError("mv3 requires alpha")
    return Objective.mv3(spec.alpha)


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=422, detail=str(exc))


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.get("/catalogs", response_model=schemas.CatalogListResponse)
def list_catalogs() -> dict:
    return {"catalogs": bundled_catalog_names()}


@app.get("/catalogs/{name}")
def get_catalog(name: str) -> dict:
    try:
        return catalog_to_dict(bundled_catalog(name))
    except ValueError as exc:
        raise HTTPException(status_code=404, detail=str(exc))


@app.post("/price", response_model=schemas.CostBreakdownOut)
def price(req: schemas.PriceRequest) -> dict:
    try:
        catalog = resolve_catalog(req.catalog)
        fleet = catalog.fleet(req.fleet.type, req.fleet.count)
        periods = [StoragePeriod(p.size_gb, p.months) for p in req.periods]
        breakdown = baseline_breakdown(catalog, fleet, periods, req.hours, req.download_gb)
    except ValueError as exc:
        raise _bad_request(exc)
    return breakdown.to_dict()


@app.post("/solve", response_model=schemas.SolveResponse)
def solve(req: schemas.SolveRequest) -> dict:
    try:
        if req.method == "grasp" and req.objective.kind != "mv1":
            raise ValueError("the grasp method only supports the mv1 (budget) objective")
        instance = instance_from_dict(req.instance)
        objective = _objective(req.objective)
        if req.method == "exact":
            result = solve_exact(instance, objective, req.enum_limit)
        else:
            params = GraspParams(**req.grasp.model_dump()) if req.grasp else GraspParams()
            result = grasp_solve(instance, objective.budget, params)
    except (ValueError, EnumerationLimitExceeded) as exc:
        raise _bad_request(exc)
    return result.to_dict(instance, objective)


@app.post("/generate")
def generate(req: schemas.GenerateRequest) -> dict:
    try:
        cfg = bench_mod.GenConfig(**req.model_dump())
        instance = bench_mod.generate_instance(cfg)
    except ValueError as exc:
        raise _bad_request(exc)
    return instance_to_dict(instance)


@app.post("/bench")
def run_bench(req: schemas.BenchRequest, format: str = Query(default="json")) -> Response:
    try:
        params = GraspParams(**req.grasp.model_dump()) if req.grasp else None
        report = bench_mod.run_gap_experiment(
            sizes=[tuple(s) for s in req.sizes],
            seeds_per_size=req.seeds_per_size,
            levels=tuple(req.levels),
            master_seed=req.master_seed,
            grasp_params=params,
            enum_limit=req.enum_limit,
        )
    except ValueError as exc:
        raise _bad_request(exc)
    if format == "csv":
        return Response(content=report.to_csv(), media_type="text/csv")
    if format != "json":
        raise _bad_request(ValueError(f"unknown format {format!r}; use json or csv"))
    return Response(
        content=schemas.BenchResponse(**report.to_dict()).model_dump_json(),
        media_type="application/json",
    )


@app.post("/export-lp", response_class=PlainTextResponse)
def export_lp_endpoint(req: schemas.ExportLpRequest) -> str:
    try:
        instance = instance_from_dict(req.instance)
        objective = _objective(req.objective)
        return export_lp(instance, objective)
    except ValueError as exc:
        raise _bad_request(exc)
