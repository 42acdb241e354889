"""Command-line client for the cloudviews service.

All commands build an HTTP request and print the response document (JSON,
CSV or LP text) to stdout or --out; diagnostics go to stderr. Exit codes:
0 on success, 1 when a solve is infeasible, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import httpx

from .client import make_client

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


class InputError(Exception):
    pass


def _read_doc(value: str, what: str) -> dict:
    """Parse an inline JSON object or an @file reference."""
    if value.startswith("@"):
        path = Path(value[1:])
        if not path.is_file():
            raise InputError(f"{what} file not found: {path}")
        try:
            return json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise InputError(f"{what} file {path} is not valid JSON: {exc}")
    if value.lstrip().startswith("{"):
        try:
            return json.loads(value)
        except json.JSONDecodeError as exc:
            raise InputError(f"inline {what} is not valid JSON: {exc}")
    raise InputError(f"{what} must be inline JSON or an @file reference, got {value!r}")


def _catalog_ref(value: str):
    """Catalogs may additionally be referenced by bundled id."""
    if value.startswith("@") or value.lstrip().startswith("{"):
        return _read_doc(value, "catalog")
    return value


def _float_list(value: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in value.split(",")]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated numbers, got {value!r}")


def _range_pair(value: str, flag: str) -> tuple[float, float]:
    parts = _float_list(value, flag)
    if len(parts) != 2:
        raise InputError(f"{flag} expects 'low,high', got {value!r}")
    return (parts[0], parts[1])


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(body: dict, out: str | None) -> None:
    _emit(json.dumps(body, indent=2), out)


def _detail(resp: httpx.Response) -> str:
    try:
        detail = resp.json().get("detail", resp.text)
    except ValueError:
        detail = resp.text
    if isinstance(detail, str):
        return detail
    return json.dumps(detail)


def _check(resp: httpx.Response) -> None:
    if resp.status_code >= 400:
        raise InputError(f"service rejected the request ({resp.status_code}): {_detail(resp)}")


def _objective_payload(args) -> dict:
    kind = args.objective
    if args.budget is not None and kind != "mv1":
        raise InputError("--budget is only valid with --objective mv1")
    if args.tmax is not None and kind != "mv2":
        raise InputError("--tmax is only valid with --objective mv2")
    if args.alpha is not None and kind != "mv3":
        raise InputError("--alpha is only valid with --objective mv3")
    payload: dict = {"kind": kind}
    # JSON cannot carry infinity; an absent bound means unlimited on the wire.
    if kind == "mv1" and args.budget is not None:
        if math.isnan(args.budget):
            raise InputError("--budget must be a number or inf")
        if math.isfinite(args.budget):
            payload["budget"] = args.budget
    if kind == "mv2" and args.tmax is not None:
        if math.isnan(args.tmax):
            raise InputError("--tmax must be a number or inf")
        if math.isfinite(args.tmax):
            payload["tmax"] = args.tmax
    if kind == "mv3":
        if args.alpha is None:
            raise InputError("--objective mv3 requires --alpha")
        payload["alpha"] = args.alpha
    return payload


def _grasp_payload(args) -> dict | None:
    if args.grasp_params:
        return _read_doc(args.grasp_params, "grasp params")
    fields = {
        "it_gr": args.it_gr,
        "it_rc": args.it_rc,
        "sel_rc": args.sel_rc,
        "sel_ls": args.sel_ls,
        "seed": args.seed,
    }
    provided = {k: v for k, v in fields.items() if v is not None}
    return provided or None


def cmd_price(client: httpx.Client, args) -> int:
    sizes = _float_list(args.dataset_gb, "--dataset-gb")
    months = _float_list(args.months, "--months")
    if len(sizes) != len(months):
        raise InputError("--dataset-gb and --months need the same number of entries")
    payload = {
        "catalog": _catalog_ref(args.catalog),
        "fleet": {"type": args.fleet_type, "count": args.fleet_count},
        "periods": [{"size_gb": s, "months": m} for s, m in zip(sizes, months)],
        "hours": args.hours,
        "download_gb": args.download_gb,
    }
    resp = client.post("/price", json=payload)
    _check(resp)
    _emit_json(resp.json(), args.out)
    return EXIT_OK


def cmd_solve(client: httpx.Client, args) -> int:
    if args.method == "grasp" and args.objective != "mv1":
        raise InputError("--method grasp only supports --objective mv1")
    payload = {
        "instance": _read_doc(args.instance, "instance"),
        "objective": _objective_payload(args),
        "method": args.method,
    }
    if args.enum_limit is not None:
        payload["enum_limit"] = args.enum_limit
    grasp = _grasp_payload(args)
    if grasp is not None:
        payload["grasp"] = grasp
    resp = client.post("/solve", json=payload)
    _check(resp)
    body = resp.json()
    _emit_json(body, args.out)
    return EXIT_INFEASIBLE if body.get("status") == "infeasible" else EXIT_OK


def cmd_generate(client: httpx.Client, args) -> int:
    payload = {
        "n_q": args.nq,
        "n_v": args.nv,
        "gain_density": args.gain_density,
        "base_time_range": _range_pair(args.base_time_range, "--base-time-range"),
        "view_size_range": _range_pair(args.size_range, "--size-range"),
        "mat_time_range": _range_pair(args.mat_range, "--mat-range"),
        "maint_time_range": _range_pair(args.maint_range, "--maint-range"),
        "catalog": args.catalog,
        "fleet_type": args.fleet_type,
        "fleet_count": args.fleet_count,
        "dataset_gb": args.dataset_gb,
        "storage_months": args.storage_months,
        "frequency": args.frequency,
        "seed": args.seed,
    }
    resp = client.post("/generate", json=payload)
    _check(resp)
    _emit_json(resp.json(), args.out)
    return EXIT_OK


def _parse_sizes(value: str) -> list[tuple[int, int]]:
    sizes = []
    for part in value.split(","):
        try:
            nq, nv = part.lower().split("x")
            sizes.append((int(nq), int(nv)))
        except ValueError:
            raise InputError(f"--sizes expects entries like '8x8', got {part!r}")
    return sizes


def _parse_levels(value: str) -> list[str]:
    aliases = {"c1": "G1", "c2": "G2", "c3": "G3", "g1": "G1", "g2": "G2", "g3": "G3"}
    levels = []
    for part in value.split(","):
        key = part.strip().lower()
        if key not in aliases:
            raise InputError(f"unknown budget level {part!r}; use G1, G2 or G3")
        levels.append(aliases[key])
    return levels


def cmd_bench(client: httpx.Client, args) -> int:
    payload = {
        "sizes": _parse_sizes(args.sizes),
        "seeds_per_size": args.seeds,
        "levels": _parse_levels(args.levels),
        "master_seed": args.master_seed,
    }
    grasp = _grasp_payload(args)
    if grasp is not None:
        payload["grasp"] = grasp
    resp = client.post("/bench", params={"format": args.format}, json=payload)
    _check(resp)
    if args.format == "csv":
        _emit(resp.text, args.out)
    else:
        _emit_json(resp.json(), args.out)
    return EXIT_OK


def cmd_export_lp(client: httpx.Client, args) -> int:
    payload = {
        "instance": _read_doc(args.instance, "instance"),
        "objective": _objective_payload(args),
    }
    resp = client.post("/export-lp", json=payload)
    _check(resp)
    _emit(resp.text, args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("cloudviews.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def _add_objective_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--objective", required=True, choices=["mv1", "mv2", "mv3"])
    parser.add_argument("--budget", type=float, help="cost ceiling in USD for mv1 (inf allowed)")
    parser.add_argument("--tmax", type=float, help="response-time ceiling in hours for mv2 (inf allowed)")
    parser.add_argument("--alpha", type=float, help="time weight in [0,1] for mv3")


def _add_grasp_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--it-gr", type=int, help="number of restarts")
    parser.add_argument("--it-rc", type=int, help="construction attempts per restart")
    parser.add_argument("--sel-rc", type=float, help="construction candidate-list fraction")
    parser.add_argument("--sel-ls", type=float, help="local-search candidate-list fraction")
    parser.add_argument("--seed", type=int, help="random seed (default 0)")
    parser.add_argument("--grasp-params", help="grasp parameters as inline JSON or @file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudviews",
        description="Cloud cost modelling and materialized-view selection.",
    )
    parser.add_argument("--server", help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="no-view baseline cost breakdown")
    p.add_argument("--catalog", required=True, help="bundled id, inline JSON, or @file")
    p.add_argument("--fleet-type", default="m1.small")
    p.add_argument("--fleet-count", type=int, default=2)
    p.add_argument("--dataset-gb", default="0", help="stored GB; comma-separate for multiple periods")
    p.add_argument("--months", default="0", help="storage months; comma-separate for multiple periods")
    p.add_argument("--hours", type=float, default=0.0, help="total compute hours")
    p.add_argument("--download-gb", type=float, default=0.0, help="total downloaded GB")
    p.add_argument("--out")
    p.set_defaults(func=cmd_price)

    p = sub.add_parser("solve", help="select views exactly or with the grasp heuristic")
    p.add_argument("--instance", required=True, help="inline JSON or @file")
    _add_objective_flags(p)
    p.add_argument("--method", default="exact", choices=["exact", "grasp"])
    p.add_argument("--enum-limit", type=int, help="max candidate views for enumeration (default 22)")
    _add_grasp_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("generate", help="generate a random instance")
    p.add_argument("--nq", type=int, required=True, help="number of queries")
    p.add_argument("--nv", type=int, required=True, help="number of candidate views")
    p.add_argument("--gain-density", type=float, default=0.3)
    p.add_argument("--base-time-range", default="0.1,2.0")
    p.add_argument("--size-range", default="1,100")
    p.add_argument("--mat-range", default="0.05,0.5")
    p.add_argument("--maint-range", default="0.01,0.2")
    p.add_argument("--catalog", default="ec2-s3", help="bundled catalog id")
    p.add_argument("--fleet-type", default="m1.small")
    p.add_argument("--fleet-count", type=int, default=2)
    p.add_argument("--dataset-gb", type=float, default=512.0)
    p.add_argument("--storage-months", type=float, default=1.0)
    p.add_argument("--frequency", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="gap experiment: exact vs grasp over budget levels")
    p.add_argument("--sizes", default="8x8,10x10,12x12", help="comma-separated NQxNV entries")
    p.add_argument("--seeds", type=int, default=5, help="instances per size")
    p.add_argument("--levels", default="G1,G2,G3")
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--format", default="csv", choices=["csv", "json"])
    _add_grasp_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export-lp", help="write the selection program as an LP file")
    p.add_argument("--instance", required=True, help="inline JSON or @file")
    _add_objective_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "serve":
            return cmd_serve(args)
        with make_client(args.server) as client:
            return args.func(client, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
