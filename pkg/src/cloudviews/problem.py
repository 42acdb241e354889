"""Problem instances and cost evaluation for materialized-view selection.

An instance bundles a provider catalog, a fleet, a dataset, a query
workload, candidate views, and a sparse gain matrix saying how many hours
each view shaves off each query. A selection decides which views are
materialized and which single view each query uses; evaluating a selection
yields the full time and money breakdown.

Instances and selections are immutable, and evaluation is a pure function
of both, so concurrent evaluations over a shared instance are safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .pricing import (
    Fleet,
    ProviderCatalog,
    StoragePeriod,
    catalog_to_dict,
    compute_cost,
    resolve_catalog,
    storage_cost,
    transfer_cost,
)


@dataclass(frozen=True)
class Query:
    """A workload query: processing hours without any view, and result volume downloaded per run."""

    id: str
    base_time_h: float
    result_gb: float = 0.0

    def __post_init__(self) -> None:
        if self.base_time_h < 0 or self.result_gb < 0:
            raise ValueError(f"query {self.id!r}: negative time or result size")


@dataclass(frozen=True)
class CandidateView:
    """A candidate materialized view with its footprint and one-off/recurring build times."""

    id: str
    size_gb: float
    mat_h: float
    maint_h: float

    def __post_init__(self) -> None:
        if min(self.size_gb, self.mat_h, self.maint_h) < 0:
            raise ValueError(f"view {self.id!r}: negative size or time")


@dataclass(frozen=True, eq=False)
class GainMatrix:
    """Sparse (query, view) -> hours-saved map; absent pairs save nothing."""

    n_queries: int
    n_views: int
    entries: dict[tuple[int, int], float]

    def __post_init__(self) -> None:
        for (qi, vk), gain in self.entries.items():
            if not (0 <= qi < self.n_queries and 0 <= vk < self.n_views):
                raise ValueError(f"gain entry ({qi}, {vk}) out of range")
            if gain < 0:
                raise ValueError(f"gain for ({qi}, {vk}) must be >= 0")

    def gain(self, query: int, view: int) -> float:
        return self.entries.get((query, view), 0.0)

    @cached_property
    def by_query(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per query: (view, gain) pairs with gain > 0, ordered by view index."""
        rows: list[list[tuple[int, float]]] = [[] for _ in range(self.n_queries)]
        for (qi, vk), gain in sorted(self.entries.items()):
            if gain > 0:
                rows[qi].append((vk, gain))
        return tuple(tuple(r) for r in rows)

    @cached_property
    def by_view(self) -> tuple[tuple[tuple[int, float], ...], ...]:
        """Per view: (query, gain) pairs with gain > 0, ordered by query index."""
        cols: list[list[tuple[int, float]]] = [[] for _ in range(self.n_views)]
        for (qi, vk), gain in sorted(self.entries.items()):
            if gain > 0:
                cols[vk].append((qi, gain))
        return tuple(tuple(c) for c in cols)


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    catalog: ProviderCatalog
    fleet: Fleet
    dataset_gb: float
    storage_months: float
    queries: tuple[Query, ...]
    views: tuple[CandidateView, ...]
    gains: GainMatrix
    frequency: float = 1.0

    def __post_init__(self) -> None:
        if self.dataset_gb < 0:
            raise ValueError("dataset size must be >= 0")
        if self.storage_months < 0:
            raise ValueError("storage horizon must be >= 0")
        if self.frequency < 1:
            raise ValueError("workload frequency must be >= 1")
        if self.gains.n_queries != len(self.queries) or self.gains.n_views != len(self.views):
            raise ValueError("gain matrix shape does not match workload and view counts")
        for (qi, vk), gain in self.gains.entries.items():
            if gain > self.queries[qi].base_time_h:
                raise ValueError(
                    f"gain of view {self.views[vk].id!r} for query {self.queries[qi].id!r} "
                    "exceeds the query's base time"
                )

    @property
    def n_queries(self) -> int:
        return len(self.queries)

    @property
    def n_views(self) -> int:
        return len(self.views)

    @cached_property
    def download_gb(self) -> float:
        """Total result volume pulled over the horizon (selection-independent)."""
        return self.frequency * sum(q.result_gb for q in self.queries)

    def query_index(self, query_id: str) -> int:
        return self._query_ids[query_id]

    def view_index(self, view_id: str) -> int:
        return self._view_ids[view_id]

    @cached_property
    def _query_ids(self) -> dict[str, int]:
        ids = {q.id: i for i, q in enumerate(self.queries)}
        if len(ids) != len(self.queries):
            raise ValueError("duplicate query ids")
        return ids

    @cached_property
    def _view_ids(self) -> dict[str, int]:
        ids = {v.id: k for k, v in enumerate(self.views)}
        if len(ids) != len(self.views):
            raise ValueError("duplicate view ids")
        return ids


@dataclass(frozen=True)
class Selection:
    """Which views are materialized, and the single view (or None) each query uses."""

    materialized: tuple[bool, ...]
    assignment: tuple[int | None, ...]

    @classmethod
    def empty(cls, instance: ProblemInstance) -> "Selection":
        return cls((False,) * instance.n_views, (None,) * instance.n_queries)

    def materialized_indices(self) -> tuple[int, ...]:
        return tuple(k for k, on in enumerate(self.materialized) if on)


@dataclass(frozen=True)
class Violation:
    """One broken selection rule, with the indices involved."""

    code: str
    query: int | None
    view: int | None
    detail: str

    def __str__(self) -> str:
        return self.detail


@dataclass(frozen=True)
class CostBreakdown:
    """Hours and dollars for one evaluated selection."""

    t_proc: float
    t_mat: float
    t_maint: float
    total_time: float
    c_c: float
    c_s: float
    c_t: float
    total_cost: float
    stored_gb: float

    def to_dict(self) -> dict:
        return {
            "t_proc_h": self.t_proc,
            "t_mat_h": self.t_mat,
            "t_maint_h": self.t_maint,
            "total_h": self.total_time,
            "c_c": self.c_c,
            "c_s": self.c_s,
            "c_t": self.c_t,
            "total_cost": self.total_cost,
            "stored_gb": self.stored_gb,
        }


class InvalidSelectionError(ValueError):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


def validate_selection(instance: ProblemInstance, sel: Selection) -> list[Violation]:
    """All broken rules for this selection; empty list means it is valid."""
    out: list[Violation] = []
    n_q, n_v = instance.n_queries, instance.n_views
    if len(sel.materialized) != n_v:
        out.append(Violation("shape", None, None, f"materialized vector has length {len(sel.materialized)}, expected {n_v}"))
        return out
    if len(sel.assignment) != n_q:
        out.append(Violation("shape", None, None, f"assignment vector has length {len(sel.assignment)}, expected {n_q}"))
        return out
    used = [False] * n_v
    for qi, vk in enumerate(sel.assignment):
        if vk is None:
            continue
        if not (0 <= vk < n_v):
            out.append(Violation("range", qi, vk, f"query {qi} assigned out-of-range view {vk}"))
            continue
        used[vk] = True
        if not sel.materialized[vk]:
            out.append(Violation("unmaterialized", qi, vk, f"query {qi} uses view {vk} which is not materialized"))
        if instance.gains.gain(qi, vk) <= 0:
            out.append(Violation("no-gain", qi, vk, f"query {qi} assigned view {vk} with no positive gain"))
    for vk, on in enumerate(sel.materialized):
        if on and not used[vk]:
            out.append(Violation("unused", None, vk, f"view {vk} is materialized but serves no query"))
    return out


def _require_valid(instance: ProblemInstance, sel: Selection) -> None:
    violations = validate_selection(instance, sel)
    if violations:
        raise InvalidSelectionError(violations)


def greedy_assignment(instance: ProblemInstance, materialized) -> Selection:
    """Best single view per query among the given materialized set.

    Each query takes the materialized view with the largest gain (ties go
    to the lowest view index, or no view when nothing helps). Views that
    end up serving no query are dropped from the materialized set.
    """
    mask = tuple(bool(b) for b in materialized)
    if len(mask) != instance.n_views:
        raise ValueError(f"materialized vector has length {len(mask)}, expected {instance.n_views}")
    assign: list[int | None] = []
    used = [False] * instance.n_views
    for row in instance.gains.by_query:
        best_gain = 0.0
        best_view: int | None = None
        for vk, gain in row:
            if mask[vk] and gain > best_gain:
                best_gain = gain
                best_view = vk
        assign.append(best_view)
        if best_view is not None:
            used[best_view] = True
    return Selection(tuple(used), tuple(assign))


def response_time(instance: ProblemInstance, sel: Selection) -> float:
    """Workload processing hours under the selection, over the whole horizon."""
    _require_valid(instance, sel)
    total = 0.0
    for qi, (query, vk) in enumerate(zip(instance.queries, sel.assignment)):
        gain = 0.0 if vk is None else instance.gains.gain(qi, vk)
        total += query.base_time_h - gain
    return instance.frequency * total


def evaluate(instance: ProblemInstance, sel: Selection) -> CostBreakdown:
    """Full time and money breakdown for a valid selection."""
    t_proc = response_time(instance, sel)
    t_mat = 0.0
    t_maint = 0.0
    extra_gb = 0.0
    for vk in sel.materialized_indices():
        view = instance.views[vk]
        t_mat += view.mat_h
        t_maint += view.maint_h
        extra_gb += view.size_gb
    total_time = t_proc + t_mat + t_maint
    stored_gb = instance.dataset_gb + extra_gb
    c_c = compute_cost(total_time, instance.fleet)
    c_s = storage_cost(
        [StoragePeriod(stored_gb, instance.storage_months)], instance.fleet, instance.catalog
    )
    c_t = transfer_cost(instance.download_gb, instance.catalog)
    return CostBreakdown(
        t_proc=t_proc,
        t_mat=t_mat,
        t_maint=t_maint,
        total_time=total_time,
        c_c=c_c,
        c_s=c_s,
        c_t=c_t,
        total_cost=c_c + c_s + c_t,
        stored_gb=stored_gb,
    )


def baseline_breakdown(
    catalog: ProviderCatalog,
    fleet: Fleet,
    periods: list[StoragePeriod],
    hours: float,
    download_gb: float,
) -> CostBreakdown:
    """Cost of running a workload with no views at all: pure compute, storage and egress."""
    if hours < 0:
        raise ValueError("compute hours must be >= 0")
    if download_gb < 0:
        raise ValueError("downloaded volume must be >= 0")
    c_c = compute_cost(hours, fleet)
    c_s = storage_cost(periods, fleet, catalog)
    c_t = transfer_cost(download_gb, catalog)
    return CostBreakdown(
        t_proc=hours,
        t_mat=0.0,
        t_maint=0.0,
        total_time=hours,
        c_c=c_c,
        c_s=c_s,
        c_t=c_t,
        total_cost=c_c + c_s + c_t,
        stored_gb=periods[-1].size_gb if periods else 0.0,
    )


# ---------------------------------------------------------------------------
# Instance and selection document formats.
# ---------------------------------------------------------------------------


def instance_from_dict(doc: dict, base_dir: Path | None = None) -> ProblemInstance:
    """Parse the instance document format; raises ValueError on malformed input."""
    try:
        catalog = resolve_catalog(doc["catalog"], base_dir)
        fleet_doc = doc["fleet"]
        fleet = catalog.fleet(str(fleet_doc["type"]), int(fleet_doc["count"]))
        queries = tuple(
            Query(str(q["id"]), float(q["base_time_h"]), float(q.get("result_gb", 0.0)))
            for q in doc["queries"]
        )
        views = tuple(
            CandidateView(
                str(v["id"]), float(v["size_gb"]), float(v["mat_h"]), float(v["maint_h"])
            )
            for v in doc["views"]
        )
        query_ids = {q.id: i for i, q in enumerate(queries)}
        view_ids = {v.id: k for k, v in enumerate(views)}
        entries: dict[tuple[int, int], float] = {}
        for g in doc.get("gains", []):
            qid, vid = str(g["query"]), str(g["view"])
            if qid not in query_ids:
                raise ValueError(f"gain references unknown query {qid!r}")
            if vid not in view_ids:
                raise ValueError(f"gain references unknown view {vid!r}")
            entries[(query_ids[qid], view_ids[vid])] = float(g["gain_h"])
        gains = GainMatrix(len(queries), len(views), entries)
        return ProblemInstance(
            catalog=catalog,
            fleet=fleet,
            dataset_gb=float(doc["dataset_gb"]),
            storage_months=float(doc["storage_months"]),
            queries=queries,
            views=views,
            gains=gains,
            frequency=float(doc.get("frequency", 1.0)),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed instance document: {exc}") from exc


def instance_to_dict(instance: ProblemInstance) -> dict:
    gains = [
        {
            "query": instance.queries[qi].id,
            "view": instance.views[vk].id,
            "gain_h": gain,
        }
        for (qi, vk), gain in sorted(instance.gains.entries.items())
    ]
    return {
        "catalog": catalog_to_dict(instance.catalog),
        "fleet": {"type": instance.fleet.instance_type.name, "count": instance.fleet.count},
        "dataset_gb": instance.dataset_gb,
        "storage_months": instance.storage_months,
        "frequency": instance.frequency,
        "queries": [
            {"id": q.id, "base_time_h": q.base_time_h, "result_gb": q.result_gb}
            for q in instance.queries
        ],
        "views": [
            {"id": v.id, "size_gb": v.size_gb, "mat_h": v.mat_h, "maint_h": v.maint_h}
            for v in instance.views
        ],
        "gains": gains,
    }


def load_instance(path: str | Path) -> ProblemInstance:
    path = Path(path)
    return instance_from_dict(json.loads(path.read_text()), base_dir=path.parent)


def dump_instance(instance: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")


def selection_from_dict(doc: dict, instance: ProblemInstance) -> Selection:
    try:
        mask = [False] * instance.n_views
        for vid in doc.get("materialized", []):
            mask[instance.view_index(str(vid))] = True
        assign: list[int | None] = [None] * instance.n_queries
        for qid, vid in doc.get("assignment", {}).items():
            assign[instance.query_index(str(qid))] = instance.view_index(str(vid))
        return Selection(tuple(mask), tuple(assign))
    except KeyError as exc:
        raise ValueError(f"selection references unknown id: {exc}") from exc


def selection_to_dict(sel: Selection, instance: ProblemInstance) -> dict:
    return {
        "materialized": [instance.views[k].id for k in sel.materialized_indices()],
        "assignment": {
            instance.queries[qi].id: instance.views[vk].id
            for qi, vk in enumerate(sel.assignment)
            if vk is not None
        },
    }
