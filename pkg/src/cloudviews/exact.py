"""Exact view selection by exhaustive enumeration of materialization vectors.

For a fixed materialization vector the best per-query view choice is just
the highest-gain materialized view, so enumerating the 2^n vectors with a
greedy assignment on top finds the true optimum. The enumeration could be
split across workers by vector prefix (each worker is read-only on the
instance); the deterministic tie-break makes any merge order agree with
the sequential answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pricing import StoragePeriod, eval_piecewise
from .problem import CostBreakdown, ProblemInstance, Selection, evaluate, greedy_assignment

# Absolute slack on budget/deadline checks, in USD and hours.
FEASIBILITY_TOL = 1e-6

# 2^22 vectors is the largest enumeration we accept by default.
DEFAULT_ENUM_LIMIT = 22

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"


class EnumerationLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class Objective:
    """What to optimize: min time under a budget, min cost under a deadline, or a weighted mix."""

    kind: str
    budget: float | None = None
    tmax: float | None = None
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "mv1":
            if self.budget is None or self.budget < 0:
                raise ValueError("mv1 needs a budget >= 0")
        elif self.kind == "mv2":
            if self.tmax is None or self.tmax < 0:
                raise ValueError("mv2 needs a deadline >= 0")
        elif self.kind == "mv3":
            if self.alpha is None or not (0.0 <= self.alpha <= 1.0):
                raise ValueError("mv3 needs alpha in [0, 1]")
        else:
            raise ValueError(f"unknown objective kind {self.kind!r}")

    @classmethod
    def mv1(cls, budget: float) -> "Objective":
        return cls("mv1", budget=float(budget))

    @classmethod
    def mv2(cls, tmax: float) -> "Objective":
        return cls("mv2", tmax=float(tmax))

    @classmethod
    def mv3(cls, alpha: float) -> "Objective":
        return cls("mv3", alpha=float(alpha))

    def value(self, t_proc: float, total_cost: float) -> float:
        if self.kind == "mv1":
            return t_proc
        if self.kind == "mv2":
            return total_cost
        return self.alpha * t_proc + (1.0 - self.alpha) * total_cost

    def feasible(self, t_proc: float, total_cost: float) -> bool:
        if self.kind == "mv1":
            return total_cost <= self.budget + FEASIBILITY_TOL
        if self.kind == "mv2":
            return t_proc <= self.tmax + FEASIBILITY_TOL
        return True


@dataclass(frozen=True)
class SolveResult:
    status: str
    selection: Selection | None
    breakdown: CostBreakdown | None
    explored: int

    @property
    def optimal(self) -> bool:
        return self.status == STATUS_OPTIMAL

    def objective_value(self, objective: Objective) -> float | None:
        if self.breakdown is None:
            return None
        return objective.value(self.breakdown.t_proc, self.breakdown.total_cost)

    def to_dict(self, instance: ProblemInstance, objective: Objective) -> dict:
        if self.selection is None or self.breakdown is None:
            return {
                "status": self.status,
                "objective": None,
                "t_proc_h": None,
                "cost_usd": None,
                "materialized": [],
                "assignment": {},
                "explored": self.explored,
            }
        return {
            "status": self.status,
            "objective": self.objective_value(objective),
            "t_proc_h": self.breakdown.t_proc,
            "cost_usd": self.breakdown.total_cost,
            "materialized": [instance.views[k].id for k in self.selection.materialized_indices()],
            "assignment": {
                instance.queries[qi].id: instance.views[vk].id
                for qi, vk in enumerate(self.selection.assignment)
                if vk is not None
            },
            "explored": self.explored,
        }


def selection_sort_key(t_proc_or_value: float, materialized: tuple[bool, ...]) -> tuple:
    """Ordering used everywhere ties must break the same way: value, then fewer views, then lexicographic vector."""
    return (t_proc_or_value, sum(materialized), materialized)


def solve_exact(
    instance: ProblemInstance,
    objective: Objective,
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> SolveResult:
    """Optimal selection for the given objective, by full enumeration.

    Ties break toward fewer materialized views, then the lexicographically
    smallest materialization vector, so identical inputs always give the
    identical result.
    """
    n_v = instance.n_views
    n_q = instance.n_queries
    if n_v > enum_limit:
        raise EnumerationLimitExceeded(
            f"{n_v} candidate views exceed the enumeration limit of {enum_limit}"
        )

    by_query = instance.gains.by_query
    views = instance.views
    freq = instance.frequency
    usd_per_hour = instance.fleet.instance_type.usd_per_hour
    fleet_count = instance.fleet.count
    months = instance.storage_months
    n_s = instance.catalog.storage.replication(instance.fleet)
    storage_price = instance.catalog.storage.price
    base_times = [q.base_time_h for q in instance.queries]
    c_t = eval_piecewise(instance.catalog.transfer_out, instance.download_gb)

    best_key: tuple | None = None
    best_used = 0

    for mask in range(1 << n_v):
        hours = 0.0
        used = 0
        for qi in range(n_q):
            best_gain = 0.0
            best_view = -1
            for vk, gain in by_query[qi]:
                if (mask >> vk) & 1 and gain > best_gain:
                    best_gain = gain
                    best_view = vk
            hours += base_times[qi] - best_gain
            if best_view >= 0:
                used |= 1 << best_view
        t_proc = freq * hours

        t_mat = 0.0
        t_maint = 0.0
        extra_gb = 0.0
        bits = used
        while bits:
            low = bits & -bits
            vk = low.bit_length() - 1
            view = views[vk]
            t_mat += view.mat_h
            t_maint += view.maint_h
            extra_gb += view.size_gb
            bits ^= low

        # Same operation order as evaluate(), so near-boundary feasibility
        # checks here agree with the reported breakdown.
        stored = instance.dataset_gb + extra_gb
        c_c = (t_proc + t_mat + t_maint) * usd_per_hour * fleet_count
        c_s = eval_piecewise(storage_price, stored) * months * n_s
        total_cost = c_c + c_s + c_t

        if not objective.feasible(t_proc, total_cost):
            continue
        value = objective.value(t_proc, total_cost)
        key = (value, used.bit_count(), tuple((used >> k) & 1 for k in range(n_v)))
        if best_key is None or key < best_key:
            best_key = key
            best_used = used

    explored = 1 << n_v
    if best_key is None:
        return SolveResult(STATUS_INFEASIBLE, None, None, explored)
    selection = greedy_assignment(
        instance, tuple(bool((best_used >> k) & 1) for k in range(n_v))
    )
    return SolveResult(STATUS_OPTIMAL, selection, evaluate(instance, selection), explored)


def budget_bounds(
    instance: ProblemInstance, enum_limit: int = DEFAULT_ENUM_LIMIT
) -> tuple[float, float]:
    """(cheapest achievable cost, cost of the fastest solution), both unconstrained."""
    cheapest = solve_exact(instance, Objective.mv2(math.inf), enum_limit)
    fastest = solve_exact(instance, Objective.mv1(math.inf), enum_limit)
    c_minus = cheapest.breakdown.total_cost
    c_plus = fastest.breakdown.total_cost
    if c_minus > c_plus:  # cannot happen: the fastest solution is one candidate of the cost search
        raise AssertionError("cost bounds inverted")
    return c_minus, c_plus


def budget_levels(c_minus: float, c_plus: float) -> tuple[float, float, float]:
    """Budgets 5%, 15% and 25% of the way from the cheapest to the fastest solution's cost."""
    if c_minus > c_plus:
        raise ValueError(f"reversed cost bounds: {c_minus} > {c_plus}")
    span = c_plus - c_minus
    return (c_minus + 0.05 * span, c_minus + 0.15 * span, c_minus + 0.25 * span)


def pareto_sweep(
    instance: ProblemInstance,
    alphas: list[float],
    enum_limit: int = DEFAULT_ENUM_LIMIT,
) -> list[tuple[float, SolveResult]]:
    """One weighted solve per alpha, deduplicated and pruned to non-dominated points."""
    for a in alphas:
        if not (0.0 <= a <= 1.0):
            raise ValueError(f"alpha {a} outside [0, 1]")
    picked: list[tuple[float, SolveResult]] = []
    seen: set[tuple] = set()
    for a in alphas:
        res = solve_exact(instance, Objective.mv3(a), enum_limit)
        key = (res.selection.materialized, res.selection.assignment)
        if key in seen:
            continue
        seen.add(key)
        picked.append((a, res))

    def dominated(me: SolveResult, other: SolveResult) -> bool:
        bm, bo = me.breakdown, other.breakdown
        return (
            bo.t_proc <= bm.t_proc
            and bo.total_cost <= bm.total_cost
            and (bo.t_proc < bm.t_proc or bo.total_cost < bm.total_cost)
        )

    return [
        (a, res)
        for a, res in picked
        if not any(dominated(res, other) for _, other in picked if other is not res)
    ]
