"""Randomized greedy construction plus local search for budgeted view selection.

Each restart builds a selection by repeatedly materializing one view drawn
from the best candidates by net monetary benefit, then improves it by
adding time-saving views that still fit the budget. The best restart wins.
Restarts use independent, seed-derived random substreams, so runs are
reproducible and restarts could execute concurrently without changing the
answer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exact import FEASIBILITY_TOL, STATUS_INFEASIBLE, STATUS_OPTIMAL, SolveResult
from .pricing import eval_piecewise
from .problem import (
    InvalidSelectionError,
    ProblemInstance,
    Selection,
    evaluate,
    greedy_assignment,
    validate_selection,
)


@dataclass(frozen=True)
class GraspParams:
    """Restart and candidate-list knobs; defaults follow common practice for this heuristic."""

    it_gr: int = 100
    it_rc: int = 200
    sel_rc: float = 0.1
    sel_ls: float = 0.1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.it_gr < 1 or self.it_rc < 1:
            raise ValueError("iteration counts must be >= 1")
        if not (0.0 < self.sel_rc <= 1.0) or not (0.0 < self.sel_ls <= 1.0):
            raise ValueError("candidate-list fractions must be in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")

    @classmethod
    def from_dict(cls, doc: dict) -> "GraspParams":
        allowed = {"it_gr", "it_rc", "sel_rc", "sel_ls", "seed"}
        unknown = set(doc) - allowed
        if unknown:
            raise ValueError(f"unknown grasp parameter(s): {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return {
            "it_gr": self.it_gr,
            "it_rc": self.it_rc,
            "sel_rc": self.sel_rc,
            "sel_ls": self.sel_ls,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ViewIndicator:
    """Marginal effect of materializing one more view on top of the current selection."""

    cost_usd: float   # added materialization + maintenance + storage money
    gain_h: float     # workload hours saved over the horizon
    benefit_usd: float  # value of the saved hours minus cost_usd


def indicators(instance: ProblemInstance, current: Selection) -> dict[int, ViewIndicator]:
    """Cost, gain and net benefit of each not-yet-materialized view."""
    violations = validate_selection(instance, current)
    if violations:
        raise InvalidSelectionError(violations)
    rate = instance.fleet.instance_type.usd_per_hour * instance.fleet.count
    months = instance.storage_months
    n_s = instance.catalog.storage.replication(instance.fleet)
    price = instance.catalog.storage.price

    stored = instance.dataset_gb + sum(
        instance.views[k].size_gb for k in current.materialized_indices()
    )
    stored_value = eval_piecewise(price, stored)
    current_gain = [
        0.0 if vk is None else instance.gains.gain(qi, vk)
        for qi, vk in enumerate(current.assignment)
    ]

    out: dict[int, ViewIndicator] = {}
    for vk, view in enumerate(instance.views):
        if current.materialized[vk]:
            continue
        storage_delta = (eval_piecewise(price, stored + view.size_gb) - stored_value) * months * n_s
        cost = (view.mat_h + view.maint_h) * rate + storage_delta
        fresh = 0.0
        for qi, gain in instance.gains.by_view[vk]:
            diff = gain - current_gain[qi]
            if diff > 0:
                fresh += diff
        gain_h = instance.frequency * fresh
        out[vk] = ViewIndicator(cost_usd=cost, gain_h=gain_h, benefit_usd=gain_h * rate - cost)
    return out


def _rcl_pick(ranked: list[int], fraction: float, rng: np.random.Generator) -> int:
    size = math.ceil(fraction * len(ranked))
    if size <= 1:
        return ranked[0]
    return ranked[int(rng.integers(size))]


def _with_view(instance: ProblemInstance, sel: Selection, vk: int) -> Selection:
    mask = list(sel.materialized)
    mask[vk] = True
    return greedy_assignment(instance, mask)


def construct(
    instance: ProblemInstance,
    budget: float,
    params: GraspParams,
    rng: np.random.Generator,
) -> Selection | None:
    """Greedy randomized construction of a within-budget selection.

    Starts empty and keeps materializing a randomly chosen view among the
    best positive-benefit candidates; every such step strictly lowers the
    total cost. Attempts repeat with fresh randomness until one lands
    within budget; returns None when none of them does.
    """
    for _ in range(params.it_rc):
        sel = Selection.empty(instance)
        randomized = False
        while True:
            inds = indicators(instance, sel)
            ranked = sorted(
                (k for k, ind in inds.items() if ind.benefit_usd > 0),
                key=lambda k: (-inds[k].benefit_usd, k),
            )
            if not ranked:
                break
            size = math.ceil(params.sel_rc * len(ranked))
            if size > 1:
                randomized = True
                pick = ranked[int(rng.integers(size))]
            else:
                pick = ranked[0]
            sel = _with_view(instance, sel, pick)
        if evaluate(instance, sel).total_cost <= budget + FEASIBILITY_TOL:
            return sel
        if not randomized:
            return None  # every retry would rebuild the same selection
    return None


def local_search(
    instance: ProblemInstance,
    start: Selection,
    budget: float,
    params: GraspParams,
    rng: np.random.Generator,
) -> Selection:
    """Improve response time by adding affordable views; never leaves the budget.

    Candidate moves materialize one more view with a positive time gain
    whose predicted cost keeps the selection feasible; views that stop
    serving any query are dropped after each move.
    """
    cost = evaluate(instance, start).total_cost
    if cost > budget + FEASIBILITY_TOL:
        raise ValueError("local search requires a within-budget starting selection")
    sel = start
    while True:
        inds = indicators(instance, sel)
        ranked = sorted(
            (
                k
                for k, ind in inds.items()
                if ind.gain_h > 0 and cost - ind.benefit_usd <= budget + FEASIBILITY_TOL
            ),
            key=lambda k: (-inds[k].gain_h, k),
        )
        if not ranked:
            return sel
        sel = _with_view(instance, sel, _rcl_pick(ranked, params.sel_ls, rng))
        cost = evaluate(instance, sel).total_cost


def grasp_solve(
    instance: ProblemInstance,
    budget: float,
    params: GraspParams | None = None,
) -> SolveResult:
    """Best selection over all restarts; Infeasible when no restart fits the budget."""
    params = params or GraspParams()
    best_sel: Selection | None = None
    best_bd = None
    best_key: tuple | None = None
    for round_idx in range(params.it_gr):
        rng = np.random.default_rng([params.seed, round_idx])
        sel = construct(instance, budget, params, rng)
        if sel is None:
            continue
        sel = local_search(instance, sel, budget, params, rng)
        bd = evaluate(instance, sel)
        key = (bd.t_proc, bd.total_cost, sum(sel.materialized), sel.materialized)
        if best_key is None or key < best_key:
            best_key, best_sel, best_bd = key, sel, bd
    if best_sel is None:
        return SolveResult(STATUS_INFEASIBLE, None, None, params.it_gr)
    return SolveResult(STATUS_OPTIMAL, best_sel, best_bd, params.it_gr)
