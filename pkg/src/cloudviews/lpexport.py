"""Writer for the view-selection program in LP text format.

The emitted model is fully linear: the tiered storage tariff is expanded
over the segments that the reachable stored size can touch, with one
selector binary and one load variable per segment. Files use the plain
"Minimize / Subject To / Bounds / Binary / End" dialect accepted by
mainstream MIP solvers; no solver is bundled.

Variable names are deterministic: x_<query>_<view> and y_<view> (1-based),
z_<segment> and u_<segment> for the storage expansion, plus named
continuous totals (t_proc, c_total, ...).
"""

from __future__ import annotations

from pathlib import Path
from typing import IO

from .exact import Objective, SolveResult
from .pricing import PriceSegment, eval_piecewise
from .problem import ProblemInstance

_WRAP_COLUMN = 200


def _num(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _format_expr(terms: list[tuple[float, str]]) -> str:
    parts: list[str] = []
    for coef, var in terms:
        if coef == 0.0:
            continue
        mag = abs(coef)
        body = var if mag == 1.0 else f"{_num(mag)} {var}"
        if not parts:
            parts.append(body if coef > 0 else f"- {body}")
        else:
            parts.append(f"{'+' if coef > 0 else '-'} {body}")
    if not parts:  # all coefficients cancelled; keep a syntactically valid zero term
        parts.append(f"0 {terms[0][1]}")
    return " ".join(parts)


def _wrap(line: str) -> str:
    if len(line) <= _WRAP_COLUMN:
        return line
    # break at token boundaries; LP readers accept arbitrary line breaks
    tokens = line.split(" ")
    lines: list[str] = []
    cur = ""
    for tok in tokens:
        if cur and len(cur) + 1 + len(tok) > _WRAP_COLUMN:
            lines.append(cur)
            cur = "   " + tok
        else:
            cur = tok if not cur else cur + " " + tok
    lines.append(cur)
    return "\n".join(lines)


def _format_row(name: str, terms: list[tuple[float, str]], op: str, rhs: float) -> str:
    return _wrap(f" {name}: {_format_expr(terms)} {op} {_num(rhs)}")


def _storage_plan(instance: ProblemInstance) -> tuple[str, list[tuple[PriceSegment, float]]]:
    """Which tariff segments the model needs, with each segment's usable width.

    With no candidate views the stored size is a constant, so its single
    containing segment suffices; otherwise all segments below the maximum
    reachable size take part.
    """
    price = instance.catalog.storage.price
    if instance.n_views == 0:
        return "linear", [(price.segment_at(instance.dataset_gb), 0.0)]
    s_max = instance.dataset_gb + sum(v.size_gb for v in instance.views)
    included = [s for s in price.segments if s.start_gb < s_max or s.start_gb == 0.0]
    if len(included) == 1:
        return "linear", [(included[0], s_max)]
    plan: list[tuple[PriceSegment, float]] = []
    for idx, seg in enumerate(included):
        end = included[idx + 1].start_gb if idx + 1 < len(included) else s_max
        plan.append((seg, end - seg.start_gb))
    return "pwl", plan


def export_lp(
    instance: ProblemInstance,
    objective: Objective,
    destination: str | Path | IO[str] | None = None,
) -> str:
    """Render the selection program as LP text; optionally write it out."""
    n_v = instance.n_views
    freq = instance.frequency
    rate = instance.fleet.instance_type.usd_per_hour * instance.fleet.count
    months = instance.storage_months
    n_s = instance.catalog.storage.replication(instance.fleet)
    c_t = eval_piecewise(instance.catalog.transfer_out, instance.download_gb)

    def xname(qi: int, vk: int) -> str:
        return f"x_{qi + 1}_{vk + 1}"

    def yname(vk: int) -> str:
        return f"y_{vk + 1}"

    gain_entries = [
        (qi, vk, gain)
        for qi, row in enumerate(instance.gains.by_query)
        for vk, gain in row
    ]

    rows: list[str] = []

    # at most one view per query
    for qi, row in enumerate(instance.gains.by_query):
        if row:
            rows.append(
                _format_row(f"assign_{qi + 1}", [(1.0, xname(qi, vk)) for vk, _ in row], "<=", 1.0)
            )
    # a used view must be materialized
    for qi, vk, _ in gain_entries:
        rows.append(
            _format_row(f"link_{qi + 1}_{vk + 1}", [(1.0, xname(qi, vk)), (-1.0, yname(vk))], "<=", 0.0)
        )
    # a materialized view must serve at least one query
    for vk in range(n_v):
        users = instance.gains.by_view[vk]
        terms = [(1.0, yname(vk))] + [(-1.0, xname(qi, vk)) for qi, _ in users]
        rows.append(_format_row(f"used_{vk + 1}", terms, "<=", 0.0))

    base_hours = freq * sum(q.base_time_h for q in instance.queries)
    rows.append(
        _format_row(
            "t_proc_def",
            [(1.0, "t_proc")] + [(freq * gain, xname(qi, vk)) for qi, vk, gain in gain_entries],
            "=",
            base_hours,
        )
    )
    rows.append(
        _format_row(
            "t_mat_def",
            [(1.0, "t_mat")] + [(-v.mat_h, yname(k)) for k, v in enumerate(instance.views)],
            "=",
            0.0,
        )
    )
    rows.append(
        _format_row(
            "t_maint_def",
            [(1.0, "t_maint")] + [(-v.maint_h, yname(k)) for k, v in enumerate(instance.views)],
            "=",
            0.0,
        )
    )
    rows.append(
        _format_row(
            "c_c_def",
            [(1.0, "c_c"), (-rate, "t_proc"), (-rate, "t_mat"), (-rate, "t_maint")],
            "=",
            0.0,
        )
    )
    rows.append(
        _format_row(
            "size_def",
            [(1.0, "s_stored")] + [(-v.size_gb, yname(k)) for k, v in enumerate(instance.views)],
            "=",
            instance.dataset_gb,
        )
    )

    kind, plan = _storage_plan(instance)
    binaries = [xname(qi, vk) for qi, vk, _ in gain_entries] + [yname(k) for k in range(n_v)]
    bounds: list[str] = []
    if kind == "linear":
        seg = plan[0][0]
        per_gb = seg.usd_per_gb * months * n_s
        intercept = (seg.base_usd - seg.usd_per_gb * seg.start_gb) * months * n_s
        rows.append(_format_row("c_s_def", [(1.0, "c_s"), (-per_gb, "s_stored")], "=", intercept))
    else:
        znames = [f"z_{e + 1}" for e in range(len(plan))]
        unames = [f"u_{e + 1}" for e in range(len(plan))]
        rows.append(_format_row("seg_pick", [(1.0, z) for z in znames], "=", 1.0))
        for e, (seg, width) in enumerate(plan):
            rows.append(
                _format_row(f"seg_load_{e + 1}", [(1.0, unames[e]), (-width, znames[e])], "<=", 0.0)
            )
            bounds.append(f" {unames[e]} <= {_num(width)}")
        size_terms = [(1.0, "s_stored")]
        size_terms += [(-seg.start_gb, znames[e]) for e, (seg, _) in enumerate(plan)]
        size_terms += [(-1.0, u) for u in unames]
        rows.append(_format_row("seg_size", size_terms, "=", 0.0))
        cs_terms = [(1.0, "c_s")]
        cs_terms += [(-(seg.base_usd * months * n_s), znames[e]) for e, (seg, _) in enumerate(plan)]
        cs_terms += [(-(seg.usd_per_gb * months * n_s), unames[e]) for e, (seg, _) in enumerate(plan)]
        rows.append(_format_row("c_s_def", cs_terms, "=", 0.0))
        binaries += znames

    rows.append(_format_row("c_total_def", [(1.0, "c_total"), (-1.0, "c_c"), (-1.0, "c_s")], "=", c_t))

    if objective.kind == "mv1":
        obj_terms = [(1.0, "t_proc")]
        if objective.budget != float("inf"):
            rows.append(_format_row("budget", [(1.0, "c_total")], "<=", objective.budget))
    elif objective.kind == "mv2":
        obj_terms = [(1.0, "c_total")]
        if objective.tmax != float("inf"):
            rows.append(_format_row("deadline", [(1.0, "t_proc")], "<=", objective.tmax))
    else:
        obj_terms = [(objective.alpha, "t_proc"), (1.0 - objective.alpha, "c_total")]

    lines = [f"\\Problem name: view_selection_{objective.kind}"]
    lines.append("Minimize")
    lines.append(_wrap(f" obj: {_format_expr(obj_terms)}"))
    lines.append("Subject To")
    lines.extend(rows)
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    if binaries:
        lines.append("Binary")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    text = "\n".join(lines) + "\n"

    if destination is not None:
        if hasattr(destination, "write"):
            destination.write(text)
        else:
            Path(destination).write_text(text)
    return text


def lp_variable_assignment(
    instance: ProblemInstance, result: SolveResult
) -> dict[str, float]:
    """Values for every LP variable corresponding to a solved selection.

    Used to check an exported model against the enumeration optimum: the
    returned point must satisfy every row of the file and reproduce the
    objective value.
    """
    if result.selection is None or result.breakdown is None:
        raise ValueError("cannot build an assignment from an infeasible result")
    sel, bd = result.selection, result.breakdown
    values: dict[str, float] = {}
    for qi, vk in enumerate(sel.assignment):
        if vk is not None:
            values[f"x_{qi + 1}_{vk + 1}"] = 1.0
    for vk, on in enumerate(sel.materialized):
        values[f"y_{vk + 1}"] = 1.0 if on else 0.0
    for qi, row in enumerate(instance.gains.by_query):
        for vk, _ in row:
            values.setdefault(f"x_{qi + 1}_{vk + 1}", 0.0)
    values["t_proc"] = bd.t_proc
    values["t_mat"] = bd.t_mat
    values["t_maint"] = bd.t_maint
    values["c_c"] = bd.c_c
    values["c_s"] = bd.c_s
    values["s_stored"] = bd.stored_gb
    values["c_total"] = bd.total_cost
    kind, plan = _storage_plan(instance)
    if kind == "pwl":
        target = bd.stored_gb
        chosen = 0
        for e, (seg, _) in enumerate(plan):
            if seg.start_gb <= target:
                chosen = e
        for e, (seg, width) in enumerate(plan):
            values[f"z_{e + 1}"] = 1.0 if e == chosen else 0.0
            values[f"u_{e + 1}"] = (target - seg.start_gb) if e == chosen else 0.0
    return values
