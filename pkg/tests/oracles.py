"""Independent reference implementations used to cross-check the package.

Everything here recomputes results from first principles (linear scans,
exhaustive enumeration, direct formula evaluation) without calling the
production code paths it is used to verify.
"""

from __future__ import annotations

import itertools
import math


def scan_piecewise(segments: list[tuple[float, float, float]], x: float) -> float:
    """Linear-scan piecewise evaluation; segments are (start, per_gb, base)."""
    assert x >= 0
    chosen = segments[0]
    for seg in segments:
        if seg[0] <= x:
            chosen = seg
        else:
            break
    start, per_gb, base = chosen
    return per_gb * (x - start) + base


def _storage_segments(instance) -> list[tuple[float, float, float]]:
    return [(s.start_gb, s.usd_per_gb, s.base_usd) for s in instance.catalog.storage.price.segments]


def _transfer_segments(instance) -> list[tuple[float, float, float]]:
    return [(s.start_gb, s.usd_per_gb, s.base_usd) for s in instance.catalog.transfer_out.segments]


def straight_line_breakdown(instance, materialized: set[int], assignment: dict[int, int]) -> dict:
    """Direct evaluation of the cost formulas for a selection, own arithmetic throughout."""
    freq = instance.frequency
    usd = instance.fleet.instance_type.usd_per_hour
    cnt = instance.fleet.count
    months = instance.storage_months
    n_s = cnt if instance.catalog.storage.mode.value == "per_instance" else 1

    hours = 0.0
    for qi, query in enumerate(instance.queries):
        gain = 0.0
        if qi in assignment:
            gain = instance.gains.gain(qi, assignment[qi])
        hours += query.base_time_h - gain
    t_proc = freq * hours
    t_mat = sum(instance.views[k].mat_h for k in sorted(materialized))
    t_maint = sum(instance.views[k].maint_h for k in sorted(materialized))
    stored = instance.dataset_gb + sum(instance.views[k].size_gb for k in sorted(materialized))
    c_c = (t_proc + t_mat + t_maint) * usd * cnt
    c_s = scan_piecewise(_storage_segments(instance), stored) * months * n_s
    download = freq * sum(q.result_gb for q in instance.queries)
    c_t = scan_piecewise(_transfer_segments(instance), download)
    return {
        "t_proc": t_proc,
        "t_mat": t_mat,
        "t_maint": t_maint,
        "total_time": t_proc + t_mat + t_maint,
        "c_c": c_c,
        "c_s": c_s,
        "c_t": c_t,
        "total_cost": c_c + c_s + c_t,
        "stored_gb": stored,
    }


def brute_force_best_assignment(instance, materialized_mask) -> tuple[float, tuple]:
    """Minimum response time over every per-query view choice, for a fixed materialized set.

    Enumerates the full cross product of options (no view, or any
    materialized view with a positive gain) and keeps the lexicographically
    smallest minimizer.
    """
    n_v = instance.n_views
    options = []
    for qi in range(instance.n_queries):
        opts = [(None, 0.0)]
        for vk, gain in instance.gains.by_query[qi]:
            if materialized_mask[vk]:
                opts.append((vk, gain))
        options.append(opts)
    best_t = math.inf
    best_x = None
    best_x_key = None
    for combo in itertools.product(*options):
        hours = 0.0
        for query, (_, gain) in zip(instance.queries, combo):
            hours += query.base_time_h - gain
        t_proc = instance.frequency * hours
        key = tuple(n_v if vk is None else vk for vk, _ in combo)
        if best_x_key is None or t_proc < best_t or (t_proc == best_t and key < best_x_key):
            best_t = t_proc
            best_x = tuple(vk for vk, _ in combo)
            best_x_key = key
    return best_t, best_x


def objective_value(kind: str, t_proc: float, total_cost: float, *, alpha: float | None = None) -> float:
    if kind == "mv1":
        return t_proc
    if kind == "mv2":
        return total_cost
    return alpha * t_proc + (1.0 - alpha) * total_cost


def joint_brute_force(instance, objectives: list[dict], tol: float = 1e-6) -> list[dict | None]:
    """Exhaustive search over materialization vectors AND per-query choices.

    `objectives` entries look like {"kind": "mv1", "budget": ...},
    {"kind": "mv2", "tmax": ...} or {"kind": "mv3", "alpha": ...}. Returns,
    per objective, the optimal point as a dict (or None when infeasible),
    breaking ties by fewer materialized views then the lexicographically
    smallest materialization vector.
    """
    n_q, n_v = instance.n_queries, instance.n_views
    freq = instance.frequency
    usd = instance.fleet.instance_type.usd_per_hour
    cnt = instance.fleet.count
    months = instance.storage_months
    n_s = cnt if instance.catalog.storage.mode.value == "per_instance" else 1
    storage_segs = _storage_segments(instance)
    download = freq * sum(q.result_gb for q in instance.queries)
    c_t = scan_piecewise(_transfer_segments(instance), download)

    positive = [list(instance.gains.by_query[qi]) for qi in range(n_q)]
    best: list[tuple | None] = [None] * len(objectives)

    for mask in range(1 << n_v):
        chosen = [k for k in range(n_v) if (mask >> k) & 1]
        chosen_set = set(chosen)
        # a materialized view nobody can use makes every completion invalid
        usable = set()
        options = []
        for qi in range(n_q):
            opts = [(None, 0.0)]
            for vk, gain in positive[qi]:
                if (mask >> vk) & 1:
                    opts.append((vk, gain))
                    usable.add(vk)
            options.append(opts)
        if usable != chosen_set:
            continue

        t_mat = sum(instance.views[k].mat_h for k in chosen)
        t_maint = sum(instance.views[k].maint_h for k in chosen)
        stored = instance.dataset_gb + sum(instance.views[k].size_gb for k in chosen)
        c_s = scan_piecewise(storage_segs, stored) * months * n_s

        for combo in itertools.product(*options):
            used = {vk for vk, _ in combo if vk is not None}
            if used != chosen_set:
                continue
            hours = 0.0
            for query, (_, gain) in zip(instance.queries, combo):
                hours += query.base_time_h - gain
            t_proc = freq * hours
            c_c = (t_proc + t_mat + t_maint) * usd * cnt
            total_cost = c_c + c_s + c_t
            y_tuple = tuple(1 if (mask >> k) & 1 else 0 for k in range(n_v))
            x_key = tuple(n_v if vk is None else vk for vk, _ in combo)
            for oi, obj in enumerate(objectives):
                kind = obj["kind"]
                if kind == "mv1" and total_cost > obj["budget"] + tol:
                    continue
                if kind == "mv2" and t_proc > obj["tmax"] + tol:
                    continue
                value = objective_value(kind, t_proc, total_cost, alpha=obj.get("alpha"))
                key = (value, len(chosen), y_tuple, x_key)
                if best[oi] is None or key < best[oi][0]:
                    best[oi] = (
                        key,
                        {
                            "materialized": y_tuple,
                            "assignment": tuple(vk for vk, _ in combo),
                            "t_proc": t_proc,
                            "total_cost": total_cost,
                            "value": value,
                        },
                    )
    return [entry[1] if entry else None for entry in best]


# ---------------------------------------------------------------------------
# LP text parsing and substitution checking.
# ---------------------------------------------------------------------------


def _parse_terms(tokens: list[str]) -> list[tuple[float, str]]:
    terms = []
    sign = 1.0
    coef: float | None = None
    for tok in tokens:
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        else:
            try:
                value = float(tok)
            except ValueError:
                terms.append((sign * (1.0 if coef is None else coef), tok))
                sign = 1.0
                coef = None
            else:
                coef = value
    return terms


def parse_lp(text: str) -> dict:
    """Parse the emitted LP dialect back into objective, rows, bounds and binaries."""
    section = None
    objective_tokens: list[str] = []
    row_tokens: list[str] = []
    bounds: list[str] = []
    binaries: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered in ("minimize", "maximize", "subject to", "bounds", "binary", "end"):
            section = lowered
            continue
        if section == "minimize":
            objective_tokens.extend(line.split())
        elif section == "subject to":
            row_tokens.extend(line.split())
        elif section == "bounds":
            bounds.append(line)
        elif section == "binary":
            binaries.extend(line.split())

    def split_rows(tokens: list[str]) -> list[tuple[str, list, str, float]]:
        rows = []
        idx = 0
        while idx < len(tokens):
            assert tokens[idx].endswith(":"), f"expected a row name, got {tokens[idx]!r}"
            name = tokens[idx][:-1]
            idx += 1
            body: list[str] = []
            while idx < len(tokens) and not tokens[idx].endswith(":"):
                body.append(tokens[idx])
                idx += 1
            op_idx = next(i for i, t in enumerate(body) if t in ("<=", ">=", "=", "<", ">"))
            op = body[op_idx].rstrip()
            rows.append((name, _parse_terms(body[:op_idx]), op, float(body[op_idx + 1])))
        return rows

    assert objective_tokens and objective_tokens[0] == "obj:"
    parsed_bounds = []
    for b in bounds:
        var, op, rhs = b.split()
        parsed_bounds.append((var, op, float(rhs)))
    return {
        "objective": _parse_terms(objective_tokens[1:]),
        "rows": split_rows(row_tokens),
        "bounds": parsed_bounds,
        "binaries": binaries,
    }


def lp_substitution_errors(parsed: dict, values: dict[str, float], tol: float = 1e-6) -> list[str]:
    """All constraint rows the assignment violates beyond tol (empty means it satisfies the model)."""

    def lhs(terms) -> float:
        return sum(coef * values.get(var, 0.0) for coef, var in terms)

    errors = []
    for name, terms, op, rhs in parsed["rows"]:
        val = lhs(terms)
        ok = {
            "<=": val <= rhs + tol,
            "<": val <= rhs + tol,
            ">=": val >= rhs - tol,
            ">": val >= rhs - tol,
            "=": abs(val - rhs) <= tol,
        }[op]
        if not ok:
            errors.append(f"{name}: {val} {op} {rhs}")
    for var, op, rhs in parsed["bounds"]:
        val = values.get(var, 0.0)
        if op == "<=" and val > rhs + tol:
            errors.append(f"bound {var}: {val} <= {rhs}")
        if op == ">=" and val < rhs - tol:
            errors.append(f"bound {var}: {val} >= {rhs}")
    for var in parsed["binaries"]:
        val = values.get(var, 0.0)
        if min(abs(val), abs(val - 1.0)) > tol:
            errors.append(f"binary {var} has fractional value {val}")
    return errors


def lp_objective_value(parsed: dict, values: dict[str, float]) -> float:
    return sum(coef * values.get(var, 0.0) for coef, var in parsed["objective"])
