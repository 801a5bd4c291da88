"""
Batch studies: enumerate (method, k, m, params) cells, solve them, and write
per-cell reports, aggregate rate tables, charts, a Markdown report and the
DuckDB result rows.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import click
import pandas as pd

from helmholtz_ldg.database.connection import get_database_path, get_output_dir
from helmholtz_ldg.database.results import store_results
from helmholtz_ldg.discretization.quadrature import DATA_EDGE_DEGREE, DATA_TRIANGLE_DEGREE
from helmholtz_ldg.evaluation.convergence import convergence_rates
from helmholtz_ldg.evaluation.error_norms import NORM_NAMES, ErrorReport, error_norms, interpolation_baseline
from helmholtz_ldg.evaluation.report import (
    append_to_markdown_report,
    records_markdown,
    write_markdown_report,
)
from helmholtz_ldg.evaluation.stability import StabilityAudit, stability_audit
from helmholtz_ldg.evaluation.traces import trace_sample
from helmholtz_ldg.geometry.mesh import build_structured_mesh
from helmholtz_ldg.linalg.sparse import SolverError
from helmholtz_ldg.model.flux_settings import FluxParams
from helmholtz_ldg.model.solve import solve_problem
from helmholtz_ldg.problem.helmholtz import make_problem
from helmholtz_ldg.study.config import AUTO_DATABASE, StudyConfig, sweep_axis
from helmholtz_ldg.study.plots import error_curve_chart, trace_chart

PROVENANCE_COLUMNS = [
    "status",
    "message",
    "method",
    "problem",
    "k",
    "m",
    "h",
    "kh",
    "beta0",
    "delta0",
    "beta_scaling",
    "delta_scaling",
    "triangle_degree",
    "edge_degree",
]
ERROR_COLUMNS = [f"{name}_{kind}" for name in NORM_NAMES for kind in ("error", "relative")] + [
    "uh_dg_norm",
    "uh_sigma_dg_norm",
    "interpolation_h1_relative",
]
AUDIT_COLUMNS = ["gamma", "data_norm", "solution_norm", "ratio", "sigma_ratio"]
RATE_NORMS = ("h1", "sigma", "l2", "dg")
AUDIT_SPREAD_LIMIT = 10.0


@dataclass(frozen=True)
class StudyCell:
    method: str
    k: float
    m: int
    params: FluxParams
    params_index: int = 0
    kh: float | None = None

    @property
    def label(self) -> str:
        return f"{self.method} k={self.k:g} m={self.m} {self.params.label}"


@dataclass
class CellOutcome:
    cell: StudyCell
    row: dict
    report: ErrorReport | None = None
    audit: StabilityAudit | None = None
    trace: list[tuple[float, float]] | None = None
    error_kind: str | None = None

    @property
    def ok(self) -> bool:
        return self.row["status"] == "ok"


@dataclass
class StudyResult:
    config: StudyConfig
    name: str
    outcomes: list[CellOutcome]
    files: list[Path] = field(default_factory=list)

    @property
    def rows(self) -> list[dict]:
        return [o.row for o in self.outcomes]

    @property
    def failures(self) -> list[CellOutcome]:
        return [o for o in self.outcomes if not o.ok]


def study_name(config: StudyConfig) -> str:
    if config.kind == "sensitivity":
        return f"sensitivity-{sweep_axis(config.params)}"
    return config.kind


def mesh_size_for(kind: str, k: float, kh: float | None = None) -> int:
    """m for the fixed-kh and fixed-k^3h^2 studies (h = 1/m)."""
    if kind == "kh-constant":
        return max(1, round(k / kh))
    if kind == "k3h2-constant":
        return max(1, round(k**1.5))
    raise ValueError(f"study kind '{kind}' uses explicit m values")


def enumerate_cells(config: StudyConfig) -> list[StudyCell]:
    """All cells of a study, ordered by (method, k, m); methods keep their config order."""
    cells = []
    for method in config.methods:
        for index, params in enumerate(config.params):
            if config.kind == "kh-constant":
                for kh in config.kh_values:
                    for k in config.k_values:
                        cells.append(StudyCell(method, float(k), mesh_size_for(config.kind, k, kh), params, index, float(kh)))
            elif config.kind == "k3h2-constant":
                for k in config.k_values:
                    cells.append(StudyCell(method, float(k), mesh_size_for(config.kind, k), params, index))
            else:
                for k in config.k_values:
                    for m in config.m_values:
                        cells.append(StudyCell(method, float(k), int(m), params, index))
    order = {method: position for position, method in enumerate(config.methods)}
    return sorted(cells, key=lambda c: (order[c.method], c.k, c.m, c.params_index, c.kh or 0.0))


def _provenance(cell: StudyCell, problem: str) -> dict:
    return {
        "status": "ok",
        "message": "",
        "method": cell.method,
        "problem": problem,
        "k": cell.k,
        "m": cell.m,
        "h": 1.0 / cell.m,
        "kh": cell.k / cell.m,
        "beta0": cell.params.beta0,
        "delta0": cell.params.delta0,
        "beta_scaling": cell.params.beta_scaling,
        "delta_scaling": cell.params.delta_scaling,
        "triangle_degree": DATA_TRIANGLE_DEGREE,
        "edge_degree": DATA_EDGE_DEGREE,
    }


def evaluate_cell(cell: StudyCell, config: StudyConfig) -> CellOutcome:
    """Solve one cell; solver and precondition failures are recorded, not raised."""
    row = _provenance(cell, config.problem)
    try:
        mesh = build_structured_mesh(cell.m)
        problem = make_problem(config.problem, cell.k)
        if config.kind == "audit":
            audit = stability_audit(cell.method, mesh, cell.k, cell.params, problem)
            row.update({column: getattr(audit, column) for column in AUDIT_COLUMNS})
            return CellOutcome(cell, row, audit=audit)

        result = solve_problem(cell.method, mesh, problem, cell.params)
        report = error_norms(mesh, result.solution, problem, cell.k, cell.params, wall_time=result.wall_time)
        record = report.as_record()
        row.update({column: record.get(column) for column in ERROR_COLUMNS if column in record})
        row["wall_time"] = report.wall_time
        if config.kind in ("kh-constant", "k3h2-constant"):
            row["interpolation_h1_relative"] = interpolation_baseline(mesh, problem)
        trace = trace_sample(mesh, result.solution, config.trace_samples) if config.kind == "trace" else None
        return CellOutcome(cell, row, report=report, trace=trace)
    except (SolverError, ValueError) as exc:
        row["status"] = "failed"
        row["message"] = f"{type(exc).__name__}: {exc}"
        return CellOutcome(cell, row, error_kind=type(exc).__name__)


def _run_cells(cells: list[StudyCell], config: StudyConfig) -> list[CellOutcome]:
    def run(cell: StudyCell) -> CellOutcome:
        click.echo(f"🔍 {config.kind}: {cell.label}", err=True)
        outcome = evaluate_cell(cell, config)
        if not outcome.ok:
            click.echo(f"❌ {cell.label}: {outcome.row['message']}", err=True)
        return outcome

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(run, cells))
    return [run(cell) for cell in cells]


def _csv_columns(kind: str) -> list[str]:
    return PROVENANCE_COLUMNS + (AUDIT_COLUMNS if kind == "audit" else ERROR_COLUMNS)


def _clean(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def _write_csv(rows: list[dict], columns: list[str], path: Path) -> Path:
    frame = pd.DataFrame(rows).reindex(columns=columns)
    frame.to_csv(path, index=False, float_format="%.12e")
    return path


def _write_json(payload, path: Path) -> Path:
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, allow_nan=False, default=str)
        f.write("\n")
    return path


def _cell_stem(cell: StudyCell) -> str:
    params = cell.params
    return (
        f"{cell.method}_k{cell.k:g}_m{cell.m}"
        f"_beta{params.beta0:g}-{params.beta_scaling}_delta{params.delta0:g}-{params.delta_scaling}"
    )


def _group_key(outcome: CellOutcome) -> tuple:
    cell = outcome.cell
    return (cell.method, cell.params_index, cell.k)


def rate_tables(outcomes: list[CellOutcome]) -> dict[tuple, list[dict]]:
    """Observed orders per (method, params, k) group of successful cells, by decreasing h."""
    groups: dict[tuple, list[CellOutcome]] = {}
    for outcome in outcomes:
        groups.setdefault(_group_key(outcome), []).append(outcome)

    tables = {}
    for key, members in groups.items():
        members = sorted(members, key=lambda o: o.cell.m)
        ok = [o for o in members if o.ok and o.report is not None]
        orders = {}
        if len(ok) >= 2:
            for entry in convergence_rates([o.report for o in ok], RATE_NORMS):
                orders[entry["m"]] = entry
        table = []
        for outcome in members:
            row = {
                "method": outcome.cell.method,
                "k": outcome.cell.k,
                "params": outcome.cell.params.label,
                "m": outcome.cell.m,
                "status": outcome.row["status"],
                "message": outcome.row["message"],
                "wall_time": outcome.row.get("wall_time"),
            }
            for norm in RATE_NORMS:
                row[f"{norm}_error"] = outcome.row.get(f"{norm}_error")
                row[f"{norm}_order"] = orders.get(outcome.cell.m, {}).get(f"{norm}_order")
            table.append(row)
        tables[key] = table
    return tables


def audit_summary(outcomes: list[CellOutcome]) -> dict:
    """Ratio spread; bounded if the overall maximum stays within 10x the smallest-k column's maximum."""
    audits = [o.audit for o in outcomes if o.audit is not None]
    if not audits:
        return {"cells": 0}
    ratios = [a.ratio for a in audits]
    k_min = min(a.k for a in audits)
    reference = max(a.ratio for a in audits if a.k == k_min)
    return {
        "cells": len(audits),
        "min_ratio": min(ratios),
        "max_ratio": max(ratios),
        "reference_k": k_min,
        "reference_max_ratio": reference,
        "bounded": bool(all(math.isfinite(r) for r in ratios) and max(ratios) <= AUDIT_SPREAD_LIMIT * reference),
    }


def _curve_label(cell: StudyCell, config: StudyConfig) -> str:
    if config.kind == "kh-constant":
        return f"{cell.method} kh={cell.kh:g}"
    if config.kind == "sensitivity":
        return f"{cell.method} k={cell.k:g} {cell.params.label}"
    if len(config.k_values) > 1:
        return f"{cell.method} k={cell.k:g}"
    return cell.method


def _charts(result: StudyResult, directory: Path) -> list[Path]:
    config = result.config
    charts = []
    ok = [o for o in result.outcomes if o.ok]
    if config.kind == "trace":
        by_mesh: dict[tuple, dict] = {}
        for outcome in ok:
            key = (outcome.cell.k, outcome.cell.m)
            by_mesh.setdefault(key, {})[outcome.cell.method] = outcome.trace
        for (k, m), traces in by_mesh.items():
            mesh = build_structured_mesh(m)
            traces["exact"] = trace_sample(mesh, make_problem(config.problem, k), config.trace_samples)
            charts.append(trace_chart(traces, directory / f"trace_k{k:g}_m{m}.svg", title=f"k={k:g}, h=1/{m}"))
        return charts
    if config.kind == "audit" or not ok:
        return charts

    records = []
    x = "k" if config.kind in ("kh-constant", "k3h2-constant") else "h"
    for outcome in ok:
        row = outcome.row
        records.append({"curve": _curve_label(outcome.cell, config), x: row[x], "h1_relative": row["h1_relative"], "sigma_relative": row["sigma_relative"]})
        if row.get("interpolation_h1_relative") is not None:
            label = "interpolation" + (f" kh={outcome.cell.kh:g}" if outcome.cell.kh else "")
            records.append({"curve": label, x: row[x], "h1_relative": row["interpolation_h1_relative"], "sigma_relative": None})
    frame = pd.DataFrame(records).drop_duplicates()
    charts.append(error_curve_chart(frame, directory / "h1_relative.svg", y="h1_relative", x=x, title=f"{result.name}: relative H1 error"))
    if config.kind in ("sensitivity", "convergence", "table"):
        sigma = frame[~frame["curve"].str.startswith("interpolation")]
        charts.append(error_curve_chart(sigma, directory / "sigma_relative.svg", y="sigma_relative", x=x, title=f"{result.name}: relative sigma error"))
    return charts


def _parameter_block(config: StudyConfig) -> dict:
    block = {
        "study": config.kind,
        "problem": config.problem,
        "methods": ", ".join(config.methods),
        "k": ", ".join(f"{k:g}" for k in config.k_values),
        "flux parameters": "; ".join(p.label for p in config.params),
        "quadrature (data)": f"triangle degree {DATA_TRIANGLE_DEGREE}, edge degree {DATA_EDGE_DEGREE}",
    }
    if config.m_values:
        block["m"] = ", ".join(str(m) for m in config.m_values)
    if config.kh_values:
        block["kh"] = ", ".join(f"{kh:g}" for kh in config.kh_values)
    return block


def _write_outputs(result: StudyResult, directory: Path) -> list[Path]:
    config = result.config
    formats = set(config.formats)
    files: list[Path] = []
    columns = _csv_columns(config.kind)
    rows = result.rows

    cell_dir = directory / "cells"
    if formats & {"csv", "json"}:
        cell_dir.mkdir(parents=True, exist_ok=True)
    for outcome in result.outcomes:
        stem = _cell_stem(outcome.cell)
        if "csv" in formats:
            files.append(_write_csv([outcome.row], columns, cell_dir / f"{stem}.csv"))
        if "json" in formats:
            record = {key: _clean(value) for key, value in outcome.row.items()}
            files.append(_write_json(record, cell_dir / f"{stem}.json"))

    tables = rate_tables(result.outcomes) if config.kind in ("table", "convergence", "sensitivity") else {}
    rate_rows = [row for table in tables.values() for row in table]
    summary = audit_summary(result.outcomes) if config.kind == "audit" else None

    if "csv" in formats:
        files.append(_write_csv(rows, columns, directory / "results.csv"))
        if rate_rows:
            rate_columns = ["method", "k", "params", "m", "status"] + [f"{n}_{c}" for n in RATE_NORMS for c in ("error", "order")]
            files.append(_write_csv(rate_rows, rate_columns, directory / "rates.csv"))
        if config.kind == "trace":
            trace_rows = [
                {"method": o.cell.method, "k": o.cell.k, "m": o.cell.m, "x": x, "re_u": value}
                for o in result.outcomes
                if o.trace is not None
                for x, value in o.trace
            ]
            files.append(_write_csv(trace_rows, ["method", "k", "m", "x", "re_u"], directory / "traces.csv"))
    if "json" in formats:
        payload = {
            "config": config.as_dict(),
            "rows": [{key: _clean(value) for key, value in row.items()} for row in rows],
            "rates": [{key: _clean(value) for key, value in row.items()} for row in rate_rows],
        }
        if summary is not None:
            payload["audit"] = summary
        files.append(_write_json(payload, directory / "results.json"))

    charts = _charts(result, directory) if "svg" in formats else []
    files.extend(charts)

    if "md" in formats:
        report_path = directory / "study_report.md"
        sections = {
            f"{table[0]['method']}, k={table[0]['k']:g}, {table[0]['params']}": table for table in tables.values() if table
        }
        write_markdown_report(f"Helmholtz LDG study: {result.name}", _parameter_block(config), sections, charts, str(report_path))
        if not tables:
            extra = AUDIT_COLUMNS if config.kind == "audit" else ["h1_relative", "sigma_relative", "interpolation_h1_relative"]
            append_to_markdown_report(
                records_markdown(rows, ["method", "k", "m", "status"] + extra) + "\n",
                str(report_path),
                section_title="Results",
            )
        if summary is not None:
            append_to_markdown_report(summary, str(report_path), section_title="Audit summary")
        files.append(report_path)
    return files


def run_study(config: StudyConfig, run_timestamp: str | None = None) -> StudyResult:
    """
    Run every cell of the study and write its reports.

    CSV output contains no timing data and is byte-identical across runs of
    the same config; wall times go to the JSON, Markdown and DuckDB outputs.
    """
    name = study_name(config)
    directory = Path(get_output_dir(config.output_dir)) / name
    directory.mkdir(parents=True, exist_ok=True)

    cells = enumerate_cells(config)
    click.echo(f"🔍 Study '{name}': {len(cells)} cells", err=True)
    result = StudyResult(config=config, name=name, outcomes=_run_cells(cells, config))
    result.files = _write_outputs(result, directory)

    if config.database is not None:
        db_path = get_database_path(config.output_dir) if config.database == AUTO_DATABASE else config.database
        n = store_results(result.rows, db_path, name, run_timestamp=run_timestamp)
        click.echo(f"✅ {n} rows stored in {db_path}", err=True)

    failed = len(result.failures)
    status = "✅" if not failed else "⚠️"
    click.echo(f"{status} {len(cells) - failed}/{len(cells)} cells ok, reports in {directory}", err=True)
    return result


def run_sensitivity(config: StudyConfig, run_timestamp: str | None = None) -> StudyResult:
    """Run a beta or delta sweep; the config must vary exactly one of them."""
    sweep_axis(config.params)
    if config.kind != "sensitivity":
        config = replace(config, kind="sensitivity")
    return run_study(config, run_timestamp=run_timestamp)
