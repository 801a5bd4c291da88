"""
Application Entry Point for the Helmholtz LDG solver.

Subcommands: solve, convergence, sensitivity, table1, trace, audit, study, mesh-info.
Progress goes to stderr, machine-readable output (JSON, mesh summary) to stdout.

Exit codes: 0 success, 1 usage or precondition error, 2 numerical failure.
"""

import json
import sys
from dataclasses import replace

import click

from helmholtz_ldg.database.connection import OUTPUT_ENV_VAR
from helmholtz_ldg.evaluation.error_norms import error_norms
from helmholtz_ldg.geometry.mesh import build_structured_mesh, mesh_summary, write_mesh_ascii
from helmholtz_ldg.linalg.sparse import SolverError, export_matrix_market
from helmholtz_ldg.model.flux_settings import METHODS, SCALING_MODES, FluxParams
from helmholtz_ldg.model.solve import solve_problem
from helmholtz_ldg.problem.helmholtz import PROBLEMS, make_problem
from helmholtz_ldg.study.config import FORMATS, default_config, load_study_config, sensitivity_params
from helmholtz_ldg.study.runner import run_sensitivity, run_study

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


def flux_options(func):
    """--beta0/--delta0/--beta-scaling/--delta-scaling; defaults: delta = 0.1 h_e, beta = 0.001/h_e."""
    options = [
        click.option("--beta0", type=float, default=0.001, show_default=True, help="Penalty beta0 of the jump term."),
        click.option("--delta0", type=float, default=0.1, show_default=True, help="Penalty delta0 of the flux term."),
        click.option(
            "--beta-scaling",
            type=click.Choice(SCALING_MODES),
            default="inv-edge",
            show_default=True,
            help="beta_e = beta0/h_e (inv-edge), beta0*h_e (edge) or beta0 (const).",
        ),
        click.option(
            "--delta-scaling",
            type=click.Choice(SCALING_MODES),
            default="edge",
            show_default=True,
            help="delta_e = delta0*h_e (edge), delta0/h_e (inv-edge) or delta0 (const).",
        ),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def study_options(func):
    options = [
        click.option(
            "--output-dir",
            type=click.Path(file_okay=False),
            envvar=OUTPUT_ENV_VAR,
            default=None,
            help=f"Output directory (default: ${OUTPUT_ENV_VAR} or ./output).",
        ),
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="JSON study config."),
        click.option(
            "--format",
            "formats",
            type=click.Choice(FORMATS),
            multiple=True,
            help="Output formats (repeatable; default depends on the study).",
        ),
        click.option("--workers", type=int, default=None, help="Parallel cells (threads; default 1)."),
        click.option("--no-db", is_flag=True, default=False, help="Do not append rows to the DuckDB result store."),
        click.option("--problem", type=click.Choice(sorted(PROBLEMS)), default=None, help="Test problem (default bessel)."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _params(beta0, delta0, beta_scaling, delta_scaling):
    return FluxParams(beta0=beta0, delta0=delta0, beta_scaling=beta_scaling, delta_scaling=delta_scaling)


def _echo_json(payload):
    click.echo(json.dumps(payload, indent=2, allow_nan=False, default=str))


def _build_config(kind, config_path, output_dir, formats, workers, no_db, problem, **grid):
    """Start from the JSON file (or the study defaults) and apply command-line overrides."""
    config = load_study_config(config_path) if config_path else default_config(kind)
    if config.kind != kind:
        config = replace(config, kind=kind)
    if config_path:
        grid.pop("params", None)
    overrides = {key: value for key, value in grid.items() if value}
    config = config.with_overrides(
        output_dir=output_dir,
        formats=formats or None,
        workers=workers,
        problem=problem,
        **overrides,
    )
    if no_db:
        config = replace(config, database=None)
    return config


def _finish(result):
    if result.files:
        click.echo(f"📄 {len(result.files)} files written", err=True)
    failed = result.failures
    if not failed:
        return result
    numerical = [o for o in failed if o.error_kind == SolverError.__name__]
    first = (numerical or failed)[0]
    summary = f"{len(failed)} cell(s) failed, first: {first.cell.label}: {first.row['message']}"
    if numerical:
        raise SolverError(summary)
    raise ValueError(f"invalid input: {summary}")


@click.group()
@click.help_option("--help", "-h")
def cli():
    """Absolutely stable LDG solvers for the 2D Helmholtz equation with Robin boundary conditions."""


@cli.command()
@click.option("--method", type=click.Choice(METHODS), default="ldg1", show_default=True, help="Discretization.")
@click.option("--k", "k", type=float, default=10.0, show_default=True, help="Wave number k > 0.")
@click.option("--m", "m", type=int, default=10, show_default=True, help="Cells per side, h = 1/m.")
@click.option("--problem", type=click.Choice(sorted(PROBLEMS)), default="bessel", show_default=True, help="Test problem.")
@flux_options
@click.option("--export-matrix", type=click.Path(dir_okay=False), default=None, help="Write the system matrix (MatrixMarket).")
def solve(method, k, m, problem, beta0, delta0, beta_scaling, delta_scaling, export_matrix):
    """Solve one cell and print its error report as JSON."""
    params = _params(beta0, delta0, beta_scaling, delta_scaling)
    data = make_problem(problem, k)
    mesh = build_structured_mesh(m)
    click.echo(f"🔍 {method}: k={k:g}, h=1/{m}, {params.label}", err=True)
    try:
        result = solve_problem(method, mesh, data, params)
    except SolverError as exc:
        raise SolverError(f"{method} k={k:g} m={m}: {exc}", pivot=exc.pivot, residual=exc.residual) from exc
    if export_matrix:
        path = export_matrix_market(result.system.matrix, export_matrix, comment=f"{method} k={k:g} m={m} {params.label}")
        click.echo(f"📄 Matrix written to {path}", err=True)
    report = error_norms(mesh, result.solution, data, k, params, wall_time=result.wall_time)
    _echo_json({"problem": problem, **report.as_record()})
    click.echo("✅ Done", err=True)


@cli.command()
@click.option("--method", "methods", type=click.Choice(METHODS), multiple=True, help="Methods (repeatable; default ldg1, ldg2).")
@click.option("--k", "k_values", type=float, multiple=True, help="Wave numbers (repeatable; default 5).")
@click.option("--m", "m_values", type=int, multiple=True, help="Mesh sizes (repeatable; default 10 20 40 80).")
@flux_options
@study_options
def convergence(methods, k_values, m_values, beta0, delta0, beta_scaling, delta_scaling, **study):
    """Error and observed orders over a sequence of meshes."""
    params = (_params(beta0, delta0, beta_scaling, delta_scaling),)
    config = _build_config("convergence", methods=methods, k_values=k_values, m_values=m_values, params=params, **study)
    _finish(run_study(config))


@cli.command()
@click.option(
    "--sweep",
    type=click.Choice(["beta", "delta", "both"]),
    default="both",
    show_default=True,
    help="beta: {0.001/h_e, 0.01/h_e, 1/h_e, 1} at delta=0.1h_e; delta: {0.001h_e, 0.1h_e, 10h_e, 0.1} at beta=0.001/h_e.",
)
@click.option("--method", "methods", type=click.Choice(METHODS), multiple=True, help="Methods (repeatable; default ldg1, ldg2).")
@click.option("--k", "k_values", type=float, multiple=True, help="Wave numbers (repeatable; default 5 50).")
@click.option("--m", "m_values", type=int, multiple=True, help="Mesh sizes (repeatable; default 10 20 40).")
@study_options
def sensitivity(sweep, methods, k_values, m_values, **study):
    """Sensitivity of the errors to beta and delta."""
    axes = ["beta", "delta"] if sweep == "both" else [sweep]
    results = []
    for axis in axes:
        grid = dict(methods=methods, k_values=k_values, m_values=m_values)
        if not study.get("config_path"):
            grid["params"] = sensitivity_params(axis)
        config = _build_config("sensitivity", **grid, **study)
        results.append(run_sensitivity(config))
        if study.get("config_path"):
            break
    for result in results:
        _finish(result)


@cli.command()
@click.option("--m", "m_values", type=int, multiple=True, help="Mesh sizes (repeatable; default 5 10 20 40).")
@click.option("--full", is_flag=True, default=False, help="Also run m = 80 and 160.")
@flux_options
@study_options
def table1(m_values, full, beta0, delta0, beta_scaling, delta_scaling, **study):
    """Compare LDG#1 and LDG#2 at k = 10 (1/h, H1 error, order, sigma error, order, wall time)."""
    if full and not m_values:
        m_values = (5, 10, 20, 40, 80, 160)
    params = (_params(beta0, delta0, beta_scaling, delta_scaling),)
    config = _build_config("table", m_values=m_values, params=params, **study)
    result = _finish(run_study(config))
    report = next((f for f in result.files if f.name == "study_report.md"), None)
    if report is not None:
        click.echo(report.read_text())


@cli.command()
@click.option("--method", "methods", type=click.Choice(METHODS), multiple=True, help="Methods (repeatable; default ldg1, fem-p1).")
@click.option("--k", "k_values", type=float, multiple=True, help="Wave numbers (repeatable; default 100).")
@click.option("--m", "m_values", type=int, multiple=True, help="Mesh sizes (repeatable; default 50, larger: 120 200).")
@click.option("--samples", type=int, default=None, help="Samples along y = 0 (default 401).")
@flux_options
@study_options
def trace(methods, k_values, m_values, samples, beta0, delta0, beta_scaling, delta_scaling, **study):
    """Traces Re u_h(x, 0) of the discrete solutions next to the exact trace."""
    params = (_params(beta0, delta0, beta_scaling, delta_scaling),)
    config = _build_config("trace", methods=methods, k_values=k_values, m_values=m_values, params=params, **study)
    if samples is not None:
        config = replace(config, trace_samples=samples)
    _finish(run_study(config))


@cli.command()
@click.option("--method", "methods", type=click.Choice(METHODS[:3]), multiple=True, help="Methods (repeatable; default ldg1).")
@click.option("--k", "k_values", type=float, multiple=True, help="Wave numbers (repeatable; default 5 10 20 50).")
@click.option("--m", "m_values", type=int, multiple=True, help="Mesh sizes (repeatable; default 10 20 40).")
@flux_options
@study_options
def audit(methods, k_values, m_values, beta0, delta0, beta_scaling, delta_scaling, **study):
    """Stability ratios ||u_h|| k / (gamma M(f,g)); prints one JSON row per cell."""
    params = (_params(beta0, delta0, beta_scaling, delta_scaling),)
    config = _build_config("audit", methods=methods, k_values=k_values, m_values=m_values, params=params, **study)
    result = run_study(config)
    _echo_json([o.audit.as_record() for o in result.outcomes if o.audit is not None])
    _finish(result)


@cli.command()
@study_options
def study(config_path, **study):
    """Run any study kind (including kh-constant and k3h2-constant) from a JSON config."""
    if not config_path:
        raise click.UsageError("study needs --config")
    kind = load_study_config(config_path).kind
    config = _build_config(kind, config_path=config_path, **study)
    runner = run_sensitivity if kind == "sensitivity" else run_study
    _finish(runner(config))


@cli.command("mesh-info")
@click.option("--m", "m", type=int, default=4, show_default=True, help="Cells per side, h = 1/m.")
@click.option("--dump", type=click.Path(dir_okay=False), default=None, help="Write vertices and triangles as text.")
def mesh_info(m, dump):
    """Print the counts of the structured mesh T_{1/m}."""
    mesh = build_structured_mesh(m)
    summary = mesh_summary(mesh)
    click.echo(f"triangles: {summary['triangles']}")
    click.echo(f"vertices: {summary['vertices']}")
    click.echo(f"edges: {mesh.n_edges}")
    click.echo(f"interior edges: {summary['interior_edges']}")
    click.echo(f"boundary edges: {summary['boundary_edges']}")
    click.echo(f"edge lengths: {summary['min_edge_length']:.6g} .. {summary['max_edge_length']:.6g}")
    if dump:
        path = write_mesh_ascii(mesh, dump)
        click.echo(f"📄 Mesh written to {path}", err=True)


def main(argv=None):
    """Run the CLI and map errors to the exit-code contract."""
    try:
        code = cli.main(args=argv, prog_name="helmholtz-ldg", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("❌ Aborted", err=True)
        return EXIT_USAGE
    except SolverError as exc:
        click.echo(f"❌ Numerical failure: {exc}", err=True)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        click.echo(f"❌ Error: {exc}", err=True)
        return EXIT_USAGE
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
