#!/usr/bin/env python3
"""
Kleines Inspektionswerkzeug für den DuckDB-Ergebnisspeicher (Tabellen, Spalten, letzte Läufe).
"""

import click

from helmholtz_ldg.database.connection import get_connection, get_database_path
from helmholtz_ldg.database.results import RESULTS_TABLE, latest_results


def list_tables(db_path):
    con = get_connection(db_path)
    tables = con.execute("SHOW TABLES").fetchall()
    con.close()
    return [t[0] for t in tables]


def list_columns(table_name, db_path):
    con = get_connection(db_path)
    cols = con.execute("SELECT * FROM pragma_table_info(?)", [table_name]).fetchall()
    con.close()
    return [c[1] for c in cols]


def drop_table(table_name, db_path):
    if table_name not in list_tables(db_path):
        click.echo(f"⚠️ Tabelle '{table_name}' existiert nicht.")
        return False
    con = get_connection(db_path)
    con.execute(f'DROP TABLE IF EXISTS "{table_name}"')
    con.close()
    click.echo(f"Tabelle '{table_name}' wurde gelöscht.")
    return True


def show_last_runs(db_path, limit=5):
    df = latest_results(db_path, limit=limit)
    if df is None:
        click.echo(f"Tabelle {RESULTS_TABLE} existiert noch nicht.")
        return
    if df.empty:
        click.echo("Keine Studienergebnisse gefunden.")
        return
    click.echo("\nLetzte Studienergebnisse:")
    header = ["Timestamp", "Study", "Method", "k", "m", "Status", "H1 rel", "sigma rel", "Ratio"]
    click.echo(" | ".join(header))
    click.echo("-|-|-|-|-|-|-|-|-")
    for _, row in df.iterrows():
        click.echo(
            f"{row['run_timestamp']} | {row['study_kind']} | {row['method']} | {row['k']:g} | {row['m']} | {row['status']} "
            f"| {_fmt(row['h1_relative'])} | {_fmt(row['sigma_relative'])} | {_fmt(row['ratio'])}"
        )


def _fmt(value):
    try:
        return "-" if value is None or value != value else f"{value:.4e}"
    except TypeError:
        return "-"


@click.group()
@click.option("--db-path", default=None, help="Pfad zur DuckDB-Datenbank (default: <output>/helmholtz_results.duckdb)")
@click.pass_context
def cli(ctx, db_path):
    ctx.ensure_object(dict)
    ctx.obj["db_path"] = db_path or get_database_path()


@cli.command("list")
@click.pass_context
def list_command(ctx):
    tables = list_tables(ctx.obj["db_path"])
    click.echo("Tabellen in der Datenbank:")
    for t in tables:
        click.echo(f"- {t}")


@cli.command()
@click.argument("table_name")
@click.pass_context
def columns(ctx, table_name):
    cols = list_columns(table_name, ctx.obj["db_path"])
    click.echo(f"Spalten in '{table_name}':")
    for c in cols:
        click.echo(f"- {c}")


@cli.command()
@click.argument("table_name")
@click.pass_context
def drop(ctx, table_name):
    drop_table(table_name, ctx.obj["db_path"])


@cli.command()
@click.option("--limit", default=5, show_default=True, help="Anzahl der letzten Ergebniszeilen")
@click.pass_context
def runs(ctx, limit):
    """Zeigt die letzten Zeilen aus study_results."""
    show_last_runs(ctx.obj["db_path"], limit=limit)


if __name__ == "__main__":
    cli(obj={})
