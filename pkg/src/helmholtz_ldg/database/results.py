"""
Persistenz der Studienergebnisse in der DuckDB-Tabelle study_results (eine Zeile pro Zelle).
"""
import datetime

import pandas as pd

from helmholtz_ldg.database.connection import get_connection

RESULTS_TABLE = "study_results"

RESULT_COLUMNS = {
    "run_timestamp": "VARCHAR",
    "study_kind": "VARCHAR",
    "status": "VARCHAR",
    "message": "VARCHAR",
    "method": "VARCHAR",
    "problem": "VARCHAR",
    "k": "DOUBLE",
    "m": "INTEGER",
    "h": "DOUBLE",
    "kh": "DOUBLE",
    "beta0": "DOUBLE",
    "delta0": "DOUBLE",
    "beta_scaling": "VARCHAR",
    "delta_scaling": "VARCHAR",
    "triangle_degree": "INTEGER",
    "edge_degree": "INTEGER",
    "h1_error": "DOUBLE",
    "h1_relative": "DOUBLE",
    "l2_error": "DOUBLE",
    "l2_relative": "DOUBLE",
    "l2_boundary_error": "DOUBLE",
    "l2_boundary_relative": "DOUBLE",
    "sigma_error": "DOUBLE",
    "sigma_relative": "DOUBLE",
    "dg_error": "DOUBLE",
    "dg_relative": "DOUBLE",
    "dg_pair_error": "DOUBLE",
    "dg_pair_relative": "DOUBLE",
    "uh_dg_norm": "DOUBLE",
    "uh_sigma_dg_norm": "DOUBLE",
    "interpolation_h1_relative": "DOUBLE",
    "gamma": "DOUBLE",
    "data_norm": "DOUBLE",
    "solution_norm": "DOUBLE",
    "ratio": "DOUBLE",
    "sigma_ratio": "DOUBLE",
    "wall_time": "DOUBLE",
}


def create_results_table(con):
    columns = ",\n            ".join(f"{name} {sql_type}" for name, sql_type in RESULT_COLUMNS.items())
    con.execute(f"""
        CREATE TABLE IF NOT EXISTS {RESULTS_TABLE} (
            {columns}
        )
    """)


def store_results(rows, db_path, study_kind, run_timestamp=None):
    """
    Hängt die Zeilen einer Studie an study_results an.
    Args:
        rows (list[dict] | pd.DataFrame): Zeilen mit Fehlernormen bzw. Audit-Werten
        db_path (str): Pfad zur DuckDB-Datei
        study_kind (str): Art der Studie (convergence, table, ...)
        run_timestamp (str): Optionaler Zeitstempel, sonst jetzt
    Returns:
        int: Anzahl gespeicherter Zeilen
    """
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows))
    if df.empty:
        return 0
    ts = run_timestamp if run_timestamp is not None else datetime.datetime.now().isoformat()
    df = df.assign(run_timestamp=ts, study_kind=study_kind)
    df = df.reindex(columns=list(RESULT_COLUMNS))
    df["status"] = df["status"].fillna("ok")
    for name, sql_type in RESULT_COLUMNS.items():
        if sql_type == "DOUBLE":
            df[name] = pd.to_numeric(df[name], errors="coerce").astype("float64")
        elif sql_type == "INTEGER":
            df[name] = pd.to_numeric(df[name], errors="coerce").astype("Int64")
        else:
            df[name] = df[name].astype("string")

    con = get_connection(db_path)
    try:
        create_results_table(con)
        con.register("temp_rows", df)
        con.execute(f"INSERT INTO {RESULTS_TABLE} SELECT * FROM temp_rows")
        con.unregister("temp_rows")
    finally:
        con.close()
    return len(df)


def latest_results(db_path, limit=20):
    """
    Liest die zuletzt gespeicherten Zeilen (neuester Lauf zuerst).
    Returns:
        pd.DataFrame or None: None, wenn die Tabelle noch nicht existiert
    """
    con = get_connection(db_path)
    try:
        tables = [t[0] for t in con.execute("SHOW TABLES").fetchall()]
        if RESULTS_TABLE not in tables:
            return None
        return con.execute(
            f"""
            SELECT * FROM {RESULTS_TABLE}
            ORDER BY run_timestamp DESC, method, k, m
            LIMIT ?
            """,
            [int(limit)],
        ).df()
    finally:
        con.close()
