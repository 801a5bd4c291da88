import os

import duckdb

DATABASE_FILE = "helmholtz_results.duckdb"
OUTPUT_ENV_VAR = "HELMHOLTZ_LDG_OUTPUT"


def get_output_dir(output_dir=None):
    """
    Ausgabeverzeichnis bestimmen: explizit übergeben, sonst $HELMHOLTZ_LDG_OUTPUT, sonst ./output.
    Das Verzeichnis wird bei Bedarf angelegt.
    """
    path = output_dir or os.environ.get(OUTPUT_ENV_VAR) or "output"
    os.makedirs(path, exist_ok=True)
    return path


def get_database_path(output_dir=None):
    """Get the path to the persistent DuckDB result store."""
    return os.path.join(get_output_dir(output_dir), DATABASE_FILE)


def get_connection(db_path=None):
    """Get a connection to the DuckDB result store."""
    db_path = db_path or get_database_path()
    parent = os.path.dirname(db_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return duckdb.connect(database=db_path)
