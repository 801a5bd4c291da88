"""
Markdown-Report der Studien: Parameterblock, Tabellen im Stil der Vergleichstabelle der beiden LDG-Verfahren, Charts.
"""
import math
import os

REPORT_FILE = "study_report.md"

TABLE_COLUMNS = ("1/h", "|u-u_h|_H1", "order", "||sigma-sigma_h||", "order", "wall time [s]")


def format_error(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.4E}"


def format_order(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{value:.4f}"


def rate_table_markdown(rows):
    """
    Tabelle (1/h, H1-Fehler, Ordnung, sigma-Fehler, Ordnung, Laufzeit) als Markdown.
    rows: Liste von Dicts mit m, h1_error, h1_order, sigma_error, sigma_order, wall_time, status
    """
    lines = ["| " + " | ".join(TABLE_COLUMNS) + " |", "|" + "---|" * len(TABLE_COLUMNS)]
    for row in rows:
        if row.get("status", "ok") != "ok":
            lines.append(f"| {row['m']} | failed: {row.get('message', '')} | | | | |")
            continue
        lines.append(
            f"| {row['m']} | {format_error(row.get('h1_error'))} | {format_order(row.get('h1_order'))} "
            f"| {format_error(row.get('sigma_error'))} | {format_order(row.get('sigma_order'))} "
            f"| {row.get('wall_time', 0.0):.2f} |"
        )
    return "\n".join(lines)


def records_markdown(rows, columns):
    """Beliebige Zeilen (Dicts) als Markdown-Tabelle mit den angegebenen Spalten."""
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        cells = []
        for column in columns:
            value = row.get(column)
            if isinstance(value, float):
                cells.append(format_error(value))
            else:
                cells.append("" if value is None else str(value))
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines)


def key_value_markdown(content):
    lines = ["| Parameter | Wert |", "|---|---|"]
    for k, v in content.items():
        lines.append(f"| {k} | {v} |")
    return "\n".join(lines)


def write_markdown_report(title, parameters, tables, charts=(), output_path=REPORT_FILE):
    """
    Erstellt einen leserlichen Markdown-Report.
    Args:
        title (str): Überschrift
        parameters (dict): Parameterblock (k, Flussparameter, Quadraturgrade, ...)
        tables (dict): Abschnittstitel -> Zeilen für rate_table_markdown
        charts (list): Pfade der SVG-Charts (relativ zum Report verlinkt)
        output_path (str): Zieldatei
    """
    md_lines = [f"# {title}\n", "## Parameter\n", key_value_markdown(parameters), ""]

    for section, rows in tables.items():
        md_lines.append(f"## {section}\n")
        md_lines.append(rate_table_markdown(rows))
        md_lines.append("")

    if charts:
        md_lines.append("## Charts\n")
        base = os.path.dirname(os.path.abspath(output_path))
        for chart in charts:
            rel = os.path.relpath(os.path.abspath(chart), base)
            name = os.path.splitext(os.path.basename(chart))[0]
            md_lines.append(f"![{name}]({rel})\n")

    with open(output_path, "w") as f:
        f.write("\n".join(md_lines))
    return output_path


def append_to_markdown_report(content, output_path=REPORT_FILE, section_title=None):
    """
    Hängt einen weiteren Abschnitt an den Report an.
    content: Dict (als Parametertabelle), Liste von Zeilen (als Ratentabelle) oder String.
    """
    lines = []
    if section_title:
        lines.append(f"\n## {section_title}\n")
    if isinstance(content, dict):
        lines.append(key_value_markdown(content))
        lines.append("")
    elif isinstance(content, list):
        lines.append(rate_table_markdown(content))
        lines.append("")
    else:
        lines.append(str(content))
    with open(output_path, "a") as f:
        f.write("\n".join(lines))
    return output_path
