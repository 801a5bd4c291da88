from __future__ import annotations

import math
from collections.abc import Sequence

from helmholtz_ldg.evaluation.error_norms import NORM_NAMES, ErrorReport

EXACT = "exact"


def observed_order(e1: float, e2: float, h1: float, h2: float) -> float | str:
    """log(e1/e2) / log(h1/h2); "exact" when either error vanishes."""
    if not h1 > h2 > 0:
        raise ValueError("mesh sizes must be positive and strictly decreasing")
    if e1 < 0 or e2 < 0:
        raise ValueError("errors must be non-negative")
    if e1 == 0 or e2 == 0:
        return EXACT
    return math.log(e1 / e2) / math.log(h1 / h2)


def _provenance(report: ErrorReport) -> tuple:
    return (report.method, report.k, report.beta0, report.delta0, report.beta_scaling, report.delta_scaling)


def convergence_rates(reports: Sequence[ErrorReport], norms: Sequence[str] = NORM_NAMES) -> list[dict]:
    """
    Observed orders between consecutive reports, one dict per report.

    The first entry carries None for every order.
    """
    if len(reports) < 2:
        raise ValueError("convergence rates need at least two reports")
    if len({_provenance(r) for r in reports}) != 1:
        raise ValueError("reports must share method, k and flux parameters")
    for previous, current in zip(reports, reports[1:]):
        if not current.h < previous.h:
            raise ValueError("reports must be ordered by strictly decreasing h")

    rows = [{"m": reports[0].m, "h": reports[0].h, **{f"{name}_order": None for name in norms}}]
    for previous, current in zip(reports, reports[1:]):
        row = {"m": current.m, "h": current.h}
        for name in norms:
            row[f"{name}_order"] = observed_order(previous.error(name), current.error(name), previous.h, current.h)
        rows.append(row)
    return rows
