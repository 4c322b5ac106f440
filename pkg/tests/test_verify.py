import pytest

from jetexp.chart import Chart, Truncation
from jetexp.geometry import Connection
from jetexp.poly import GradedPoly
from jetexp.verify import SUITE_NAMES, run_suite

from conftest import build_chart


def torsionful():
    chart = Chart([("x1", 0), ("x2", 0)], Truncation(3, 3, 6))
    conn = Connection(chart, {(0, 1, 0): GradedPoly.constant(chart, 1)},
                      torsion_free=False)
    return chart, conn


def test_all_runs_every_suite():
    chart, conn = build_chart("line_curved")
    results = run_suite("all", chart, conn, seed=0, weight=3)
    names = [r.name for r in results]
    assert "comultiplication-intertwines-map" in names
    assert "correction-equals-minus-dual-form" in names
    assert "augmentation-routes-agree" in names
    assert "transferred-augmentation-matches" in names
    assert all(r.status == "PASS" for r in results)


def test_unknown_suite_rejected():
    chart, conn = build_chart("line_flat")
    with pytest.raises(ValueError):
        run_suite("nonsense", chart, conn)


def test_torsionful_chart_skips_gated_suites():
    chart, conn = torsionful()
    for suite in ("symbols", "flat-connection", "resolution", "perturbation"):
        results = run_suite(suite, chart, conn, seed=0, weight=3)
        assert all(r.status == "SKIP" for r in results)
        assert all(r.witness for r in results)
    # the coalgebra identity holds for arbitrary connections
    results = run_suite("coalgebra", chart, conn, seed=0)
    assert all(r.status == "PASS" for r in results)


def test_check_line_format():
    chart, conn = build_chart("line_flat")
    (result,) = run_suite("coalgebra", chart, conn, seed=0)
    assert result.line() == "CHECK comultiplication-intertwines-map PASS"
    chart, conn = torsionful()
    (result,) = run_suite("symbols", chart, conn, seed=0)
    assert result.line().startswith("CHECK leading-terms SKIP")


def test_suite_names_are_stable():
    assert SUITE_NAMES == ("coalgebra", "symbols", "flat-connection",
                           "resolution", "perturbation")


def test_every_shipped_chart_loads_and_passes_a_suite():
    import os
    from jetexp.chartfile import load_chart_file
    chart_dir = os.path.join(os.path.dirname(__file__), os.pardir, "charts")
    seen = 0
    for name in sorted(os.listdir(chart_dir)):
        if not name.endswith(".chart"):
            continue
        chart, conn = load_chart_file(os.path.join(chart_dir, name))
        results = run_suite("coalgebra", chart, conn, seed=0)
        assert all(r.status == "PASS" for r in results), name
        seen += 1
    assert seen >= 6
