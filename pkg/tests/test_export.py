"""Tests for report builders and writers."""

import csv
import json

import numpy as np

from groupspike.api import fit
from groupspike.cli import load_csv
from groupspike.core import BglSsHyper, SamplerConfig, make_design
from groupspike.export import (
    _clean,
    build_benchmark_data,
    build_coefficient_data,
    build_fit_data,
    build_sensitivity_data,
    dumps_json,
    export_benchmark_csv,
    export_design_csv,
    export_group_spec,
    export_json,
    export_replications_csv,
    rows_for_console,
)
from groupspike.rand import RngStream
from groupspike import __version__
from groupspike.simulate import (
    CoefficientTable,
    FailureRecord,
    SensitivityReport,
    SensitivityRow,
    run_benchmark,
)

TINY = SamplerConfig(n_iter=40, n_burn=10, em_rounds=0, bgl_ss=BglSsHyper(lam=1.0))


def _design(seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((20, 4))
    return make_design(x @ np.array([1.0, 0.0, 0.0, -1.0]) + rng.standard_normal(20), x, (2, 2))


def test_clean_converts_numpy_and_non_finite():
    """numpy values become JSON types and NaN or infinity become None."""
    cleaned = _clean({"a": np.float64(1.5), "b": np.array([1.0, np.nan]), "c": (np.int64(2),)})
    assert cleaned == {"a": 1.5, "b": [1.0, None], "c": [2]}
    assert _clean(float("inf")) is None
    assert _clean(np.bool_(True)) is True


def test_fit_report_for_sampler():
    """Bayesian reports carry coefficients, selections and chain diagnostics."""
    design = _design()
    result = fit(design, "bgl-ss", TINY, RngStream(1))
    data = build_fit_data(result, design, TINY)
    assert data["method"] == "bgl-ss"
    assert set(data["coefficients"]) == {"mean", "median", "ci_lower", "ci_upper"}
    assert len(data["selection"]["mtm"]["groups"]) == 2
    assert data["diagnostics"]["n_draws"] == 30
    assert len(data["diagnostics"]["spike_frequency"]) == 2
    assert "metadata" in data
    json.loads(dumps_json(data))


def test_fit_report_is_deterministic_without_metadata():
    """Reports differ only in the metadata block."""
    design = _design()
    a = build_fit_data(fit(design, "bgl-ss", TINY, RngStream(2)), design, TINY, False)
    b = build_fit_data(fit(design, "bgl-ss", TINY, RngStream(2)), design, TINY, False)
    assert a == b
    assert "metadata" not in a


def test_fit_report_for_penalised_method():
    """CV details are included for penalised fits."""
    design = _design()
    data = build_fit_data(fit(design, "sgl", TINY, RngStream(3)), design, TINY)
    assert "estimate" in data["coefficients"]
    assert data["cross_validation"]["l1_ratio"] in (0.25, 0.5, 0.75)
    assert len(data["cross_validation"]["curves"]) == 3
    assert "diagnostics" not in data


def test_benchmark_exports(tmp_path):
    """Benchmark tables are written as JSON and CSV."""
    report = run_benchmark([2], ["ols"], 2, TINY, seed=4, boot_reps=100)
    data = build_benchmark_data(report)
    assert data["rows"][0]["n_failed"] == 2
    assert [f["replication"] for f in data["failures"]] == [0, 1]

    export_json(data, tmp_path / "bench" / "benchmark.json")
    assert json.loads((tmp_path / "bench" / "benchmark.json").read_text(encoding="utf-8"))

    path = export_benchmark_csv(report, tmp_path / "benchmark.csv")
    with path.open(newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0][:6] == ["Example", "Method", "Reps", "Failed", "TPR_mtm", "FPR_mtm"]
    assert rows[1][:4] == ["2", "ols", "0", "2"]

    replications = export_replications_csv(report, tmp_path / "replications.csv")
    assert "failure" in replications.read_text(encoding="utf-8")
    assert rows_for_console(report)[0][1] == "ols"


def test_design_csv_is_fit_input(tmp_path):
    """Exported designs load back through the fit reader."""
    design = _design()
    data = export_design_csv(design, tmp_path / "d.csv")
    groups = export_group_spec(design.group_sizes, tmp_path / "g.json")
    loaded = load_csv(data, groups)
    np.testing.assert_array_equal(loaded.x, design.x)
    np.testing.assert_array_equal(loaded.y, design.y)
    assert loaded.group_sizes == (2, 2)


def test_every_report_carries_run_header():
    """Fit, benchmark, sensitivity and coefficient reports share version, seed and config."""
    config = TINY.replace(seed=11)
    design = _design()
    sensitivity = SensitivityReport(
        rows=[SensitivityRow("pi0=0.50", 0.1, 0.2, 2, n_failed=1)],
        reference=0.4,
        n_reps=3,
        seed=11,
        config=config.to_dict(),
        failures=[FailureRecord(1, "bgl-ss[pi0=0.50]", 2, "DegenerateEstimate", "boom")],
    )
    table = CoefficientTable(
        true_beta=[1.0],
        columns=[(1.0, "bgl-ss", "median")],
        values={(1.0, "bgl-ss", "median"): [0.9]},
        seed=11,
        config=config.to_dict(),
    )
    reports = [
        build_fit_data(fit(design, "ols", config, RngStream(5)), design, config),
        build_benchmark_data(run_benchmark([2], ["ols"], 1, config, seed=11, boot_reps=50)),
        build_sensitivity_data(sensitivity),
        build_coefficient_data(table),
    ]
    for data in reports:
        assert data["version"] == __version__
        assert data["seed"] == 11
        assert data["config"] == _clean(config.to_dict())
        assert list(data)[-1] == "metadata"

    assert reports[2]["rows"][0]["n_failed"] == 1
    assert reports[2]["failures"][0]["method"] == "bgl-ss[pi0=0.50]"
    assert "metadata" not in build_coefficient_data(table, include_metadata=False)
