"""Report builders and writers for fits, benchmarks and simulated data.

Everything outside the ``metadata`` block depends only on the inputs, the
configuration and the seed, so two runs with the same settings produce
identical reports apart from that block.
"""

import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .api import FitResult
from .constants import LEVEL_GROUP, REPORT_SCHEMA_VERSION
from .core import GroupedDesign, SamplerConfig, SelectionPattern
from .posterior import effective_sample_size
from .simulate import BenchmarkReport, CoefficientTable, FailureRecord, SensitivityReport


def _clean(value: Any) -> Any:
    """Convert numpy scalars and arrays to JSON types; non-finite floats become None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


def build_metadata(elapsed: Optional[float] = None) -> Dict[str, Any]:
    """Version, schema and timing; excluded from the determinism contract."""
    from . import __version__

    metadata: Dict[str, Any] = {
        "version": __version__,
        "schema_version": REPORT_SCHEMA_VERSION,
        "timestamp": datetime.now().isoformat(),
        "tool": "groupspike",
    }
    if elapsed is not None:
        metadata["elapsed_seconds"] = round(elapsed, 3)
    return metadata


def _run_header(seed: int, config: Dict[str, Any]) -> Dict[str, Any]:
    """Fields every report starts with: package version, seed and resolved config."""
    from . import __version__

    return {"version": __version__, "seed": seed, "config": config}


def _finish(
    data: Dict[str, Any], include_metadata: bool, elapsed: Optional[float] = None
) -> Dict[str, Any]:
    data = _clean(data)
    if include_metadata:
        data["metadata"] = build_metadata(elapsed)
    return data


def _failure_rows(failures: Sequence[FailureRecord]) -> List[Dict[str, Any]]:
    return [
        {
            "example": f.example,
            "method": f.method,
            "replication": f.replication,
            "error": f.error,
            "message": f.message,
        }
        for f in sorted(failures, key=lambda f: (f.example, f.method, f.replication))
    ]


def selection_to_dict(pattern: Optional[SelectionPattern]) -> Optional[Dict[str, list]]:
    return pattern.to_dict() if pattern is not None else None


def build_fit_data(
    result: FitResult,
    design: GroupedDesign,
    config: SamplerConfig,
    include_metadata: bool = True,
) -> Dict[str, Any]:
    """Build the machine-readable report of one fit."""
    data: Dict[str, Any] = {
        "method": result.method,
        **_run_header(config.seed, config.to_dict()),
        "n": design.n,
        "p": design.p,
        "group_sizes": list(design.group_sizes),
    }

    summary = result.summary
    if summary is not None:
        data["coefficients"] = {
            "mean": summary.coef_mean.tolist(),
            "median": summary.coef_median.tolist(),
            "ci_lower": summary.ci_lower,
            "ci_upper": summary.ci_upper,
        }
        data["selection"] = {
            "mtm": selection_to_dict(summary.mtm),
            "hppm": selection_to_dict(summary.hppm),
            "hppm_frequency": summary.hppm_frequency,
            "group_hppm": selection_to_dict(summary.group_hppm),
            "group_hppm_frequency": summary.group_hppm_frequency,
        }
    else:
        data["coefficients"] = {"estimate": result.coefficients.tolist()}
        data["selection"] = {"support": selection_to_dict(result.selection)}

    draws = result.draws
    if draws is not None:
        ess = effective_sample_size(draws.beta)
        diagnostics: Dict[str, Any] = {
            "n_iter": draws.n_iter,
            "n_burn": draws.n_burn,
            "n_draws": draws.n_draws,
            "effective_sample_size": ess,
            "min_effective_sample_size": float(np.min(ess)) if ess.size else None,
        }
        if draws.sparse:
            diagnostics["spike_frequency"] = draws.spike_frequency()
        if draws.em is not None:
            diagnostics["em"] = {
                "parameter": draws.em.name,
                "value": draws.em.value,
                "path": draws.em.path,
                "converged": draws.em.converged,
            }
        data["diagnostics"] = diagnostics

    if result.cv is not None:
        data["cross_validation"] = {
            "lambda1": result.cv.lambda1,
            "lambda2": result.cv.lambda2,
            "l1_ratio": result.cv.grids[result.cv.grid_index].ratio,
            "mean_squared_error": result.cv.best_error,
            "curves": [
                {"ratio": grid.ratio, "penalties": list(grid.values), "errors": curve}
                for grid, curve in zip(result.cv.grids, result.cv.curves)
            ],
        }

    return _finish(data, include_metadata, result.elapsed)


def build_benchmark_data(report: BenchmarkReport, include_metadata: bool = True) -> Dict[str, Any]:
    """Build the benchmark payload: aggregated rows, replication records and failures."""
    data: Dict[str, Any] = {
        **_run_header(report.seed, report.config),
        "n_reps": report.n_reps,
        "level": report.level,
        "examples": report.examples,
        "methods": report.methods,
        "rows": [
            {
                "example": row.example,
                "method": row.method,
                "n_reps": row.n_reps,
                "n_failed": row.n_failed,
                "rates": row.rates,
                "mse": row.mse,
            }
            for row in report.rows
        ],
        "replications": [
            {
                "example": o.example,
                "method": o.method,
                "replication": o.replication,
                "rates": o.rates,
                "mse": o.mse,
                "misclassification": o.misclassification,
            }
            for o in sorted(report.outcomes, key=lambda o: (o.example, o.method, o.replication))
        ],
        "failures": _failure_rows(report.failures),
    }
    return _finish(data, include_metadata)


def build_sensitivity_data(
    report: SensitivityReport, include_metadata: bool = True
) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        **_run_header(report.seed, report.config),
        "n_reps": report.n_reps,
        "rows": [
            {
                "setting": r.setting,
                "mtm": r.mtm,
                "hppm": r.hppm,
                "n_reps": r.n_reps,
                "n_failed": r.n_failed,
            }
            for r in report.rows
        ],
        "group_lasso_reference": report.reference,
        "failures": _failure_rows(report.failures),
    }
    return _finish(data, include_metadata)


def dumps_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, allow_nan=False)


def export_json(data: Dict[str, Any], output_file: Path) -> Path:
    """
    Write a report payload as JSON.

    Args:
        data: Payload from one of the ``build_*_data`` functions
        output_file: Output file path

    Returns:
        Path to exported file
    """
    output_file.parent.mkdir(parents=True, exist_ok=True)
    output_file.write_text(dumps_json(data) + "\n", encoding="utf-8")
    return output_file


def _fmt(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return f"{value:.6g}"


BENCHMARK_SELECTORS = ("mtm", "hppm", "support")
BENCHMARK_ESTIMATORS = ("mean", "median", "fit")


def export_benchmark_csv(report: BenchmarkReport, output_file: Path) -> Path:
    """
    Export the benchmark as one row per (example, method).

    Rates are at the report's selection level; empty cells mark values that
    do not apply or are undefined.
    """
    import csv

    prefix = "group_" if report.level == LEVEL_GROUP else ""
    output_file.parent.mkdir(parents=True, exist_ok=True)
    with output_file.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        header = ["Example", "Method", "Reps", "Failed"]
        for selector in BENCHMARK_SELECTORS:
            header.extend([f"TPR_{selector}", f"FPR_{selector}"])
        for estimator in BENCHMARK_ESTIMATORS:
            header.extend([f"MSE_{estimator}", f"SE_{estimator}"])
        writer.writerow(header)

        for row in report.rows:
            cells = [str(row.example), row.method, str(row.n_reps), str(row.n_failed)]
            for selector in BENCHMARK_SELECTORS:
                rates = row.rates.get(selector, {})
                cells.extend([_fmt(rates.get(f"{prefix}tpr")), _fmt(rates.get(f"{prefix}fpr"))])
            for estimator in BENCHMARK_ESTIMATORS:
                mse = row.mse.get(estimator, {})
                cells.extend([_fmt(mse.get("median")), _fmt(mse.get("se"))])
            writer.writerow(cells)

    return output_file


def export_replications_csv(report: BenchmarkReport, output_file: Path) -> Path:
    """Export every (example, method, replication) record for audit."""
    import csv

    with output_file.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["Example", "Method", "Replication", "Kind", "Name", "Value"])
        for o in sorted(report.outcomes, key=lambda o: (o.example, o.method, o.replication)):
            for selector, rates in sorted(o.rates.items()):
                for key, value in rates.items():
                    writer.writerow(
                        [o.example, o.method, o.replication, selector, key, _fmt(value)]
                    )
            for estimator, value in sorted(o.mse.items()):
                writer.writerow([o.example, o.method, o.replication, "mse", estimator, _fmt(value)])
        for fail in report.failures:
            writer.writerow(
                [fail.example, fail.method, fail.replication, "failure", fail.error, fail.message]
            )

    return output_file


def export_sensitivity_csv(report: SensitivityReport, output_file: Path) -> Path:
    """Misclassification table: one column per prior setting, rows MTM, HPPM and GL."""
    import csv

    with output_file.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow([""] + [r.setting for r in report.rows])
        writer.writerow(["MTM"] + [_fmt(r.mtm) for r in report.rows])
        writer.writerow(["HPPM"] + [_fmt(r.hppm) for r in report.rows])
        writer.writerow(["GL"] + [_fmt(report.reference) for _ in report.rows])

    return output_file


def export_coefficient_csv(table: CoefficientTable, output_file: Path) -> Path:
    import csv

    rows = table.as_rows()
    with output_file.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) if k != "index" else v for k, v in row.items()})

    return output_file


def build_coefficient_data(
    table: CoefficientTable, include_metadata: bool = True
) -> Dict[str, Any]:
    data = {**_run_header(table.seed, table.config), "rows": table.as_rows()}
    return _finish(data, include_metadata)


def export_design_csv(design: GroupedDesign, output_file: Path) -> Path:
    """Write a design in the ``fit`` input format: header, ``y`` first, then covariates."""
    import csv

    output_file.parent.mkdir(parents=True, exist_ok=True)
    with output_file.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["y"] + [f"x{j + 1}" for j in range(design.p)])
        for i in range(design.n):
            writer.writerow([repr(float(design.y[i]))] + [repr(float(v)) for v in design.x[i]])

    return output_file


def export_group_spec(group_sizes: Sequence[int], output_file: Path) -> Path:
    output_file.parent.mkdir(parents=True, exist_ok=True)
    output_file.write_text(json.dumps([int(s) for s in group_sizes]) + "\n", encoding="utf-8")
    return output_file


def rows_for_console(report: BenchmarkReport) -> List[List[str]]:
    """Compact per-row strings for the rich summary table."""
    prefix = "group_" if report.level == LEVEL_GROUP else ""
    out = []
    for row in report.rows:
        selector = next((s for s in BENCHMARK_SELECTORS if s in row.rates), None)
        rates = row.rates.get(selector, {}) if selector else {}
        estimator = next((e for e in ("median", "fit", "mean") if e in row.mse), None)
        mse = row.mse.get(estimator, {}) if estimator else {}
        se = mse.get("se")
        out.append(
            [
                str(row.example),
                row.method,
                selector or "-",
                _fmt(rates.get(f"{prefix}tpr")) or "-",
                _fmt(rates.get(f"{prefix}fpr")) or "-",
                f"{_fmt(mse.get('median'))} ({_fmt(se) or '-'})" if mse else "-",
                f"{row.n_reps}/{row.n_reps + row.n_failed}",
            ]
        )
    return out
