"""
ReportService - renders a CorrelationReport as text, CSV or JSON.

Columns, in order: property, model, correlation (3 decimals), p-value
(up to 3 significant figures), n.
"""

import io
import json
import os
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .base_service import BaseService
from .file_storage_service import FileStorageService, dump_json
from ..exceptions import ConfigException, DataException, ValidationException
from ..models.evaluation import CorrelationReport, CorrelationResult, PValueMethod
from ..models.scoring import PhysicalProperty

REPORT_FORMATS = ("text", "csv", "json")
CSV_COLUMNS = ("property", "model_id", "rho", "rho_reported", "p_value", "n", "method", "seed", "t_approx_p_value",
               "degenerate")
HEADER = f"{'property':<12}{'model':<28}{'rho':>8}{'p-value':>10}{'n':>5}"

LITERATURE_N = 35

# Published zero-shot correlations (model, property, rho, p), rendering fixtures only.
LITERATURE_BASELINES: Tuple[Tuple[str, PhysicalProperty, float, float], ...] = (
    ("Octopi-ViTaL", PhysicalProperty.HARDNESS, 0.501, 0.005),
    ("Octopi-ViTaL (vision only)", PhysicalProperty.HARDNESS, 0.307, 0.099),
    ("Octopi (fine-grained)", PhysicalProperty.HARDNESS, 0.307, 0.099),
    ("Octopi (original)", PhysicalProperty.HARDNESS, 0.015, 0.935),
    ("Octopi-ViTaL", PhysicalProperty.ELASTICITY, 0.530, 0.003),
    ("Octopi-ViTaL (vision only)", PhysicalProperty.ELASTICITY, 0.452, 0.012),
    ("Octopi (fine-grained)", PhysicalProperty.ELASTICITY, 0.053, 0.781),
    ("Octopi (original)", PhysicalProperty.ELASTICITY, -0.060, 0.753),
    ("Octopi-ViTaL", PhysicalProperty.ROUGHNESS, 0.643, 0.0001),
    ("Octopi-ViTaL (vision only)", PhysicalProperty.ROUGHNESS, 0.413, 0.023),
    ("Octopi (fine-grained)", PhysicalProperty.ROUGHNESS, -0.010, 0.959),
    ("Octopi (original)", PhysicalProperty.ROUGHNESS, 0.118, 0.534),
)


def literature_reports(dataset_id: str = "household-35") -> List[CorrelationReport]:
    """One report per published model; raw signs are kept as printed."""
    by_model: Dict[str, List[CorrelationResult]] = {}
    for model, prop, rho, p in LITERATURE_BASELINES:
        by_model.setdefault(model, []).append(
            CorrelationResult(property=prop, rho=rho, rho_reported=rho, p_value=p,
                              n=LITERATURE_N, method=PValueMethod.AUTO)
        )
    return [CorrelationReport(tuple(results), dataset_id, model) for model, results in by_model.items()]


NA = "n/a"


def format_p(p: Optional[float]) -> str:
    return NA if p is None else f"{p:.3g}"


def format_row(result: CorrelationResult, model_id: str) -> str:
    rho = NA if result.rho_reported is None else f"{result.rho_reported:.3f}"
    return (f"{result.property.value:<12}{model_id:<28}{rho:>8}"
            f"{format_p(result.p_value):>10}{result.n:>5}")


def _ordered(report: CorrelationReport) -> List[CorrelationResult]:
    return [report.result(prop) for prop in PhysicalProperty if any(r.property is prop for r in report.results)]


def render_text(report: CorrelationReport) -> str:
    lines = [
        "Spearman rank correlation against ground truth",
        f"dataset: {report.dataset_id}",
        HEADER,
    ]
    lines += [format_row(result, report.model_id) for result in _ordered(report)]
    for result in _ordered(report):
        if result.degenerate:
            lines.append(f"{result.property.value}: no correlation, {result.degenerate}")
    lines.append(f"format compliance: {report.format_compliance:.3f}")
    if report.attempted:
        lines.append(f"objects attempted: {report.attempted}, failed: {len(report.failed_objects)}")
    if report.failed_objects:
        lines.append(f"failed objects: {', '.join(report.failed_objects)}")
    return "\n".join(lines) + "\n"


def render_comparison(reports: Sequence[CorrelationReport]) -> str:
    """Several models side by side, grouped by property."""
    lines = ["Spearman rank correlation against ground truth", HEADER]
    for prop in PhysicalProperty:
        for report in reports:
            for result in report.results:
                if result.property is prop:
                    lines.append(format_row(result, report.model_id))
    return "\n".join(lines) + "\n"


def _result_record(result: CorrelationResult, model_id: str) -> dict:
    return {
        "property": result.property.value,
        "model_id": model_id,
        "rho": result.rho,
        "rho_reported": result.rho_reported,
        "p_value": result.p_value,
        "n": result.n,
        "method": result.method.value,
        "seed": result.seed,
        "t_approx_p_value": result.t_approx_p_value,
        "degenerate": result.degenerate,
    }


def render_csv(report: CorrelationReport) -> str:
    frame = pd.DataFrame([_result_record(r, report.model_id) for r in _ordered(report)], columns=list(CSV_COLUMNS))
    frame["seed"] = frame["seed"].astype("Int64")
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render_json(report: CorrelationReport) -> str:
    return dump_json({
        "dataset_id": report.dataset_id,
        "model_id": report.model_id,
        "format_compliance": report.format_compliance,
        "attempted": report.attempted,
        "failed_objects": list(report.failed_objects),
        "results": [_result_record(r, report.model_id) for r in _ordered(report)],
    })


def render_report(report: CorrelationReport, fmt: str = "text") -> str:
    if fmt == "text":
        return render_text(report)
    if fmt == "csv":
        return render_csv(report)
    if fmt == "json":
        return render_json(report)
    raise ConfigException(f"unknown report format {fmt!r}; use one of {', '.join(REPORT_FORMATS)}")


def _optional(value) -> Optional[float]:
    if value is None or pd.isna(value):
        return None
    return value


def _float(value) -> Optional[float]:
    value = _optional(value)
    return None if value is None else float(value)


def parse_csv_report(text: str) -> Tuple[CorrelationResult, ...]:
    """Read back the CSV rendering."""
    frame = pd.read_csv(io.StringIO(text), float_precision="round_trip",
                        dtype={"seed": "Int64", "degenerate": "object"})
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ValidationException(f"report CSV lacks columns: {', '.join(missing)}", 1)
    results = []
    for row in frame.itertuples(index=False):
        seed = _optional(row.seed)
        t_approx = _optional(row.t_approx_p_value)
        results.append(CorrelationResult(
            property=PhysicalProperty(row.property),
            rho=_float(row.rho),
            rho_reported=_float(row.rho_reported),
            p_value=_float(row.p_value),
            n=int(row.n),
            method=PValueMethod(row.method),
            seed=None if seed is None else int(seed),
            t_approx_p_value=None if t_approx is None else float(t_approx),
            degenerate=_optional(row.degenerate),
        ))
    return tuple(results)


def parse_json_report(text: str) -> CorrelationReport:
    """Read back the JSON rendering."""
    try:
        data = json.loads(text)
        results = tuple(
            CorrelationResult(
                property=PhysicalProperty(r["property"]),
                rho=r["rho"],
                rho_reported=r["rho_reported"],
                p_value=r["p_value"],
                n=int(r["n"]),
                method=PValueMethod(r["method"]),
                seed=r.get("seed"),
                t_approx_p_value=r.get("t_approx_p_value"),
                degenerate=r.get("degenerate"),
            )
            for r in data["results"]
        )
        return CorrelationReport(
            results=results,
            dataset_id=data["dataset_id"],
            model_id=data["model_id"],
            format_compliance=float(data["format_compliance"]),
            attempted=int(data.get("attempted", 0)),
            failed_objects=tuple(data.get("failed_objects", ())),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise ValidationException(f"report JSON is malformed: {e}") from e


class ReportService(BaseService):
    """Writes report.txt, report.csv and report.json once per run."""

    def __init__(self, storage: FileStorageService):
        super().__init__()
        self.storage = storage

    def write(self, report: CorrelationReport, run_id: str) -> Dict[str, str]:
        paths = {}
        for fmt, suffix in (("text", "txt"), ("csv", "csv"), ("json", "json")):
            path = os.path.join(self.storage.run_dir(run_id), f"report.{suffix}")
            if not self.storage.save_text(path, render_report(report, fmt)):
                self.log_error(f"❌ Could not write {path}")
                continue
            paths[fmt] = path
        self.log_info(f"📄 Report for run {run_id} written ({', '.join(sorted(paths))})")
        return paths

    def load(self, run_id: str) -> CorrelationReport:
        """The report a finished run wrote, read from report.json."""
        path = os.path.join(self.storage.run_dir(run_id), "report.json")
        text = self.storage.load_text(path)
        if text is None:
            raise DataException(f"run {run_id} has no report at {path}")
        return parse_json_report(text)


def compliance(clean: int, attempted: int) -> float:
    """Warning-free parses over attempted parses; 1.0 when nothing was parsed."""
    return 1.0 if attempted == 0 else clean / attempted
