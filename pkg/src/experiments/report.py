"""Experiment reports: deterministic JSON and rich tables."""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from ..dyadic import DyadicTime

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
FLOAT_DIGITS = 12


class CheckEntry(BaseModel):
    """One named check with its residuals."""
    operation: str
    subject: str
    passed: bool
    threshold: float
    residuals: Dict[str, float] = {}
    failures: List[str] = []
    details: Dict[str, Any] = {}


class Report(BaseModel):
    """Everything a command produced; `passed` drives the exit code."""
    schema_version: str = SCHEMA_VERSION
    command: str
    config_name: str
    config_digest: str
    checks: List[CheckEntry] = []
    covariance: Dict[str, Any] = {}
    index: Dict[str, Any] = {}
    powers: Dict[str, Any] = {}
    histories: Dict[str, List[float]] = {}
    errors: List[str] = []
    passed: bool = False
    summary: Dict[str, Any] = Field(default_factory=dict)

    def finalize(self) -> "Report":
        self.passed = not self.errors and all(c.passed for c in self.checks)
        if self.index.get('match') is False:
            self.passed = False
        self.summary = {
            'checks': len(self.checks),
            'failed': sorted(c.operation + ':' + c.subject for c in self.checks if not c.passed),
        }
        return self


def _clean(value: Any, digits: int) -> Any:
    if isinstance(value, BaseModel):
        return _clean(value.model_dump(), digits)
    if isinstance(value, DyadicTime):
        return value.to_pair()
    if isinstance(value, dict):
        return {str(k): _clean(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v, digits) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist(), digits)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_clean(float(value.real), digits), _clean(float(value.imag), digits)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            logger.warning(f"Non-finite value {value} replaced by null in report")
            return None
        if value == 0.0:
            return 0.0
        return float(f"{value:.{digits}g}")
    return value


def to_json(report: Report, float_digits: int = FLOAT_DIGITS) -> str:
    """Sorted keys and fixed significant digits: identical input, identical bytes."""
    return json.dumps(_clean(report, float_digits), sort_keys=True, indent=2) + "\n"


def write_report(report: Report, out: str, float_digits: int = FLOAT_DIGITS) -> Path:
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(report, float_digits), encoding='utf-8')
    logger.info(f"Report written to {path}")
    return path


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3e}"


def render_table(report: Report, console: Optional[Console] = None):
    """Print the report as aligned tables."""
    console = console or Console()
    status = "[green]PASS[/green]" if report.passed else "[red]FAIL[/red]"
    console.print(f"[bold]{report.command}[/bold] {report.config_name} ({report.config_digest}) {status}")

    if report.checks:
        table = Table(title="Checks")
        table.add_column("Operation")
        table.add_column("Subject")
        table.add_column("Max residual", justify="right")
        table.add_column("Threshold", justify="right")
        table.add_column("Status")
        for c in report.checks:
            worst = max(c.residuals.values()) if c.residuals else None
            table.add_row(c.operation, c.subject, _fmt(worst), _fmt(c.threshold), "pass" if c.passed else "FAIL")
        console.print(table)

    gamma = report.covariance.get('gamma')
    if gamma:
        labels = report.covariance.get('labels', [])
        table = Table(title="Covariance")
        table.add_column("")
        for label in labels:
            table.add_column(label, justify="right")
        for label, row in zip(labels, gamma):
            table.add_row(label, *[f"{complex(z):.6g}" for z in row])
        console.print(table)

    if report.index:
        table = Table(title="Index")
        table.add_column("Quantity")
        table.add_column("Value", justify="right")
        for key in sorted(report.index):
            table.add_row(key, str(report.index[key]))
        console.print(table)

    if report.powers:
        table = Table(title="Powers amalgamation")
        table.add_column("Quantity")
        table.add_column("Value", justify="right")
        for key in sorted(report.powers):
            table.add_row(key, str(report.powers[key]))
        console.print(table)

    for error in report.errors:
        console.print(f"[red]Error: {error}[/red]")
