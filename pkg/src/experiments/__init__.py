"""Configuration-driven experiments and reports."""
from .config import ExperimentConfig, load_experiment, parse_config
from .report import SCHEMA_VERSION, CheckEntry, Report, render_table, to_json, write_report
from .runner import ExperimentRunner

__all__ = [
    'ExperimentConfig',
    'load_experiment',
    'parse_config',
    'SCHEMA_VERSION',
    'CheckEntry',
    'Report',
    'render_table',
    'to_json',
    'write_report',
    'ExperimentRunner',
]
