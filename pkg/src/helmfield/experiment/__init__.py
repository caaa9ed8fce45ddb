"""Experiment orchestration: file formats, sweeps and the command line."""

from .io import (load_dictionary, load_field, load_report, save_dictionary, save_field,
                 save_report)
from .sweep import (DatasetSource, ReportRow, SweepSpec, SyntheticSource, load_sweep_config,
                    run_sweep)

__all__ = [
    "load_field", "save_field", "load_dictionary", "save_dictionary", "load_report", "save_report",
    "SweepSpec", "ReportRow", "SyntheticSource", "DatasetSource", "run_sweep", "load_sweep_config",
]
