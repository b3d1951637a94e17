"""
Artifact writer: trace.csv, report.json, summary.txt and two-column .dat series.
"""

import json
from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

from dateutil import tz
from jinja2 import Environment, FileSystemLoader

from . import __version__
from .config import ExperimentConfig
from .experiments import Experiment, ExperimentResult
from .utils import slugify

TRACE_HEADER = "n,dist_power,dist_cesaro\n"


class ArtifactWriter:
    """Writes the outputs of one experiment run into its own directory."""

    def __init__(self, output_dir: Optional[str], experiment: Experiment):
        """Initialize the writer with an output directory and the template environment.

        Args:
            output_dir: Base directory; each experiment gets a subdirectory named after its id
            experiment: The catalog entry whose results are written
        """
        base = Path("output") if output_dir is None else Path(output_dir)
        self.experiment = experiment
        self.output_dir = base / slugify(experiment.id)
        self.series_dir = self.output_dir / "series"
        for directory in [self.output_dir, self.series_dir]:
            directory.mkdir(parents=True, exist_ok=True)

        self.env = Environment(
            loader=FileSystemLoader(Path(__file__).parent / "templates"),
            keep_trailing_newline=True,
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def write(self, result: ExperimentResult, config: ExperimentConfig) -> Dict[str, Path]:
        """
        Write every artifact for ``result`` and return their paths.

        Args:
            result: The finished experiment
            config: The configuration it ran with (recorded in report.json)

        Returns:
            Mapping of artifact name to the path written
        """
        paths = {
            "trace": self._write_trace(result),
            "report": self._write_report(result, config),
            "summary": self._write_summary(result, config),
        }
        for name, path in self._write_series(result).items():
            paths[f"series:{name}"] = path
        return paths

    def _write_trace(self, result: ExperimentResult) -> Path:
        path = self.output_dir / "trace.csv"
        # Experiments without a trace still get the header so every run has the same layout.
        body = result.trace.to_csv() if result.trace is not None else TRACE_HEADER
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(body)
        return path

    def _write_report(self, result: ExperimentResult, config: ExperimentConfig) -> Path:
        path = self.output_dir / "report.json"
        report = {
            "experiment": result.experiment,
            "title": self.experiment.title,
            "checks_result": self.experiment.statement,
            "seed": result.seed,
            "passed": result.passed,
            "generated_at": datetime.now(tz.tzutc()).isoformat(),
            "version": __version__,
            "config": _config_to_dict(config),
            "checks": [check.to_dict() for check in result.checks],
            "fits": result.fits,
            "verdicts": result.verdicts,
            "evidence": result.evidence,
            "trace": result.trace.to_dict() if result.trace is not None else None,
            "distance_kind": "dictionary operator distance",
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(report, f, indent=2, default=str)
        return path

    def _write_summary(self, result: ExperimentResult, config: ExperimentConfig) -> Path:
        path = self.output_dir / "summary.txt"
        template = self.env.get_template("summary.txt.j2")
        content = template.render(
            experiment=self.experiment,
            result=result,
            config=config,
            trace_rows=len(result.trace) if result.trace is not None else 0,
        )
        with open(path, "w", encoding="utf-8") as f:
            f.write(content)
        return path

    def _write_series(self, result: ExperimentResult) -> Dict[str, Path]:
        paths = {}
        for name, points in result.series.items():
            path = self.series_dir / f"{slugify(name.replace('.', 'p'))}.dat"
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(f"# {result.experiment} {name}\n")
                f.write(f"# seed={result.seed}\n")
                for x, y in points:
                    f.write(f"{x!r} {y!r}\n")
            paths[name] = path
        return paths


def _config_to_dict(config: ExperimentConfig) -> dict:
    data = asdict(config)
    for key in ("dictionary", "output_dir"):
        if data[key] is not None:
            data[key] = str(data[key])
    return data
