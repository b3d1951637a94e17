"""
Batch execution of catalog experiments.

Experiments in a batch are independent and write into their own directories,
so they run concurrently on a thread pool.
"""

import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .config import ExperimentConfig, build_config, load_config_file
from .exceptions import BallergError, ConfigError
from .experiments import CATALOG, ExperimentResult, get_experiment
from .writer import ArtifactWriter

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_CONFIG = 2


@dataclass
class RunOutcome:
    """What happened to one experiment of a batch."""

    experiment: str
    result: Optional[ExperimentResult] = None
    error: Optional[str] = None
    elapsed: float = 0.0
    artifacts: Dict[str, Path] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.error is None and self.result is not None and self.result.passed


class ProgressTracker:
    """Helper class to track and display batch progress."""

    def __init__(self, total: int, quiet: bool = False):
        """Initialize with the number of experiments in the batch."""
        self.total = total
        self.quiet = quiet
        self.started = 0
        self.finished = 0
        self.failed = 0
        self.start_time = time.time()
        self.last_update = 0.0

    def update_started(self, experiment_id: str) -> None:
        """Called when an experiment is submitted."""
        self.started += 1
        self._print_status(f"Running {experiment_id}...")

    def update_finished(self, outcome: RunOutcome) -> None:
        """Record a finished experiment and print its one-line result."""
        self.finished += 1
        if not outcome.passed:
            self.failed += 1
        if outcome.error:
            status = f"ERROR ({outcome.error})"
        else:
            status = "PASS" if outcome.passed else f"FAIL ({len(outcome.result.failed_checks)} checks)"
        self._print_status(f"  {outcome.experiment}: {status} in {self._format_duration(outcome.elapsed)}")

    def _print_status(self, message: str = None) -> None:
        """Print the current status, but not too frequently."""
        if self.quiet:
            return
        current_time = time.time()
        if current_time - self.last_update < 5.0 and not message:
            return

        self.last_update = current_time
        elapsed = current_time - self.start_time
        if message:
            print(message)
        print(f"    Experiments: {self.finished}/{self.total} done ({self.finished / self.total:.1%}), "
              f"elapsed {self._format_duration(elapsed)}")
        sys.stdout.flush()

    def final_report(self) -> Tuple[int, int, float]:
        """Print final report and return statistics."""
        elapsed = time.time() - self.start_time
        if not self.quiet:
            print("\n" + "=" * 80)
            print("Batch complete!")
            print(f"- Ran {self.finished} experiments")
            print(f"- Passed {self.finished - self.failed}, failed {self.failed}")
            print(f"- Total time: {self._format_duration(elapsed)}")
            print("=" * 80)
        return self.finished, self.failed, elapsed

    @staticmethod
    def _format_duration(seconds: float) -> str:
        """Format duration in seconds as a human-readable string."""
        if seconds < 60:
            return f"{seconds:.1f}s"
        minutes, seconds = divmod(int(seconds), 60)
        hours, minutes = divmod(minutes, 60)

        if hours > 0:
            return f"{hours}h {minutes}m {seconds}s"
        return f"{minutes}m {seconds}s"


def expand_ids(ids: Sequence[str]) -> List[str]:
    """Resolve ``all`` and drop repeats while keeping the given order."""
    expanded: List[str] = []
    for experiment_id in ids:
        for name in CATALOG if experiment_id == "all" else [experiment_id]:
            get_experiment(name)
            if name not in expanded:
                expanded.append(name)
    if not expanded:
        raise ConfigError("No experiments selected")
    return expanded


def prepare_configs(
    ids: Sequence[str],
    config_path: Optional[Path] = None,
    output_dir: Optional[Path] = None,
    environ: Optional[Dict[str, str]] = None,
) -> List[ExperimentConfig]:
    """Build one validated config per experiment id.

    Symbols, dictionary files and params are checked here, so a bad config
    fails before anything runs.

    A config file naming an experiment only applies to that experiment; one
    without an ``experiment`` key applies to every id in the batch.
    """
    file_layer = load_config_file(config_path) if config_path else {}
    configs = []
    for experiment_id in expand_ids(ids):
        overrides = dict(file_layer) if file_layer.get("experiment") in (None, experiment_id) else {}
        if output_dir is not None:
            overrides["output_dir"] = output_dir
        experiment = get_experiment(experiment_id)
        configs.append(experiment.check(build_config(experiment_id, experiment.defaults, overrides, environ)))
    return configs


def run_one(config: ExperimentConfig) -> RunOutcome:
    """Run a single experiment and write its artifacts."""
    experiment = get_experiment(config.experiment)
    start = time.time()
    outcome = RunOutcome(config.experiment)
    try:
        outcome.result = experiment.run(config)
        outcome.artifacts = ArtifactWriter(config.output_dir, experiment).write(outcome.result, config)
    except (BallergError, ValueError, ArithmeticError) as e:
        # Reported per experiment so the rest of the batch still runs.
        outcome.error = f"{type(e).__name__}: {e}"
    outcome.elapsed = time.time() - start
    return outcome


def run_batch(configs: Sequence[ExperimentConfig], jobs: int = 1, quiet: bool = False) -> List[RunOutcome]:
    """Run every config, concurrently when ``jobs`` > 1; outcomes come back in input order."""
    progress = ProgressTracker(len(configs), quiet)
    outcomes: Dict[str, RunOutcome] = {}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {}
            for config in configs:
                progress.update_started(config.experiment)
                futures[pool.submit(run_one, config)] = config.experiment
            for future in as_completed(futures):
                outcome = future.result()
                outcomes[futures[future]] = outcome
                progress.update_finished(outcome)
    else:
        for config in configs:
            progress.update_started(config.experiment)
            outcome = run_one(config)
            outcomes[config.experiment] = outcome
            progress.update_finished(outcome)
    progress.final_report()
    return [outcomes[config.experiment] for config in configs]


def exit_status(outcomes: Sequence[RunOutcome]) -> int:
    return EXIT_OK if all(outcome.passed for outcome in outcomes) else EXIT_CHECK_FAILED
