"""
Run accounting and report models.

RunTrace counts what an algorithm touched while it ran; SolveReport is the
JSON document the command-line tools emit and verify.
"""

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np

from ..utils import get_logger

logger = get_logger(__name__)

REPORT_SCHEMA = 1


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


@dataclass
class RunTrace:
    """
    Work counters of a single run.

    Attributes:
        points_touched: Point-to-center evaluations against input rows.
        full_passes: Scans over all n points.
        samples: Named per-draw sample sizes (e.g. n_prime).
        flags: Fallback and degeneracy markers, in first-seen order.
        notes: Free-form values recorded for the report.
    """
    points_touched: int = 0
    full_passes: int = 0
    samples: dict[str, int] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    def touch(self, count: int, full: bool = False) -> None:
        self.points_touched += int(count)
        if full:
            self.full_passes += 1

    def add_sample(self, name: str, size: int) -> None:
        self.samples[name] = int(size)

    def flag(self, name: str) -> None:
        if name not in self.flags:
            self.flags.append(name)

    def merge(self, other: 'RunTrace') -> None:
        """Fold another trace (e.g. one repetition) into this one."""
        self.points_touched += other.points_touched
        self.full_passes += other.full_passes
        self.samples.update(other.samples)
        for name in other.flags:
            self.flag(name)
        self.notes.update(other.notes)


@dataclass
class SolveReport:
    """Labeled output of one solver run."""
    algorithm: str
    parameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    dataset_digest: str = ''
    result: dict[str, Any] = field(default_factory=dict)
    coverage: int | None = None
    samples: dict[str, int] = field(default_factory=dict)
    points_touched: int = 0
    passes: int = 0
    wall_ms: float = 0.0
    flags: list[str] = field(default_factory=list)
    status: Literal['ok', 'refused', 'infeasible'] = 'ok'
    message: str = ''
    verification: dict[str, Any] | None = None
    schema: int = REPORT_SCHEMA

    @classmethod
    def for_run(
        cls,
        algorithm: str,
        dataset_digest: str,
        seed: int,
        parameters: dict[str, Any],
        result: dict[str, Any],
        trace: RunTrace,
        started: float,
        coverage: int | None = None
    ) -> 'SolveReport':
        """Assemble a report at the end of a solver run started at `started`."""
        report = cls(
            algorithm=algorithm,
            parameters=dict(parameters),
            seed=seed,
            dataset_digest=dataset_digest,
            result=result,
            coverage=coverage,
            wall_ms=(time.time() - started) * 1000.0,
        )
        return report.absorb(trace)

    def absorb(self, trace: RunTrace) -> 'SolveReport':
        """Copy the counters of a run trace into the report."""
        self.samples = dict(trace.samples)
        self.points_touched = trace.points_touched
        self.passes = trace.full_passes
        self.flags = list(trace.flags)
        if trace.notes:
            self.parameters.setdefault('recorded', {}).update(trace.notes)
        return self

    def to_dict(self) -> dict:
        """Convert report to dictionary."""
        return to_jsonable({
            'schema': self.schema,
            'algorithm': self.algorithm,
            'parameters': self.parameters,
            'seed': self.seed,
            'dataset_digest': self.dataset_digest,
            'result': self.result,
            'coverage': self.coverage,
            'samples': self.samples,
            'points_touched': self.points_touched,
            'passes': self.passes,
            'wall_ms': self.wall_ms,
            'flags': self.flags,
            'status': self.status,
            'message': self.message,
            'verification': self.verification,
        })

    def to_json(self, indent: int = 2) -> str:
        """Serialize report to stable-key JSON."""
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> 'SolveReport':
        """Create report from dictionary."""
        if data.get('schema', REPORT_SCHEMA) != REPORT_SCHEMA:
            raise ValueError(f"Unsupported report schema: {data.get('schema')}")
        return cls(
            algorithm=data['algorithm'],
            parameters=dict(data.get('parameters', {})),
            seed=int(data.get('seed', 0)),
            dataset_digest=data.get('dataset_digest', ''),
            result=dict(data.get('result', {})),
            coverage=data.get('coverage'),
            samples=dict(data.get('samples', {})),
            points_touched=int(data.get('points_touched', 0)),
            passes=int(data.get('passes', 0)),
            wall_ms=float(data.get('wall_ms', 0.0)),
            flags=list(data.get('flags', [])),
            status=data.get('status', 'ok'),
            message=data.get('message', ''),
            verification=data.get('verification'),
        )

    @classmethod
    def from_json(cls, json_str: str) -> 'SolveReport':
        """Deserialize report from JSON string."""
        return cls.from_dict(json.loads(json_str))

    def digest(self) -> str:
        """SHA-256 of the report with the wall-time field excluded."""
        data = self.to_dict()
        data.pop('wall_ms', None)
        payload = json.dumps(data, sort_keys=True, ensure_ascii=False).encode('utf-8')
        return hashlib.sha256(payload).hexdigest()

    def save_to_file(self, path: str | Path) -> bool:
        """
        Save report to JSON file.

        Returns:
            True if successful, False otherwise.
        """
        try:
            file_path = Path(path)
            file_path.parent.mkdir(parents=True, exist_ok=True)
            file_path.write_text(self.to_json(), encoding='utf-8')
            logger.info(f"Report saved to {path}")
            return True
        except OSError as e:
            logger.error(f"Failed to save report: {e}")
            return False

    @classmethod
    def load_from_file(cls, path: str | Path) -> 'SolveReport | None':
        """
        Load report from JSON file.

        Returns:
            SolveReport instance or None if loading fails.
        """
        try:
            report = cls.from_json(Path(path).read_text(encoding='utf-8'))
            logger.info(f"Report loaded from {path}")
            return report
        except (OSError, ValueError, KeyError, TypeError) as e:
            logger.error(f"Failed to load report: {e}")
            return None
