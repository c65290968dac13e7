"""
Configuration data models.

Defines dataclasses for solver constants, caps and runtime settings with JSON
serialization support. Missing sections in a loaded file keep their defaults.
"""

import json
from dataclasses import dataclass, field, asdict, fields
from pathlib import Path
from typing import Literal

from ..utils import get_logger

logger = get_logger(__name__)


@dataclass
class CoreSetConfig:
    """Core-set construction settings."""
    s: float = 1.0 / 3.0
    fw_iteration_constant: float = 4.0
    fw_max_iterations: int = 200000
    polish_interval: int = 50


@dataclass
class SamplingConfig:
    """Sample-size constants (the hidden constants of the sample bounds)."""
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 1.0
    eta2_constant: float = 1.0
    eta1: float = 0.1


@dataclass
class OutlierConfig:
    """Bi-criteria repetition settings."""
    max_repetitions: int = 64


@dataclass
class HybridConfig:
    """Hybrid solver settings."""
    repetitions: int = 4
    max_rounds: int = 40
    max_candidates: int = 256
    chunk_size: int = 4096


@dataclass
class MexConfig:
    """Generalized shape solver settings."""
    enumeration_cap: int = 100000
    candidate_budget: int = 64
    max_line_rounds: int = 50
    max_svm_rounds: int = 500
    gilbert_diameter_samples: int = 64
    gilbert_refresh_interval: int = 100
    two_class_exclusion_factor: float = 5.0
    debug_rank_witness: bool = False


@dataclass
class OracleConfig:
    """Reference solver settings."""
    tolerance: float = 1e-9
    max_outlier_subsets: int = 1000000
    max_polytope_points: int = 6


@dataclass
class RuntimeConfig:
    """Process-level settings."""
    threads: int | None = None
    log_level: Literal['DEBUG', 'INFO', 'WARNING', 'ERROR'] = 'INFO'
    log_dir: str | None = 'logs'


_SECTIONS: dict[str, type] = {
    'core_set': CoreSetConfig,
    'sampling': SamplingConfig,
    'outliers': OutlierConfig,
    'hybrid': HybridConfig,
    'mex': MexConfig,
    'oracle': OracleConfig,
    'runtime': RuntimeConfig,
}


@dataclass
class SolverConfig:
    """Main configuration containing every section."""
    core_set: CoreSetConfig = field(default_factory=CoreSetConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    outliers: OutlierConfig = field(default_factory=OutlierConfig)
    hybrid: HybridConfig = field(default_factory=HybridConfig)
    mex: MexConfig = field(default_factory=MexConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    def to_dict(self) -> dict:
        """Convert configuration to dictionary."""
        return {name: asdict(getattr(self, name)) for name in _SECTIONS}

    def to_json(self, indent: int = 2) -> str:
        """Serialize configuration to JSON string."""
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> 'SolverConfig':
        """
        Create configuration from dictionary.

        Raises:
            ValueError: On unknown sections or keys.
        """
        config = cls()

        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ValueError(f"Unknown configuration sections: {sorted(unknown)}")

        for name, section_cls in _SECTIONS.items():
            if name not in data:
                continue
            allowed = {f.name for f in fields(section_cls)}
            extra = set(data[name]) - allowed
            if extra:
                raise ValueError(f"Unknown keys in section '{name}': {sorted(extra)}")
            setattr(config, name, section_cls(**data[name]))

        return config

    @classmethod
    def from_json(cls, json_str: str) -> 'SolverConfig':
        """Deserialize configuration from JSON string."""
        data = json.loads(json_str)
        return cls.from_dict(data)

    def save_to_file(self, path: str | Path) -> bool:
        """
        Save configuration to JSON file.

        Args:
            path: File path to save to.

        Returns:
            True if successful, False otherwise.
        """
        try:
            file_path = Path(path)
            file_path.parent.mkdir(parents=True, exist_ok=True)

            with open(file_path, 'w', encoding='utf-8') as f:
                f.write(self.to_json())

            logger.info(f"Configuration saved to {path}")
            return True

        except OSError as e:
            logger.error(f"Failed to save configuration: {e}")
            return False

    @classmethod
    def load_from_file(cls, path: str | Path) -> 'SolverConfig | None':
        """
        Load configuration from JSON file.

        Args:
            path: File path to load from.

        Returns:
            SolverConfig instance or None if loading fails.
        """
        try:
            with open(path, 'r', encoding='utf-8') as f:
                json_str = f.read()

            config = cls.from_json(json_str)
            logger.info(f"Configuration loaded from {path}")
            return config

        except (OSError, ValueError, TypeError) as e:
            logger.error(f"Failed to load configuration: {e}")
            return None
