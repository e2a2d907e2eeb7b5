"""
Configuration management for Furstenberg Lab.
"""

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .exceptions import ConfigurationError, ParameterError
from .validators import MAX_ORDER, ParameterValidator

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass
class PipelineConfig:
    """Parameters of a pipeline run over F_p^n."""

    p: int
    n: int
    delta_coefficient: float = 0.1
    s1_constant: float = 100
    s2_constant: float = 2
    hyperplanar_floor: Optional[int] = None
    tuple_search_cap: int = 10 ** 7

    def __post_init__(self):
        ParameterValidator.validate_prime(self.p)
        ParameterValidator.validate_dimension(self.n, minimum=2)
        for name in ("delta_coefficient", "s1_constant", "s2_constant"):
            ParameterValidator.validate_scale(getattr(self, name))
        if self.hyperplanar_floor is not None and self.hyperplanar_floor < 1:
            raise ConfigurationError(f"hyperplanar_floor must be >= 1, got {self.hyperplanar_floor}")
        if self.tuple_search_cap < 1:
            raise ConfigurationError(f"tuple_search_cap must be >= 1, got {self.tuple_search_cap}")

    @property
    def floor(self) -> int:
        """Minimum coplanar count for a hyperplanar point (defaults to n)."""
        return self.n if self.hyperplanar_floor is None else self.hyperplanar_floor

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class LabConfig:
    """Configuration shared by every CLI verb."""

    # Scale and concurrency
    max_order: int = MAX_ORDER
    jobs: int = 1

    # Pipeline constants
    delta_coefficient: float = 0.1
    s1_constant: float = 100
    s2_constant: float = 2
    hyperplanar_floor: Optional[int] = None
    tuple_search_cap: int = 10 ** 7

    # Logging
    log_level: str = "WARNING"
    log_file: Optional[str] = None
    json_logs: bool = False

    def __post_init__(self):
        try:
            ParameterValidator.validate_jobs(self.jobs)
            for name in ("delta_coefficient", "s1_constant", "s2_constant"):
                ParameterValidator.validate_scale(getattr(self, name))
        except ParameterError as e:
            raise ConfigurationError(str(e))
        if not isinstance(self.max_order, int) or not 2 <= self.max_order <= MAX_ORDER:
            raise ConfigurationError(f"max_order must lie in [2, {MAX_ORDER}], got {self.max_order}")
        if self.log_level.upper() not in LOG_LEVELS:
            raise ConfigurationError(f"Unknown log level: {self.log_level}")
        self.log_level = self.log_level.upper()

    def pipeline_config(self, p: int, n: int) -> PipelineConfig:
        """Pipeline parameters for F_p^n using this configuration's constants."""
        return PipelineConfig(
            p=p,
            n=n,
            delta_coefficient=self.delta_coefficient,
            s1_constant=self.s1_constant,
            s2_constant=self.s2_constant,
            hyperplanar_floor=self.hyperplanar_floor,
            tuple_search_cap=self.tuple_search_cap,
        )

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "LabConfig":
        data = data or {}
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigurationError(f"Invalid configuration: {e}")

    @classmethod
    def from_file(cls, config_path: str) -> "LabConfig":
        """Load configuration from YAML or JSON file."""
        path = Path(config_path)

        if not path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        with open(path, "r") as f:
            if path.suffix in [".yaml", ".yml"]:
                data = yaml.safe_load(f)
            elif path.suffix == ".json":
                data = json.load(f)
            else:
                raise ValueError(f"Unsupported config file format: {path.suffix}")

        if data is not None and not isinstance(data, dict):
            raise ConfigurationError(f"Configuration file must hold a mapping: {config_path}")
        return cls.from_dict(data)

    def to_file(self, config_path: str) -> None:
        """Save configuration to YAML or JSON file."""
        path = Path(config_path)

        data = asdict(self)

        if path.suffix in [".yaml", ".yml"]:
            dump = lambda f: yaml.dump(data, f, default_flow_style=False, sort_keys=False)
        elif path.suffix == ".json":
            dump = lambda f: json.dump(data, f, indent=2)
        else:
            raise ValueError(f"Unsupported config file format: {path.suffix}")

        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            dump(f)
