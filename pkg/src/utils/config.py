"""
Configuration management for the ARW lab.

Lab-wide settings use Pydantic Settings with YAML file support and
environment variable overrides. Experiment configs (JSON files or CLI flags)
are validated by ``ExperimentConfig`` before anything is computed.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


COMMANDS = (
    "stabilize",
    "chain",
    "sample-stationary",
    "density",
    "hitting-tail",
    "mixing-sweep",
    "cutoff",
    "exit-prob",
    "verify",
    "decay",
)

SUITES = (
    "abelian",
    "least-action",
    "preemptive-abelian",
    "preemptive-jump",
    "street-sweeper",
    "exact-sampling",
    "invariance",
)


class EngineConfig(BaseModel):
    """Stabilization engine settings."""
    topple_cap: int = Field(default=10**9, ge=1)
    block_size: int = Field(default=1024, ge=1)


class EstimatorConfig(BaseModel):
    """Monte Carlo estimator settings."""
    confidence: float = Field(default=0.95, gt=0, lt=1)
    bootstrap_resamples: int = Field(default=1000, ge=1)
    plugin_max_sites: int = Field(default=10, ge=1)
    conservative: bool = Field(
        default=True,
        description="Bounds consume confidence limits instead of point estimates",
    )


class OracleConfig(BaseModel):
    """Oracle suite settings."""
    node_budget: int = Field(default=10**6, ge=1)
    tolerance: float = Field(default=0.02, gt=0)
    driving_tolerance: float = Field(default=0.05, gt=0)
    illegal_rate: float = Field(default=0.3, ge=0, lt=1)
    sweeper_sigmas: float = Field(default=3.0, gt=0)
    suites_file: Path = Field(default=Path("config/suites.yaml"))


class PathsConfig(BaseModel):
    """Output locations."""
    output_dir: Path = Field(default=Path("./outputs"))

    @property
    def logs_dir(self) -> Path:
        return self.output_dir / "logs"


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = Field(default="INFO")
    format: Optional[str] = Field(default=None)
    console: bool = Field(default=True)
    file: bool = Field(default=True)


class LabConfig(BaseSettings):
    """
    Lab-wide configuration.

    Configuration is loaded from:
    1. Default values
    2. Environment variables (prefix: ARWLAB_, nested with __)
    3. YAML config file (if provided)
    """
    model_config = SettingsConfigDict(env_prefix="ARWLAB_", env_nested_delimiter="__")

    name: str = Field(default="arw_lab")
    version: str = Field(default="1.0.0")

    engine: EngineConfig = Field(default_factory=EngineConfig)
    estimators: EstimatorConfig = Field(default_factory=EstimatorConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


def load_config(config_path: Optional[Path] = None) -> LabConfig:
    """
    Load lab configuration from a YAML file.

    Args:
        config_path: Path to YAML config file. If None, ``config/lab_config.yaml``
            is used when present, otherwise defaults.
    """
    if config_path is None:
        default_path = Path("config/lab_config.yaml")
        if default_path.exists():
            config_path = default_path

    if config_path and Path(config_path).exists():
        with open(config_path, "r") as f:
            yaml_config = yaml.safe_load(f) or {}
        lab = yaml_config.get("lab", {})
        sections = {
            key: yaml_config[key]
            for key in ("engine", "estimators", "oracle", "paths", "logging")
            if key in yaml_config
        }
        return LabConfig(**lab, **sections)

    return LabConfig()


def load_suite_settings(path: Path) -> Dict[str, Dict[str, Any]]:
    """Per-suite sizes from ``suites.yaml`` (empty when the file is absent)."""
    path = Path(path)
    if not path.exists():
        return {}
    with open(path, "r") as f:
        data = yaml.safe_load(f) or {}
    return data.get("suites", {})


# ──────────────────────────────────────────────────────────────────────────────
# Experiment configs
# ──────────────────────────────────────────────────────────────────────────────

def parse_range(text: str) -> List[int]:
    """'a:b' (inclusive) or 'a:b:step' into a list of integers."""
    parts = [p.strip() for p in str(text).split(":")]
    if len(parts) not in (2, 3) or not all(parts):
        raise ValueError(f"Expected 'a:b' or 'a:b:step', got {text!r}")
    start, stop = int(parts[0]), int(parts[1])
    step = int(parts[2]) if len(parts) == 3 else 1
    if step < 1 or stop < start:
        raise ValueError(f"Empty range {text!r}")
    return list(range(start, stop + 1, step))


def parse_int_list(value: Union[str, List[int]]) -> List[int]:
    """Comma list '32,64,128' (or a range) into integers."""
    if isinstance(value, str):
        if ":" in value:
            return parse_range(value)
        return [int(x) for x in value.split(",") if x.strip()]
    return [int(x) for x in value]


class TopologySpec(BaseModel):
    """A general topology: vertex ids and kernel rows {v: {target: prob}}."""
    model_config = ConfigDict(extra="forbid")

    vertices: List[Union[int, str]]
    kernel: Dict[str, Dict[str, float]]
    sink: Union[int, str] = "z"


class ExperimentConfig(BaseModel):
    """One experiment: a command plus every parameter it reads."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    command: Literal[COMMANDS]
    n: Optional[int] = Field(default=None, ge=1)
    n_grid: Optional[List[int]] = None
    topology: Optional[TopologySpec] = None
    sleep_rate: float = Field(default=1.0, gt=0, alias="lambda")
    driving: Literal["central", "uniform"] = "central"
    mode: Literal["recorded", "ephemeral"] = "recorded"
    t: Optional[int] = Field(default=None, ge=0)
    t_grid: Optional[List[int]] = None
    reps: int = Field(default=1000, ge=1)
    density_reps: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, le=2**64 - 1)
    m_grid: Optional[List[int]] = None
    m_max: Optional[int] = Field(default=None, ge=1)
    epsilon: float = Field(default=0.25, gt=0, lt=0.5)
    offset: float = 0.2
    side: Literal["left", "right"] = "right"
    law: Literal["central", "uniform", "fixed"] = "central"
    particles: Optional[int] = Field(default=None, ge=0)
    config: Optional[List[Union[int, str]]] = None
    odometer: Optional[List[int]] = None
    sites: Optional[List[Union[int, str]]] = None
    suite: Optional[Literal[SUITES]] = None
    instances: Optional[int] = Field(default=None, ge=1)
    confidence: Optional[float] = Field(default=None, gt=0, lt=1)
    point_estimates: bool = False
    plugin: Optional[bool] = None
    include_configs: bool = False
    threads: int = Field(default=1, ge=1)
    output: Optional[Path] = None

    @field_validator("t_grid", "n_grid", "m_grid", mode="before")
    @classmethod
    def _int_lists(cls, value: Any) -> Any:
        if value is None:
            return value
        return parse_int_list(value)

    @field_validator("m_grid")
    @classmethod
    def _positive_m(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 1):
            raise ValueError("m_grid must be a non-empty list of integers >= 1")
        return value

    @field_validator("n_grid")
    @classmethod
    def _positive_n(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 1):
            raise ValueError("n_grid must be a non-empty list of integers >= 1")
        return value

    @field_validator("t_grid")
    @classmethod
    def _non_negative_t(cls, value: Optional[List[int]]) -> Optional[List[int]]:
        if value is not None and (not value or min(value) < 0):
            raise ValueError("t_grid must be a non-empty list of integers >= 0")
        return value

    @model_validator(mode="after")
    def _command_requirements(self) -> "ExperimentConfig":
        needs = {
            "stabilize": ("config",),
            "chain": ("t",),
            "hitting-tail": ("n", "m_max"),
            "mixing-sweep": ("n", "t_grid"),
            "cutoff": ("n_grid",),
            "exit-prob": ("n",),
            "verify": ("suite",),
            "decay": ("n_grid",),
        }
        for key in needs.get(self.command, ()):
            if getattr(self, key) is None:
                raise ValueError(f"'{key}' is required for command '{self.command}'")
        sized = ("chain", "sample-stationary", "density", "stabilize")
        if self.command in sized and self.n is None and self.topology is None:
            if not (self.command == "stabilize" and self.config is not None):
                raise ValueError(f"'n' or 'topology' is required for command '{self.command}'")
        if self.law == "fixed" and self.command == "exit-prob" and self.config is None:
            raise ValueError("'config' is required for law 'fixed'")
        return self
