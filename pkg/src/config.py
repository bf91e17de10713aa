from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.exceptions import ConfigError


class Settings(BaseSettings):
    # Parallelism
    threads: int | None = Field(default=None, ge=1)

    # Logging
    log_level: str = "INFO"
    log_dir: Path | None = None

    # Paths
    run_config_file: Path = Path("config/settings.yaml")

    # Recompute Q from scratch after every iteration
    debug_checks: bool = False

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        env_prefix="GRAPH_"
    )

settings = Settings()


class RunConfig(BaseModel):
    """Thresholds and heuristic toggles for one community detection run."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    theta_final: float = Field(default=1e-6, gt=0)
    theta_color: float = Field(default=1e-2, gt=0)
    color_cutoff: int = Field(default=100_000, ge=0)
    use_vf: bool = True
    use_coloring: bool = True
    color_policy: Literal["multi_phase", "first_phase"] = "multi_phase"
    sweep: Literal["parallel", "serial"] = "parallel"
    max_iterations_per_phase: int = Field(default=10_000, ge=1)
    max_phases: int = Field(default=100, ge=1)
    worker_count: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_thresholds(self) -> "RunConfig":
        if self.theta_color < self.theta_final:
            raise ValueError(
                f"theta_color ({self.theta_color}) must be >= theta_final ({self.theta_final})"
            )
        return self


def load_run_config(path: Path | None = None, **overrides: Any) -> RunConfig:
    """
    Builds a RunConfig from the YAML defaults file plus explicit overrides.
    Overrides set to None are ignored so CLI flags that were not given fall
    through to the file, then to the model defaults.
    """
    path = Path(path) if path is not None else settings.run_config_file
    values: dict[str, Any] = {}
    if path.exists():
        with open(path, encoding="utf-8") as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: expected a mapping at top level")
        values.update(loaded.get("run", loaded))

    values.update({k: v for k, v in overrides.items() if v is not None})
    if "worker_count" not in values and settings.threads is not None:
        values["worker_count"] = settings.threads

    try:
        return RunConfig(**values)
    except ValidationError as e:
        raise ConfigError(str(e)) from e
