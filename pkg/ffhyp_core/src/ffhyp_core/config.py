"""Configuration management for census budgets and run settings."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

logger = logging.getLogger(__name__)


class BudgetExceededError(ValueError):
    """Raised when a requested table or enumeration exceeds a configured budget."""


@dataclass
class BudgetConfig:
    """Size guards applied before any large table is allocated.

    Attributes:
        max_group_size: Largest |PGL_{n+1}(F_q)| that may be enumerated.
        max_space_size: Largest q^binom(d+n, n) that may be enumerated exhaustively.
        max_field_size: Largest q accepted at all.
        table_field_size: Largest q for which log/antilog tables are precomputed.
        max_basis_size: Largest monomial basis (binom(d+n, n)) accepted.
        max_points: Largest number of projective points the point oracle may visit.
    """

    max_group_size: int = 100_000
    max_space_size: int = 2**24
    max_field_size: int = 2**20
    table_field_size: int = 2**16
    max_basis_size: int = 5000
    max_points: int = 2_000_000

    def check(self, what: str, value: int, limit_key: str) -> None:
        """Raise BudgetExceededError when value exceeds the named budget.

        Args:
            what: Human-readable name of the quantity being guarded.
            value: Requested size.
            limit_key: Attribute name of the budget to compare against.

        Raises:
            BudgetExceededError: If value > the budget.
        """
        limit = getattr(self, limit_key)
        if value > limit:
            raise BudgetExceededError(
                f"{what} = {value} exceeds budgets.{limit_key} = {limit}"
            )


@dataclass
class SmoothConfig:
    """Smoothness test configuration.

    Attributes:
        e_max: Saturation degree cap; None selects (n+2)(d-1)+1.
        witness_search: Search rational points for a witness on singular verdicts.
    """

    e_max: int | None = None
    witness_search: bool = True


@dataclass
class CensusConfig:
    """Census driver configuration.

    Attributes:
        threads: Worker processes (None = available cores).
        shards: Target shard count per stage, independent of the worker count.
        seed: Seed for sampling mode.
        samples: Default sample count for sampling mode.
        confidence: Confidence level of the Wilson interval.
        span_chunk: Vectors materialised at once when enumerating a fixed space.
        with_stabilizers: Compute stabilizers for sampled hypersurfaces.
        checkpoint_dir: Directory for checkpoint files.
    """

    threads: int | None = None
    shards: int = 64
    seed: int = 0
    samples: int = 10_000
    confidence: float = 0.95
    span_chunk: int = 2**16
    with_stabilizers: bool = False
    checkpoint_dir: str = "./.checkpoints"


@dataclass
class OutputConfig:
    """Output configuration.

    Attributes:
        format: Default output format ("json", "csv" or "table").
        output_dir: Directory for report files written without an explicit path.
    """

    format: str = "json"
    output_dir: str = "./.tmp"


@dataclass
class FfhypConfig:
    """Root configuration.

    Attributes:
        budgets: Size guards.
        smooth: Smoothness test settings.
        census: Census driver settings.
        output: Output settings.
    """

    budgets: BudgetConfig = field(default_factory=BudgetConfig)
    smooth: SmoothConfig = field(default_factory=SmoothConfig)
    census: CensusConfig = field(default_factory=CensusConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FfhypConfig":
        """Create FfhypConfig from a dictionary.

        Args:
            data: Dictionary with configuration.

        Returns:
            FfhypConfig instance.
        """
        budget_data = data.get("budgets", {}) or {}
        smooth_data = data.get("smooth", {}) or {}
        census_data = data.get("census", {}) or {}
        output_data = data.get("output", {}) or {}

        config = cls(
            budgets=BudgetConfig(
                max_group_size=budget_data.get("max_group_size", 100_000),
                max_space_size=budget_data.get("max_space_size", 2**24),
                max_field_size=budget_data.get("max_field_size", 2**20),
                table_field_size=budget_data.get("table_field_size", 2**16),
                max_basis_size=budget_data.get("max_basis_size", 5000),
                max_points=budget_data.get("max_points", 2_000_000),
            ),
            smooth=SmoothConfig(
                e_max=smooth_data.get("e_max"),
                witness_search=smooth_data.get("witness_search", True),
            ),
            census=CensusConfig(
                threads=census_data.get("threads"),
                shards=census_data.get("shards", 64),
                seed=census_data.get("seed", 0),
                samples=census_data.get("samples", 10_000),
                confidence=census_data.get("confidence", 0.95),
                span_chunk=census_data.get("span_chunk", 2**16),
                with_stabilizers=census_data.get("with_stabilizers", False),
                checkpoint_dir=census_data.get("checkpoint_dir", "./.checkpoints"),
            ),
            output=OutputConfig(
                format=output_data.get("format", "json"),
                output_dir=output_data.get("output_dir", "./.tmp"),
            ),
        )
        config.validate()
        return config

    @classmethod
    def from_yaml(cls, path: str | Path) -> "FfhypConfig":
        """Load configuration from a YAML file.

        Args:
            path: Path to the YAML configuration file.

        Returns:
            FfhypConfig instance.

        Raises:
            FileNotFoundError: If config file doesn't exist.
            ValueError: If config is invalid.
        """
        config_path = Path(path).expanduser()

        if not config_path.exists():
            logger.error("Configuration file not found: %s", config_path)
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        logger.info("Loading configuration from: %s", config_path)

        with open(config_path) as f:
            data = yaml.safe_load(f)

        if not isinstance(data, dict):
            logger.error("Configuration must be a YAML dictionary")
            raise ValueError("Configuration must be a YAML dictionary")

        config = cls.from_dict(data)

        for section, attr in ((config.census, "checkpoint_dir"), (config.output, "output_dir")):
            value = str(getattr(section, attr))
            if not value.startswith(("~", "/")):
                setattr(section, attr, str((config_path.parent / value).resolve()))

        return config

    def validate(self) -> None:
        """Check that every budget is positive and settings are in range.

        Raises:
            ValueError: On the first invalid setting.
        """
        for name, value in vars(self.budgets).items():
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"budgets.{name} must be a positive integer, got {value!r}")
        if self.budgets.table_field_size > self.budgets.max_field_size:
            raise ValueError("budgets.table_field_size must not exceed budgets.max_field_size")
        if self.smooth.e_max is not None and self.smooth.e_max < 1:
            raise ValueError(f"smooth.e_max must be >= 1, got {self.smooth.e_max}")
        if self.census.threads is not None and self.census.threads < 1:
            raise ValueError(f"census.threads must be >= 1, got {self.census.threads}")
        if self.census.shards < 1:
            raise ValueError(f"census.shards must be >= 1, got {self.census.shards}")
        if not 0.0 < self.census.confidence < 1.0:
            raise ValueError(f"census.confidence must lie in (0, 1), got {self.census.confidence}")
        if self.census.span_chunk < 1:
            raise ValueError("census.span_chunk must be >= 1")
        if self.output.format not in ("json", "csv", "table"):
            raise ValueError(f"output.format must be json, csv or table, got {self.output.format!r}")

    def to_dict(self) -> dict[str, Any]:
        """Convert configuration to dictionary.

        Returns:
            Dictionary representation of the configuration.
        """
        return {
            "budgets": {
                "max_group_size": self.budgets.max_group_size,
                "max_space_size": self.budgets.max_space_size,
                "max_field_size": self.budgets.max_field_size,
                "table_field_size": self.budgets.table_field_size,
                "max_basis_size": self.budgets.max_basis_size,
                "max_points": self.budgets.max_points,
            },
            "smooth": {
                "e_max": self.smooth.e_max,
                "witness_search": self.smooth.witness_search,
            },
            "census": {
                "threads": self.census.threads,
                "shards": self.census.shards,
                "seed": self.census.seed,
                "samples": self.census.samples,
                "confidence": self.census.confidence,
                "span_chunk": self.census.span_chunk,
                "with_stabilizers": self.census.with_stabilizers,
                "checkpoint_dir": self.census.checkpoint_dir,
            },
            "output": {
                "format": self.output.format,
                "output_dir": self.output.output_dir,
            },
        }


def load_config(path: str | Path | None = None) -> FfhypConfig:
    """Load configuration from a YAML file, or defaults when path is None.

    Args:
        path: Path to the YAML configuration file.

    Returns:
        FfhypConfig instance.
    """
    if path is None:
        return FfhypConfig()
    return FfhypConfig.from_yaml(path)
