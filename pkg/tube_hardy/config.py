"""
Process settings (environment / .env) and the experiment config schema.
"""

import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, ValidationError, field_validator, model_validator

from .cone_geometry import Cone, build_cone
from .cone_quadrature import QuadratureLimits
from .errors import ConfigInvalid, TubeHardyError
from .gauge_weight import Weight, build_gauge, build_weight

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class Settings:
    target: float = 1e-8
    max_nodes: int = 2_000_000
    oscillation_cap: float = 4000.0
    log_level: str = "INFO"

    @classmethod
    def from_env(cls) -> "Settings":
        try:
            settings = cls(
                target=float(os.getenv("TUBE_HARDY_TARGET", cls.target)),
                max_nodes=int(os.getenv("TUBE_HARDY_MAX_NODES", cls.max_nodes)),
                oscillation_cap=float(os.getenv("TUBE_HARDY_OSCILLATION_CAP", cls.oscillation_cap)),
                log_level=os.getenv("TUBE_HARDY_LOG_LEVEL", cls.log_level).upper(),
            )
        except ValueError as e:
            raise ConfigInvalid(f"Invalid TUBE_HARDY_* environment setting: {e}")
        if not (0 < settings.target < 1):
            raise ConfigInvalid(f"TUBE_HARDY_TARGET must lie in (0, 1), got {settings.target}")
        if settings.max_nodes < 1 or settings.oscillation_cap <= 0:
            raise ConfigInvalid("TUBE_HARDY_MAX_NODES and TUBE_HARDY_OSCILLATION_CAP must be positive")
        if settings.log_level not in LOG_LEVELS:
            raise ConfigInvalid(f"TUBE_HARDY_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}")
        return settings

    def limits(self) -> QuadratureLimits:
        return QuadratureLimits(
            target=self.target,
            max_nodes=self.max_nodes,
            oscillation_cap=self.oscillation_cap,
        )


# experiment config schema

class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConeSpec(_Spec):
    kind: Literal["orthant", "lorentz", "simplicial"]
    dim: int = Field(ge=1)
    generators: Optional[List[List[float]]] = None


class GaugeSpec(_Spec):
    kind: Literal["euclidean", "linear"] = "euclidean"
    direction: Optional[List[float]] = None

    @model_validator(mode="after")
    def _direction_for_linear(self):
        if self.kind == "linear" and self.direction is None:
            raise ValueError("linear gauges need a direction")
        return self


class DensitySpec(BaseModel):
    """Catalogue entry; the remaining keys depend on ``kind``"""
    model_config = ConfigDict(extra="allow")

    kind: Literal["exponential", "poly_exponential", "indicator", "atomic", "zero"]

    def as_dict(self) -> Dict[str, Any]:
        return self.model_dump()


class TubePointSpec(_Spec):
    x: List[float]
    y: List[float]


class MeasurePointSpec(TubePointSpec):
    mass: PositiveFloat


class MeasureSpec(_Spec):
    file: Optional[str] = None
    points: Optional[List[MeasurePointSpec]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.file is None) == (self.points is None):
            raise ValueError("give exactly one of 'file' or 'points'")
        return self


class KernelBlock(_Spec):
    points: List[TubePointSpec] = Field(min_length=1)
    derivatives: List[List[List[int]]] = Field(default_factory=list)


class GridSpec(_Spec):
    period: PositiveFloat
    dim: int = Field(ge=1, le=2)
    points_per_axis: int = Field(ge=4)
    re: Optional[List[float]] = None
    im: Optional[List[float]] = None
    modes: Optional[List[Dict[str, Any]]] = None


class DecomposeBlock(_Spec):
    grid_file: Optional[str] = None
    grid: Optional[GridSpec] = None
    period: Optional[PositiveFloat] = None
    heights: List[List[float]] = Field(default_factory=list)
    bins_csv: bool = True

    @model_validator(mode="after")
    def _one_source(self):
        if (self.grid_file is None) == (self.grid is None):
            raise ValueError("give exactly one of 'grid_file' or 'grid'")
        if self.grid_file is not None and self.grid_file.endswith(".csv") and self.period is None:
            raise ValueError("CSV grids need a 'period'")
        return self


class NormsBlock(_Spec):
    density: DensitySpec
    alphas: List[List[int]] = Field(default_factory=list)
    heights: List[List[float]] = Field(default_factory=list)
    points: List[TubePointSpec] = Field(default_factory=list)


class CarlesonBlock(_Spec):
    measure: MeasureSpec
    frame: List[TubePointSpec] = Field(min_length=1)
    test_points: Optional[List[TubePointSpec]] = None
    densities: List[DensitySpec] = Field(default_factory=list)
    constant: Optional[PositiveFloat] = None


class SymbolSpec(_Spec):
    kind: Literal["modulation", "constant"] = "constant"
    eta: Optional[List[float]] = None
    value: Union[float, List[float]] = 1.0


class TranslationSpec(_Spec):
    re: List[float]
    im: List[float]


class OperatorsBlock(_Spec):
    symbol: SymbolSpec = Field(default_factory=SymbolSpec)
    translation: TranslationSpec
    densities: List[DensitySpec] = Field(min_length=1)
    points: List[TubePointSpec] = Field(min_length=1)


class VerifyBlock(_Spec):
    properties: Optional[List[str]] = None
    cases: int = Field(default=1, ge=1)


class ExperimentConfig(_Spec):
    cone: ConeSpec
    gauge: GaugeSpec = Field(default_factory=GaugeSpec)
    order: int = Field(default=0, ge=0)
    target: Optional[PositiveFloat] = None
    tol: PositiveFloat = 1e-12
    seed: int = 0
    out: Optional[str] = None

    kernel: Optional[KernelBlock] = None
    decompose: Optional[DecomposeBlock] = None
    norms: Optional[NormsBlock] = None
    carleson: Optional[CarlesonBlock] = None
    operators: Optional[OperatorsBlock] = None
    verify: Optional[VerifyBlock] = None

    @field_validator("target")
    @classmethod
    def _target_below_one(cls, value):
        if value is not None and value >= 1:
            raise ValueError("target must be below 1")
        return value

    def build_cone(self) -> Cone:
        return build_cone(self.cone.model_dump(exclude_none=True))

    def build_weight(self) -> Weight:
        cone = self.build_cone()
        return build_weight(self.order, build_gauge(self.gauge.model_dump(exclude_none=True), cone))

    def block(self, name: str) -> Any:
        value = getattr(self, name)
        if value is None:
            raise ConfigInvalid(f"Config has no '{name}' block")
        return value


def _referenced_files(config: ExperimentConfig) -> List[str]:
    files = []
    if config.decompose is not None and config.decompose.grid_file is not None:
        files.append(config.decompose.grid_file)
    if config.carleson is not None and config.carleson.measure.file is not None:
        files.append(config.carleson.measure.file)
    return files


def _resolve(config: ExperimentConfig, base: Path) -> ExperimentConfig:
    """Rewrite file references relative to the config file; each must exist"""
    updates: Dict[str, Any] = {}
    missing = []
    for name in _referenced_files(config):
        if not (base / name).is_file():
            missing.append(name)
    if missing:
        raise ConfigInvalid("Config references missing files", details={"missing": missing})
    if config.decompose is not None and config.decompose.grid_file is not None:
        updates["decompose"] = config.decompose.model_copy(
            update={"grid_file": str(base / config.decompose.grid_file)}
        )
    if config.carleson is not None and config.carleson.measure.file is not None:
        measure = config.carleson.measure.model_copy(update={"file": str(base / config.carleson.measure.file)})
        updates["carleson"] = config.carleson.model_copy(update={"measure": measure})
    return config.model_copy(update=updates)


def parse_config(payload: Dict[str, Any], base: Path = Path(".")) -> ExperimentConfig:
    try:
        config = ExperimentConfig.model_validate(payload)
    except ValidationError as e:
        raise ConfigInvalid(
            f"Config failed validation with {e.error_count()} error(s)",
            details={"errors": json.loads(e.json(include_url=False))},
        )
    config = _resolve(config, base)
    try:
        config.build_weight()
    except TubeHardyError as e:
        raise ConfigInvalid(e.message, details={"cause": e.to_dict()})
    return config


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except OSError as e:
        raise ConfigInvalid(f"Cannot read config {path}: {e}")
    except json.JSONDecodeError as e:
        raise ConfigInvalid(f"Config {path} is not valid JSON: {e}")
    if not isinstance(payload, dict):
        raise ConfigInvalid(f"Config {path} must hold a JSON object")
    logger.debug(f"Loaded config {path}")
    return parse_config(payload, base=path.resolve().parent)
