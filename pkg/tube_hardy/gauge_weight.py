"""
Cone-adapted gauge ρ and Sobolev weight w_n(ξ) = Σ_{k=0}^{n} ρ(ξ)^{2k}.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .cone_geometry import Cone, contains_dual, interior_depth
from .errors import DimensionMismatch, GaugeError, OutsideDualCone, OutsideSpectralSet

logger = logging.getLogger(__name__)


class GaugeKind(Enum):
    EUCLIDEAN = "euclidean"
    LINEAR = "linear"


@dataclass(frozen=True)
class Gauge:
    kind: GaugeKind
    cone: Cone
    direction: Optional[Tuple[float, ...]] = None

    @property
    def scale(self) -> float:
        """Lipschitz constant of ρ, used to size quadrature panels"""
        if self.kind is GaugeKind.LINEAR:
            return float(np.linalg.norm(self.direction))
        return 1.0

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        """Unchecked vectorised evaluation over an (N, d) array"""
        points = np.asarray(xi, dtype=float)
        if self.kind is GaugeKind.LINEAR:
            return np.maximum(points @ np.asarray(self.direction), 0.0)
        return np.linalg.norm(points, axis=-1)

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"kind": self.kind.value}
        if self.direction is not None:
            payload["direction"] = list(self.direction)
        return payload


@dataclass(frozen=True)
class Weight:
    order: int
    gauge: Gauge

    @property
    def cone(self) -> Cone:
        return self.gauge.cone

    @property
    def pole_distance(self) -> float:
        """
        Distance from the real axis to the nearest complex pole of 1/w_n
        along a unit frequency ray. The poles sit at ρ² = e^{2πik/(n+1)}.
        """
        if self.order == 0:
            return math.inf
        return math.sin(math.pi / (self.order + 1)) / self.gauge.scale

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        """Unchecked w_n over an (N, d) array, Horner in ρ²"""
        rho_sq = self.gauge(xi) ** 2
        value = np.ones_like(rho_sq)
        for _ in range(self.order):
            value = value * rho_sq + 1.0
        return value

    def reflected(self, xi: np.ndarray) -> np.ndarray:
        """Unchecked reflected weight: w_n(ξ) on Ω*, w_n(−ξ) elsewhere"""
        points = np.atleast_2d(np.asarray(xi, dtype=float))
        plus = contains_dual(self.cone, points)
        folded = np.where(plus[:, None], points, -points)
        return self(folded)

    def with_order(self, order: int) -> "Weight":
        return Weight(order=order, gauge=self.gauge)


def build_gauge(spec: Dict[str, Any], cone: Cone) -> Gauge:
    try:
        kind = GaugeKind(spec.get("kind"))
    except ValueError:
        raise GaugeError(f"Unsupported gauge kind: {spec.get('kind')!r}")

    if kind is GaugeKind.EUCLIDEAN:
        return Gauge(kind=kind, cone=cone)

    direction = np.asarray(spec.get("direction", ()), dtype=float)
    if direction.shape != (cone.dim,):
        raise DimensionMismatch(
            f"Linear gauge direction must have length {cone.dim}, got shape {direction.shape}"
        )
    # strict positivity of ⟨e, ξ⟩ on Ω*\{0} holds iff e is interior
    if not interior_depth(cone, direction) > 0:
        raise GaugeError(
            "Linear gauge direction must lie in the interior of the cone",
            details={"direction": direction.tolist()},
        )
    return Gauge(kind=kind, cone=cone, direction=tuple(float(v) for v in direction))


def build_weight(order: int, gauge: Gauge) -> Weight:
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool) or order < 0:
        raise GaugeError(f"Sobolev order must be a non-negative integer, got {order!r}")
    return Weight(order=int(order), gauge=gauge)


def _checked_point(cone: Cone, xi: Any) -> np.ndarray:
    point = np.asarray(xi, dtype=float)
    if point.ndim == 0 and cone.dim == 1:
        point = point.reshape(1)
    if point.shape != (cone.dim,):
        raise DimensionMismatch(f"Expected a vector of length {cone.dim}, got shape {point.shape}")
    return point


def gauge_eval(gauge: Gauge, xi: Any) -> float:
    point = _checked_point(gauge.cone, xi)
    if not contains_dual(gauge.cone, point):
        raise OutsideDualCone("Gauge is defined on the dual cone only", details={"xi": point.tolist()})
    return float(gauge(point[None, :])[0])


def weight_eval(weight: Weight, xi: Any) -> float:
    point = _checked_point(weight.cone, xi)
    if not contains_dual(weight.cone, point):
        raise OutsideDualCone("Weight is defined on the dual cone only", details={"xi": point.tolist()})
    return float(weight(point[None, :])[0])


def reflected_weight_eval(weight: Weight, xi: Any) -> float:
    point = _checked_point(weight.cone, xi)
    if contains_dual(weight.cone, point):
        return float(weight(point[None, :])[0])
    if contains_dual(weight.cone, -point):
        return float(weight(-point[None, :])[0])
    raise OutsideSpectralSet(
        "Frequency lies in neither the dual cone nor its reflection",
        details={"xi": point.tolist()},
    )
