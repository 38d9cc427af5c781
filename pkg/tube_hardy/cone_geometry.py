"""
Proper open convex cones, their duals, and the interior-depth constant.

Three families are supported:

- ``orthant``: Ω = (0, ∞)^d, self-dual.
- ``lorentz``: Ω = {y : y_d > |y'|} for d = 2 (handled as a simplicial cone)
  and d = 3 (analytic description), self-dual.
- ``simplicial``: Ω = G·(0, ∞)^d for an invertible generator matrix G.
  Its dual is {ξ : Gᵀξ ≥ 0}, with extreme rays the columns of G⁻ᵀ.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, Dict, Optional, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NotInInterior,
    SingularGenerators,
    UnsupportedCone,
    UnsupportedDimension,
)

logger = logging.getLogger(__name__)

DET_TOLERANCE = 1e-10
MEMBERSHIP_TOLERANCE = 1e-12
LORENTZ_RAY_SAMPLES = 64


class ConeKind(Enum):
    ORTHANT = "orthant"
    LORENTZ = "lorentz"
    SIMPLICIAL = "simplicial"


@dataclass(frozen=True)
class Cone:
    kind: ConeKind
    dim: int
    generators: Optional[Tuple[Tuple[float, ...], ...]] = None

    @cached_property
    def generator_matrix(self) -> Optional[np.ndarray]:
        """Columns span the cone; None for the analytic lorentz d=3 cone"""
        if self.kind is ConeKind.ORTHANT:
            return np.eye(self.dim)
        if self.kind is ConeKind.LORENTZ:
            if self.dim == 2:
                return np.array([[1.0, -1.0], [1.0, 1.0]])
            return None
        return np.array(self.generators, dtype=float)

    @property
    def is_polyhedral(self) -> bool:
        return self.generator_matrix is not None

    def __repr__(self):
        return f"<Cone {self.kind.value} d={self.dim}>"


@dataclass(frozen=True, eq=False)
class DualConeView:
    """
    Ω* described by halfspace normals and extreme rays.

    For the analytic lorentz cone ``halfspace_normals`` is empty and
    ``analytic`` is set; ``extreme_rays`` then holds a discretisation of
    the boundary rays (cos θ, sin θ, 1)/√2.
    """
    cone: Cone
    halfspace_normals: np.ndarray = field(repr=False)
    extreme_rays: np.ndarray = field(repr=False)
    analytic: Optional[str] = None


def build_cone(spec: Dict[str, Any]) -> Cone:
    """Validate a cone specification {"kind", "dim", "generators"}"""
    try:
        kind = ConeKind(spec.get("kind"))
    except ValueError:
        raise UnsupportedCone(f"Unsupported cone kind: {spec.get('kind')!r}")

    dim = spec.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise UnsupportedDimension(f"Cone dimension must be a positive integer, got {dim!r}")

    if kind is ConeKind.LORENTZ and dim not in (2, 3):
        raise UnsupportedDimension(f"Lorentz cones are supported for d=2 and d=3 only, got d={dim}")

    generators = None
    if kind is ConeKind.SIMPLICIAL:
        raw = spec.get("generators")
        if raw is None:
            raise SingularGenerators("Simplicial cone requires a generator matrix")
        matrix = np.asarray(raw, dtype=float)
        if matrix.shape != (dim, dim):
            raise UnsupportedDimension(
                f"Generator matrix must be {dim}x{dim}, got shape {matrix.shape}"
            )
        if not np.all(np.isfinite(matrix)):
            raise SingularGenerators("Generator matrix has non-finite entries")
        # columns are scaled to unit length so |det| measures independence
        norms = np.linalg.norm(matrix, axis=0)
        if np.any(norms == 0) or abs(np.linalg.det(matrix / norms)) < DET_TOLERANCE:
            raise SingularGenerators(
                "Generators are linearly dependent",
                details={"abs_det": float(abs(np.linalg.det(matrix)))},
            )
        generators = tuple(tuple(float(v) for v in row) for row in matrix)

    cone = Cone(kind=kind, dim=dim, generators=generators)
    logger.debug(f"Built {cone!r}")
    return cone


def cone_from_json(text: str) -> Cone:
    return build_cone(json.loads(text))


def cone_to_json(cone: Cone) -> str:
    payload: Dict[str, Any] = {"kind": cone.kind.value, "dim": cone.dim}
    if cone.generators is not None:
        payload["generators"] = [list(row) for row in cone.generators]
    return json.dumps(payload, sort_keys=True)


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=256)
def dual_view(cone: Cone, ray_samples: int = LORENTZ_RAY_SAMPLES) -> DualConeView:
    matrix = cone.generator_matrix
    if matrix is None:
        theta = 2 * np.pi * np.arange(ray_samples) / ray_samples
        rays = np.stack([np.cos(theta), np.sin(theta), np.ones_like(theta)], axis=1) / np.sqrt(2)
        return DualConeView(
            cone=cone,
            halfspace_normals=_frozen(np.zeros((0, 3))),
            extreme_rays=_frozen(rays),
            analytic="xi_d >= |xi'|",
        )

    try:
        dual = np.linalg.inv(matrix).T
    except np.linalg.LinAlgError:
        raise SingularGenerators("Generator matrix is not invertible")
    rays = (dual / np.linalg.norm(dual, axis=0)).T
    return DualConeView(
        cone=cone,
        halfspace_normals=_frozen(matrix.T.copy()),
        extreme_rays=_frozen(np.ascontiguousarray(rays)),
    )


def _as_points(cone: Cone, values: Any) -> np.ndarray:
    points = np.asarray(values, dtype=float)
    if points.ndim == 0 and cone.dim == 1:
        points = points.reshape(1)
    if points.shape[-1:] != (cone.dim,) or points.ndim > 2:
        raise DimensionMismatch(
            f"Expected vectors of length {cone.dim}, got shape {points.shape}"
        )
    return points


def _unit_normals(cone: Cone) -> np.ndarray:
    normals = dual_view(cone).halfspace_normals
    return normals / np.linalg.norm(normals, axis=1, keepdims=True)


def dual_margin(cone: Cone, xi: Any) -> np.ndarray:
    """
    Signed distance-like margin of ξ with respect to Ω*.

    Non-negative exactly on Ω*. Works row-wise on an (N, d) array.
    """
    points = _as_points(cone, xi)
    if cone.is_polyhedral:
        return np.min(points @ _unit_normals(cone).T, axis=-1)
    return (points[..., -1] - np.linalg.norm(points[..., :-1], axis=-1)) / np.sqrt(2)


def contains_dual(cone: Cone, xi: Any, tol: float = MEMBERSHIP_TOLERANCE) -> Any:
    """
    Closed membership ξ ∈ Ω* with an absolute tolerance scaled by |ξ|.

    Returns a bool for a single vector and a boolean array for an (N, d) array.
    """
    points = _as_points(cone, xi)
    scale = np.maximum(np.linalg.norm(points, axis=-1), 1.0)
    inside = dual_margin(cone, points) >= -tol * scale
    return bool(inside) if points.ndim == 1 else inside


def contains_primal(cone: Cone, y: Any, tol: float = MEMBERSHIP_TOLERANCE) -> Any:
    """Closed membership y ∈ closure(Ω)"""
    points = _as_points(cone, y)
    scale = np.maximum(np.linalg.norm(points, axis=-1), 1.0)
    matrix = cone.generator_matrix
    if matrix is None:
        margin = points[..., -1] - np.linalg.norm(points[..., :-1], axis=-1)
    else:
        coords = np.linalg.solve(matrix, points.T).T
        margin = np.min(coords * np.linalg.norm(matrix, axis=0), axis=-1)
    inside = margin >= -tol * scale
    return bool(inside) if points.ndim == 1 else inside


def interior_depth(cone: Cone, y: Any) -> float:
    """
    c_y = min over unit ξ ∈ Ω* of ⟨y, ξ⟩.

    Positive exactly when y lies in the open cone; a non-positive value is
    returned as a diagnostic for points outside it.
    """
    point = _as_points(cone, y)
    if point.ndim != 1:
        raise DimensionMismatch("interior_depth expects a single vector")
    if cone.kind is ConeKind.LORENTZ:
        return float((point[-1] - np.linalg.norm(point[:-1])) / np.sqrt(2))
    return float(np.min(dual_view(cone).extreme_rays @ point))


def require_interior(cone: Cone, y: Any) -> float:
    depth = interior_depth(cone, y)
    if not depth > 0:
        raise NotInInterior(
            f"Point is not in the interior of the {cone.kind.value} cone",
            details={"y": [float(v) for v in np.ravel(y)], "depth": depth},
        )
    return depth


def is_proper(cone: Cone) -> bool:
    """
    True iff the cone contains no line.

    Orthant and lorentz cones are always proper; a simplicial cone is
    proper iff its generators are independent, which build_cone already
    enforces, so improper input never reaches this point.
    """
    if cone.kind is not ConeKind.SIMPLICIAL:
        return True
    matrix = cone.generator_matrix
    return bool(abs(np.linalg.det(matrix / np.linalg.norm(matrix, axis=0))) >= DET_TOLERANCE)


def central_direction(cone: Cone) -> np.ndarray:
    """A unit vector well inside Ω (normalised sum of unit generators)"""
    matrix = cone.generator_matrix
    if matrix is None:
        direction = np.zeros(cone.dim)
        direction[-1] = 1.0
        return direction
    total = np.sum(matrix / np.linalg.norm(matrix, axis=0), axis=1)
    return total / np.linalg.norm(total)


def sample_dual(cone: Cone, rng: np.random.Generator, count: int, scale: float = 1.0) -> np.ndarray:
    """Random points of Ω* (used by tests and the verification suite)"""
    if cone.is_polyhedral:
        rays = dual_view(cone).extreme_rays
        weights = rng.exponential(scale, size=(count, cone.dim))
        return weights @ rays
    radius = rng.exponential(scale, size=count)
    theta = rng.uniform(0, 2 * np.pi, size=count)
    lift = rng.exponential(scale, size=count)
    return np.stack([radius * np.cos(theta), radius * np.sin(theta), radius + lift], axis=1)


def sample_interior(cone: Cone, rng: np.random.Generator, count: int, scale: float = 1.0) -> np.ndarray:
    """Random points of the open cone Ω"""
    matrix = cone.generator_matrix
    if matrix is not None:
        weights = rng.uniform(0.2, 1.0, size=(count, cone.dim)) * scale
        return weights @ (matrix / np.linalg.norm(matrix, axis=0)).T
    radius = rng.uniform(0, 0.8, size=count) * scale
    theta = rng.uniform(0, 2 * np.pi, size=count)
    height = rng.uniform(0.5, 1.0, size=count) * scale
    return np.stack([radius * height * np.cos(theta), radius * height * np.sin(theta), height], axis=1)
