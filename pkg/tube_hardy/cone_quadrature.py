"""
Quadrature rules on (truncated) dual cones.

Every chart reduces the cone to a product of half-lines:

- polyhedral cones: ξ = Aη with η ∈ [0, ∞)^d, A the matrix of unit dual
  extreme rays, weights scaled by |det A|;
- the 3D lorentz cone: ξ = (s cos φ, s sin φ, s + τ), area element s ds dφ dτ,
  trapezoid rule in φ.

Each half-line carries composite 16-point Gauss-Legendre panels on [0, R]
(graded near the origin, capped by the decay and oscillation length scales)
followed by a Gauss-Laguerre tail on [R, ∞) scaled to the axis decay rate.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate as sp_integrate
from scipy.special import roots_laguerre, roots_legendre

from .cone_geometry import (
    Cone,
    ConeKind,
    central_direction,
    cone_from_json,
    cone_to_json,
    dual_view,
    interior_depth,
)
from .errors import (
    NoConvergence,
    NonFiniteIntegrand,
    OscillationBudgetExceeded,
    RuleRequestInvalid,
    TargetUnreachable,
    UnsupportedCone,
)

logger = logging.getLogger(__name__)

PANEL_POINTS = 16
TAIL_POINTS = 24
MIN_PHI_POINTS = 16
EST_FLOOR = 1e-13
REFERENCE_ABS_FLOOR = 1e-14
MAX_PHI_DOUBLINGS = 8
RULE_CACHE_SIZE = 512

Integrand = Callable[[np.ndarray], Any]


@dataclass(frozen=True)
class QuadratureLimits:
    target: float = 1e-8
    max_nodes: int = 2_000_000
    oscillation_cap: float = 4000.0


_limits = QuadratureLimits()


def set_limits(limits: QuadratureLimits) -> None:
    global _limits
    _limits = limits
    _RULE_CACHE.clear()


def get_limits() -> QuadratureLimits:
    return _limits


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    cone: Cone
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    decay_scale: float
    order_budget: int
    est_rel_error: float
    target: float
    frequency: float = 0.0
    truncation: Optional[float] = None

    @property
    def size(self) -> int:
        return int(self.weights.shape[0])


@lru_cache(maxsize=16)
def _legendre(count: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(count)
    return nodes, weights


@lru_cache(maxsize=16)
def _laguerre(count: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_laguerre(count)
    # weights for ∫ h(u) du rather than ∫ e^{-u} h(u) du
    return nodes, weights * np.exp(nodes)


def _truncation_radius(rate: float, degree: int, target: float) -> float:
    """Smallest R with (1+R)^degree e^{-rate R} ≲ target e^{-5}"""
    budget = -math.log(target) + 5.0
    radius = budget / rate
    for _ in range(8):
        radius = (budget + degree * math.log1p(radius)) / rate
    return radius


def _panel_edges(
    length: float,
    rate: float,
    frequency: float,
    first_width: float,
    breakpoints: Iterable[float],
    refine: int,
) -> np.ndarray:
    cap = math.inf
    if rate > 0:
        cap = min(cap, 6.0 / rate)
    if frequency > 0:
        cap = min(cap, 6.0 / frequency)
    first = min(first_width, cap, length)

    edges = [0.0]
    while edges[-1] < length:
        left = edges[-1]
        width = min(max(first, 0.5 * left), cap)
        edges.append(min(left + width, length))

    for point in breakpoints:
        if 0.0 < point < length and np.min(np.abs(np.asarray(edges) - point)) > 1e-12 * length:
            edges.append(float(point))
    edges = np.unique(np.asarray(edges))

    if refine > 1:
        pieces = [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
        edges = np.concatenate(pieces + [edges[-1:]])
    return edges


def _axis_rule(
    rate: float,
    degree: int,
    target: float,
    frequency: float,
    first_width: float,
    breakpoints: Iterable[float],
    truncation: Optional[float],
    refine: int,
) -> Tuple[np.ndarray, np.ndarray, float]:
    """Nodes and weights on [0, ∞) (or [0, truncation]) for one chart axis"""
    length = truncation if truncation is not None else _truncation_radius(rate, degree, target)
    edges = _panel_edges(length, rate, frequency, first_width, breakpoints, refine)

    x, w = _legendre(PANEL_POINTS)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()

    if truncation is None:
        u, v = _laguerre(TAIL_POINTS * refine)
        nodes = np.concatenate([nodes, length + u / rate])
        weights = np.concatenate([weights, v / rate])
    return nodes, weights, length


def _axis_error(
    rate: float,
    degree: int,
    frequency: float,
    coarse: Tuple[np.ndarray, np.ndarray],
    fine: Tuple[np.ndarray, np.ndarray],
) -> float:
    """Relative change of the envelope integral under one refinement"""

    def envelope(t: np.ndarray) -> np.ndarray:
        return (1.0 + t) ** degree * np.exp(-(rate - 1j * frequency) * t)

    coarse_value = np.sum(coarse[1] * envelope(coarse[0]))
    fine_value = np.sum(fine[1] * envelope(fine[0]))
    scale = np.sum(fine[1] * np.abs(envelope(fine[0])))
    if scale == 0:
        return 0.0
    return float(abs(coarse_value - fine_value) / scale)


def _tensor(axis_nodes: Sequence[np.ndarray], axis_weights: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    grids = np.meshgrid(*axis_nodes, indexing="ij")
    points = np.stack([grid.ravel() for grid in grids], axis=1)
    weights = reduce(np.multiply.outer, axis_weights).ravel()
    return points, weights


def _chart_matrix(cone: Cone) -> np.ndarray:
    """Columns are the unit extreme rays of Ω*"""
    return np.ascontiguousarray(dual_view(cone).extreme_rays.T)


def _chart_contraction(cone: Cone) -> float:
    """κ with |Aη| ≥ κ·|η|_1 on the chart"""
    return interior_depth(cone, central_direction(cone))


def _axis_breakpoints(matrix: np.ndarray, breakpoints: Iterable[Sequence[float]]) -> List[List[float]]:
    per_axis: List[List[float]] = [[] for _ in range(matrix.shape[0])]
    for point in breakpoints:
        coords = np.linalg.solve(matrix, np.asarray(point, dtype=float))
        for axis, value in enumerate(coords):
            if value > 0:
                per_axis[axis].append(float(value))
    return per_axis


def _check_oscillation(frequency: float, radius: float, limits: QuadratureLimits) -> None:
    if frequency * radius > limits.oscillation_cap:
        raise OscillationBudgetExceeded(
            f"Oscillation |x|·R = {frequency * radius:.1f} exceeds cap {limits.oscillation_cap}",
            details={"frequency": frequency, "radius": radius},
        )


def _check_budget(cone: Cone, counts: Sequence[int], limits: QuadratureLimits) -> None:
    total = int(np.prod(counts))
    if total > limits.max_nodes:
        raise TargetUnreachable(
            f"Rule needs {total} nodes, budget is {limits.max_nodes}",
            details={"cone": cone.kind.value, "axis_counts": list(counts)},
        )


def build_rule(
    cone: Cone,
    decay_scale: float,
    degree: int,
    target: Optional[float] = None,
    *,
    frequency: float = 0.0,
    spread: float = 0.0,
    pole_distance: float = math.inf,
    breakpoints: Sequence[Sequence[float]] = (),
    truncation: Optional[float] = None,
    axis_rates: Optional[Sequence[float]] = None,
    refine: int = 1,
    limits: Optional[QuadratureLimits] = None,
) -> QuadratureRule:
    """
    Rule for integrands bounded by e^{-c|ξ|}(1+|ξ|)^degree, possibly
    oscillating at ``frequency``.

    ``truncation`` restricts the rule to the box |ξ|_∞ ≤ truncation (compact
    support); ``breakpoints`` are ξ-space points whose chart coordinates
    become panel edges; ``axis_rates`` overrides the per-axis decay derived
    from ``decay_scale``; ``spread`` bounds the transverse growth in the
    lorentz angle.
    """
    limits = limits or _limits
    target = target if target is not None else limits.target

    if not isinstance(degree, (int, np.integer)) or degree < 0:
        raise RuleRequestInvalid(f"Degree must be a non-negative integer, got {degree!r}")
    if not (0 < target < 1):
        raise RuleRequestInvalid(f"Relative target must lie in (0, 1), got {target}")
    if truncation is not None and not (math.isfinite(truncation) and truncation > 0):
        raise RuleRequestInvalid(f"Truncation radius must be positive, got {truncation}")
    if not math.isfinite(decay_scale) or decay_scale < 0 or (decay_scale == 0 and truncation is None):
        raise RuleRequestInvalid(
            f"Decay scale must be positive for an untruncated rule, got {decay_scale}"
        )

    if cone.is_polyhedral:
        rule_parts = _polyhedral_rule(
            cone, decay_scale, int(degree), target, frequency, pole_distance,
            breakpoints, truncation, axis_rates, refine, limits,
        )
    elif cone.kind is ConeKind.LORENTZ and cone.dim == 3:
        rule_parts = _lorentz_rule(
            cone, decay_scale, int(degree), target, frequency, spread, pole_distance,
            truncation, axis_rates, refine, limits,
        )
    else:
        raise UnsupportedCone(f"No quadrature chart for {cone!r}")

    nodes, weights, est = rule_parts
    nodes.setflags(write=False)
    weights.setflags(write=False)
    if est > target:
        logger.warning(
            f"Quadrature on {cone!r} self-reports {est:.2e} relative error, above target {target:.1e}"
        )
    logger.debug(f"Built rule on {cone!r}: {weights.shape[0]} nodes, c={decay_scale:.4g}, est={est:.2e}")
    return QuadratureRule(
        cone=cone,
        nodes=nodes,
        weights=weights,
        decay_scale=float(decay_scale),
        order_budget=int(degree),
        est_rel_error=est,
        target=float(target),
        frequency=float(frequency),
        truncation=truncation,
    )


def _polyhedral_rule(
    cone, decay_scale, degree, target, frequency, pole_distance,
    breakpoints, truncation, axis_rates, refine, limits,
):
    matrix = _chart_matrix(cone)
    kappa = _chart_contraction(cone)
    dim = cone.dim

    rates = list(axis_rates) if axis_rates is not None else [kappa * decay_scale] * dim
    axis_truncation = None
    if truncation is not None:
        identity = np.allclose(matrix, np.eye(dim))
        axis_truncation = truncation if identity else math.sqrt(dim) * truncation / kappa

    lengths = [
        axis_truncation if axis_truncation is not None else _truncation_radius(rate, degree, target)
        for rate in rates
    ]
    _check_oscillation(frequency, max(lengths), limits)

    first_width = min(2.0, 2.0 * pole_distance)
    cuts = _axis_breakpoints(matrix, breakpoints)

    axes = []
    errors = []
    for axis in range(dim):
        coarse = _axis_rule(rates[axis], degree, target, frequency, first_width,
                            cuts[axis], axis_truncation, refine)
        fine = _axis_rule(rates[axis], degree, target, frequency, first_width,
                          cuts[axis], axis_truncation, 2 * refine)
        axes.append(coarse)
        errors.append(_axis_error(rates[axis], degree, frequency, coarse[:2], fine[:2]))

    _check_budget(cone, [len(t) for t, _, _ in axes], limits)

    eta, weights = _tensor([t for t, _, _ in axes], [q for _, q, _ in axes])
    nodes = eta @ matrix.T
    weights = weights * abs(np.linalg.det(matrix))
    return np.ascontiguousarray(nodes), weights, max(float(sum(errors)), EST_FLOOR)


def _lorentz_rule(
    cone, decay_scale, degree, target, frequency, spread, pole_distance,
    truncation, axis_rates, refine, limits,
):
    if axis_rates is not None:
        s_rate, tau_rate = axis_rates
    else:
        # |ξ| ≥ √2·s + τ/√2 on the chart
        s_rate, tau_rate = math.sqrt(2) * decay_scale, decay_scale / math.sqrt(2)

    if truncation is not None:
        _check_oscillation(frequency, truncation, limits)
    else:
        reach = max(_truncation_radius(s_rate, degree + 1, target), _truncation_radius(tau_rate, degree, target))
        _check_oscillation(frequency, reach, limits)

    first_width = min(2.0, 2.0 * pole_distance / math.sqrt(2))
    s_coarse = _axis_rule(s_rate, degree + 1, target, frequency, first_width, (), truncation, refine)
    s_fine = _axis_rule(s_rate, degree + 1, target, frequency, first_width, (), truncation, 2 * refine)
    tau_coarse = _axis_rule(tau_rate, degree, target, frequency, first_width, (), truncation, refine)
    tau_fine = _axis_rule(tau_rate, degree, target, frequency, first_width, (), truncation, 2 * refine)

    # the trapezoid rule in φ converges geometrically once M exceeds the
    # angular bandwidth s·(|x'| + spread) over the s-range
    bandwidth = math.e / 2 * s_coarse[2] * (frequency + spread) + 24
    phi_count = max(MIN_PHI_POINTS, 2 * math.ceil(bandwidth / 2)) * refine
    _check_budget(cone, [len(s_coarse[0]), phi_count, len(tau_coarse[0])], limits)

    phi = 2 * np.pi * np.arange(phi_count) / phi_count
    phi_weights = np.full(phi_count, 2 * np.pi / phi_count)
    grid, weights = _tensor([s_coarse[0], phi, tau_coarse[0]], [s_coarse[1], phi_weights, tau_coarse[1]])
    s, angle, tau = grid[:, 0], grid[:, 1], grid[:, 2]
    nodes = np.stack([s * np.cos(angle), s * np.sin(angle), s + tau], axis=1)
    weights = weights * s

    est = _axis_error(s_rate, degree + 1, frequency, s_coarse[:2], s_fine[:2])
    est += _axis_error(tau_rate, degree, frequency, tau_coarse[:2], tau_fine[:2])
    return nodes, weights, max(float(est), EST_FLOOR)


# rule cache: keyed by bucketed parameters, read-mostly, last writer wins

_RULE_CACHE: Dict[Tuple, QuadratureRule] = {}


def _floor_bucket(value: float) -> float:
    """Round down to the grid 2^{k/4}; rules built for slower decay stay valid"""
    if value <= 0:
        return 0.0
    return 2.0 ** (math.floor(4 * math.log2(value)) / 4)


def _ceil_bucket(value: float) -> float:
    if value <= 0:
        return 0.0
    return 2.0 ** (math.ceil(4 * math.log2(value)) / 4)


def clear_rule_cache() -> None:
    _RULE_CACHE.clear()


def rule_for(
    cone: Cone,
    y: Any,
    *,
    x: Any = None,
    degree: int = 0,
    target: Optional[float] = None,
    extra_decay: float = 0.0,
    extra_frequency: float = 0.0,
    pole_distance: float = math.inf,
    breakpoints: Sequence[Sequence[float]] = (),
    truncation: Optional[float] = None,
    limits: Optional[QuadratureLimits] = None,
) -> QuadratureRule:
    """
    Cached rule for integrands e^{i⟨x,ξ⟩ - ⟨y,ξ⟩}·g(ξ) where |g| decays at
    least like e^{-extra_decay·|ξ|}.

    The decay scale is interior_depth(y) + extra_decay; the per-axis decay
    rates come from ⟨y, a_j⟩ on the dual rays a_j, which keeps panels fine
    enough when y is far from the cone axis.
    """
    limits = limits or _limits
    target = target if target is not None else limits.target
    point = np.asarray(y, dtype=float).reshape(cone.dim)
    depth = interior_depth(cone, point)
    decay = max(depth, 0.0) + extra_decay

    frequency = extra_frequency
    if x is not None:
        frequency += float(np.linalg.norm(np.asarray(x, dtype=float)))

    if cone.is_polyhedral:
        rays = dual_view(cone).extreme_rays
        kappa = _chart_contraction(cone)
        rates = tuple(_floor_bucket(max(float(r), 0.0) + kappa * extra_decay) for r in rays @ point)
        spread = 0.0
    else:
        transverse = float(np.linalg.norm(point[:-1]))
        rates = (
            _floor_bucket(max(point[-1] - transverse, 0.0) + math.sqrt(2) * extra_decay),
            _floor_bucket(max(point[-1], 0.0) + extra_decay / math.sqrt(2)),
        )
        spread = _ceil_bucket(transverse)

    key = (
        cone,
        rates,
        _floor_bucket(decay),
        _ceil_bucket(frequency),
        spread,
        int(degree),
        float(target),
        float(pole_distance),
        tuple(tuple(float(v) for v in np.ravel(b)) for b in breakpoints),
        truncation,
        limits,
    )
    cached = _RULE_CACHE.get(key)
    if cached is not None:
        return cached

    rule = build_rule(
        cone,
        _floor_bucket(decay),
        int(degree),
        target,
        frequency=_ceil_bucket(frequency),
        spread=spread,
        pole_distance=pole_distance,
        breakpoints=breakpoints,
        truncation=truncation,
        axis_rates=rates,
        limits=limits,
    )
    if len(_RULE_CACHE) >= RULE_CACHE_SIZE:
        _RULE_CACHE.clear()
    _RULE_CACHE[key] = rule
    return rule


def integrate(rule: QuadratureRule, phi: Integrand) -> complex:
    """
    Σ_j q_j φ(ξ_j). ``phi`` receives the (N, d) node array and returns N
    values (a scalar is broadcast).
    """
    values = np.broadcast_to(np.asarray(phi(rule.nodes)), (rule.size,))
    finite = np.isfinite(values)
    if not np.all(finite):
        bad = int(np.argmin(finite))
        raise NonFiniteIntegrand(
            "Integrand is not finite at a quadrature node",
            details={"node": rule.nodes[bad].tolist(), "count": int(np.sum(~finite))},
        )
    # np.sum uses pairwise summation: deterministic for a fixed rule
    return complex(np.sum(rule.weights * values))


def _split_axis(start: float, stop: float, cuts: Sequence[float]) -> List[Tuple[float, float]]:
    inner = sorted(c for c in cuts if start < c < stop)
    edges = [start] + inner + [stop]
    return list(zip(edges[:-1], edges[1:]))


def _quad(func: Callable[[float], float], start: float, stop: float, tol: float, limit: int) -> float:
    result = sp_integrate.quad(
        func, start, stop, epsabs=REFERENCE_ABS_FLOOR, epsrel=tol, limit=limit, full_output=1
    )
    if len(result) > 3:
        raise NoConvergence(
            f"Adaptive quadrature did not converge on [{start}, {stop}]",
            details={"message": str(result[3]).splitlines()[0] if result[3] else ""},
        )
    return result[0]


def adaptive_reference(
    cone: Cone,
    phi: Integrand,
    tol: float = 1e-10,
    *,
    breakpoints: Sequence[Sequence[float]] = (),
    truncation: Optional[float] = None,
    limit: int = 200,
) -> complex:
    """
    Oracle integral of φ over Ω* by nested adaptive quadrature (QUADPACK via
    scipy.integrate.quad) on the chart; real and imaginary parts separately.
    """
    if cone.is_polyhedral:
        matrix = _chart_matrix(cone)
        jacobian = abs(np.linalg.det(matrix))
        cuts = _axis_breakpoints(matrix, breakpoints)
        stop = math.inf
        if truncation is not None:
            identity = np.allclose(matrix, np.eye(cone.dim))
            stop = truncation if identity else math.sqrt(cone.dim) * truncation / _chart_contraction(cone)

        def value_at(eta: List[float]) -> complex:
            xi = matrix @ np.asarray(eta)
            return complex(np.asarray(phi(xi[None, :])).ravel()[0]) * jacobian

        def nested(part: Callable[[complex], float], prefix: List[float]) -> float:
            axis = len(prefix)

            def inner(t: float) -> float:
                point = prefix + [t]
                if len(point) == cone.dim:
                    return part(value_at(point))
                return nested(part, point)

            return sum(_quad(inner, a, b, tol, limit) for a, b in _split_axis(0.0, stop, cuts[axis]))

        real = nested(lambda v: v.real, [])
        imag = nested(lambda v: v.imag, [])
        return complex(real, imag)

    if cone.kind is ConeKind.LORENTZ and cone.dim == 3:
        stop = truncation if truncation is not None else math.inf

        def angular(s: float, tau: float) -> complex:
            count = 32
            previous = None
            for _ in range(MAX_PHI_DOUBLINGS):
                angle = 2 * np.pi * np.arange(count) / count
                xi = np.stack([s * np.cos(angle), s * np.sin(angle), np.full(count, s + tau)], axis=1)
                current = complex(np.mean(np.asarray(phi(xi)))) * 2 * np.pi * s
                if previous is not None and abs(current - previous) <= tol * max(abs(current), REFERENCE_ABS_FLOOR):
                    return current
                previous = current
                count *= 2
            raise NoConvergence("Angular trapezoid rule did not converge", details={"s": s, "tau": tau})

        def part_integral(part: Callable[[complex], float]) -> float:
            def over_tau(s: float) -> float:
                return _quad(lambda tau: part(angular(s, tau)), 0.0, stop, tol, limit)

            return _quad(over_tau, 0.0, stop, tol, limit)

        return complex(part_integral(lambda v: v.real), part_integral(lambda v: v.imag))

    raise UnsupportedCone(f"No reference chart for {cone!r}")


def rule_to_json(rule: QuadratureRule) -> str:
    payload = {
        "cone": json.loads(cone_to_json(rule.cone)),
        "nodes": rule.nodes.tolist(),
        "weights": rule.weights.tolist(),
        "decay_scale": rule.decay_scale,
        "order_budget": rule.order_budget,
        "est_rel_error": rule.est_rel_error,
        "target": rule.target,
        "frequency": rule.frequency,
        "truncation": rule.truncation,
    }
    return json.dumps(payload, sort_keys=True)


def rule_from_json(text: str) -> QuadratureRule:
    payload = json.loads(text)
    cone = cone_from_json(json.dumps(payload["cone"]))
    nodes = np.asarray(payload["nodes"], dtype=float).reshape(-1, cone.dim)
    weights = np.asarray(payload["weights"], dtype=float)
    if weights.shape != (nodes.shape[0],) or np.any(weights <= 0):
        raise RuleRequestInvalid("Serialized rule has inconsistent or non-positive weights")
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(
        cone=cone,
        nodes=nodes,
        weights=weights,
        decay_scale=float(payload["decay_scale"]),
        order_budget=int(payload["order_budget"]),
        est_rel_error=float(payload["est_rel_error"]),
        target=float(payload["target"]),
        frequency=float(payload.get("frequency", 0.0)),
        truncation=payload.get("truncation"),
    )
