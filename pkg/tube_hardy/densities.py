"""
Catalogue of spectral densities selectable by name from experiment configs.

    exponential        A·e^{-⟨v,ξ⟩ + i⟨p,ξ⟩}             v ∈ int Ω
    poly_exponential   P(ξ)·e^{-⟨v,ξ⟩ + i⟨p,ξ⟩}
    indicator          A·1[|ξ|_∞ ≤ r]
    atomic             Σ_k b_k δ_{ξ_k}                     ξ_k ∈ Ω*
    zero               0
"""

import logging
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from .cone_geometry import Cone, central_direction, contains_dual, require_interior
from .errors import FourierLaplaceError, OutsideDualCone, ParameterMismatch
from .fourier_laplace import Envelope, Polynomial, SpectralDensity, atomic_density, polynomial

logger = logging.getLogger(__name__)

CATALOGUE = ("exponential", "poly_exponential", "indicator", "atomic", "zero")


def as_complex(value: Any) -> complex:
    """Accepts a number or a [re, im] pair"""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ParameterMismatch(f"Complex values are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def _phase(cone: Cone, phase: Optional[Sequence[float]]) -> np.ndarray:
    if phase is None:
        return np.zeros(cone.dim)
    vector = np.asarray(phase, dtype=float).reshape(-1)
    if vector.shape != (cone.dim,):
        raise ParameterMismatch(f"Phase vector must have length {cone.dim}")
    return vector


def _decay_direction(cone: Cone, direction: Sequence[float]) -> np.ndarray:
    vector = np.asarray(direction, dtype=float).reshape(-1)
    if vector.shape != (cone.dim,):
        raise ParameterMismatch(f"Decay direction must have length {cone.dim}")
    require_interior(cone, vector)
    return vector


def exponential(
    cone: Cone,
    direction: Sequence[float],
    phase: Optional[Sequence[float]] = None,
    amplitude: complex = 1.0,
) -> SpectralDensity:
    v = _decay_direction(cone, direction)
    p = _phase(cone, phase)
    amplitude = complex(amplitude)

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-(xi @ v) + 1j * (xi @ p))

    return SpectralDensity(
        evaluator=evaluator,
        envelope=Envelope(
            amplitude=abs(amplitude),
            direction=tuple(v.tolist()),
            frequency=float(np.linalg.norm(p)),
        ),
        description=f"exponential(v={v.tolist()}, p={p.tolist()}, A={amplitude})",
    )


def poly_exponential(
    cone: Cone,
    direction: Sequence[float],
    coefficients: Mapping[Any, complex],
    phase: Optional[Sequence[float]] = None,
) -> SpectralDensity:
    v = _decay_direction(cone, direction)
    p = _phase(cone, phase)
    poly: Polynomial = polynomial(coefficients, cone.dim)

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return poly(xi) * np.exp(-(xi @ v) + 1j * (xi @ p))

    return SpectralDensity(
        evaluator=evaluator,
        envelope=Envelope(
            amplitude=float(sum(abs(c) for _, c in poly.terms)),
            degree=poly.degree,
            direction=tuple(v.tolist()),
            frequency=float(np.linalg.norm(p)),
        ),
        description=f"poly_exponential(deg={poly.degree}, v={v.tolist()})",
    )


def indicator(cone: Cone, radius: float, amplitude: complex = 1.0) -> SpectralDensity:
    radius = float(radius)
    if not radius > 0:
        raise FourierLaplaceError(f"Indicator radius must be positive, got {radius}")
    amplitude = complex(amplitude)

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return amplitude * np.all(np.abs(xi) <= radius, axis=-1).astype(float)

    return SpectralDensity(
        evaluator=evaluator,
        envelope=Envelope(amplitude=abs(amplitude), support_radius=radius),
        description=f"indicator(r={radius}, A={amplitude})",
        breakpoints=(tuple([radius] * cone.dim),),
    )


def atomic(cone: Cone, frequencies: Sequence[Sequence[float]], coefficients: Sequence[Any]) -> SpectralDensity:
    freqs = np.asarray(frequencies, dtype=float).reshape(-1, cone.dim)
    inside = contains_dual(cone, freqs)
    if not np.all(inside):
        raise OutsideDualCone(
            "Atomic frequencies must lie in the dual cone",
            details={"outside": freqs[~np.asarray(inside)].tolist()},
        )
    coeffs = [as_complex(c) for c in coefficients]
    return atomic_density(freqs, coeffs, description=f"atomic({len(coeffs)} bins)")


def zero(cone: Cone) -> SpectralDensity:
    return SpectralDensity(
        evaluator=lambda xi: np.zeros(np.shape(xi)[0], dtype=complex),
        envelope=Envelope(amplitude=0.0, direction=tuple(central_direction(cone).tolist())),
        description="zero",
    )


def _coefficient_map(raw: Any) -> Dict[Any, complex]:
    """[{"alpha": [..], "coeff": c}, ...] or {"i,j": c}"""
    if isinstance(raw, Mapping):
        return {tuple(int(a) for a in str(k).split(",")): as_complex(v) for k, v in raw.items()}
    return {tuple(term["alpha"]): as_complex(term.get("coeff", 1.0)) for term in raw}


def from_spec(spec: Mapping[str, Any], cone: Cone) -> SpectralDensity:
    """Build a catalogue density from its JSON description {"kind": ..., ...}"""
    kind = spec.get("kind")
    if kind == "exponential":
        return exponential(cone, spec["direction"], spec.get("phase"), as_complex(spec.get("amplitude", 1.0)))
    if kind == "poly_exponential":
        return poly_exponential(cone, spec["direction"], _coefficient_map(spec["coefficients"]), spec.get("phase"))
    if kind == "indicator":
        return indicator(cone, spec["radius"], as_complex(spec.get("amplitude", 1.0)))
    if kind == "atomic":
        return atomic(cone, spec["frequencies"], spec["coefficients"])
    if kind == "zero":
        return zero(cone)
    raise FourierLaplaceError(f"Unknown density kind {kind!r}; expected one of {', '.join(CATALOGUE)}")


def random_density(cone: Cone, rng: np.random.Generator, kind: Optional[str] = None) -> SpectralDensity:
    """Random catalogue member for property checks"""
    kind = kind or rng.choice(["exponential", "poly_exponential", "exponential_phase"])
    direction = central_direction(cone) * rng.uniform(0.6, 1.5)
    if kind == "exponential":
        return exponential(cone, direction, amplitude=complex(rng.normal(), rng.normal()))
    if kind == "exponential_phase":
        return exponential(cone, direction, phase=rng.uniform(-1, 1, size=cone.dim), amplitude=rng.uniform(0.5, 2))
    if kind == "poly_exponential":
        terms = {(0,) * cone.dim: complex(rng.normal(), rng.normal())}
        for axis in range(cone.dim):
            alpha = [0] * cone.dim
            alpha[axis] = 1
            terms[tuple(alpha)] = complex(rng.normal(), rng.normal())
        return poly_exponential(cone, direction, terms)
    raise FourierLaplaceError(f"Unknown random density kind {kind!r}")
