"""
Two-sided Hardy-Sobolev decomposition of periodic boundary data.

A boundary function u is sampled on the uniform grid x_j = jL/N (d = 1 or
2). Its spectrum uses the forward-normalised DFT

    b_k = N^{-d} Σ_j u(x_j) e^{-2πi⟨j,k⟩/N},      ξ_k = 2πk/L,  k ∈ [-N/2, N/2)^d,

so that u(x_j) = Σ_k b_k e^{i⟨ξ_k, x_j⟩} and Σ_k |b_k|² = N^{-d} Σ_j |u(x_j)|².
Bins with ξ_k ∈ Ω* (DC included) form u_+, bins with ξ_k ∈ -Ω* \\ {0} form
u_-, and anything else is residual mass.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import fft

from .cone_geometry import Cone, contains_dual, contains_primal, require_interior
from .errors import (
    GridInvalid,
    NonFiniteSamples,
    SpectrumOutsideCones,
    WrongTube,
)
from .fourier_laplace import trigonometric_sum
from .gauge_weight import Weight

logger = logging.getLogger(__name__)

MAX_GRID_DIM = 2
MIN_POINTS = 4


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    dim: int
    points_per_axis: int
    period: float
    samples: np.ndarray = field(repr=False)

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    def coordinates(self) -> np.ndarray:
        """(N^d, d) array of grid points in C order"""
        axis = np.arange(self.points_per_axis) * self.spacing
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class BinSet:
    bins: np.ndarray = field(repr=False)
    frequencies: np.ndarray = field(repr=False)
    coefficients: np.ndarray = field(repr=False)

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def as_mapping(self) -> Dict[Tuple[int, ...], complex]:
        return {tuple(int(k) for k in b): complex(c) for b, c in zip(self.bins, self.coefficients)}

    def subset(self, mask: np.ndarray) -> "BinSet":
        return BinSet(self.bins[mask], self.frequencies[mask], self.coefficients[mask])


@dataclass(frozen=True, eq=False)
class Spectrum:
    dim: int
    points_per_axis: int
    period: float
    bins: BinSet

    def as_mapping(self) -> Dict[Tuple[int, ...], complex]:
        return self.bins.as_mapping()


@dataclass(frozen=True, eq=False)
class SpectrumSplit:
    cone: Cone
    dim: int
    points_per_axis: int
    period: float
    plus: BinSet
    minus: BinSet
    residual: BinSet
    residual_mass: float
    total_energy: float

    @property
    def coeffs_plus(self) -> Dict[Tuple[int, ...], complex]:
        return self.plus.as_mapping()

    @property
    def coeffs_minus(self) -> Dict[Tuple[int, ...], complex]:
        return self.minus.as_mapping()


@dataclass(frozen=True)
class NormIdentityReport:
    boundary_norm_sq: float
    plus_norm_sq: float
    minus_norm_sq: float
    defect: float
    residual_mass: float

    @property
    def relative_defect(self) -> float:
        return self.defect / self.boundary_norm_sq if self.boundary_norm_sq > 0 else self.defect

    def to_dict(self) -> Dict[str, float]:
        return {
            "boundary_norm_sq": self.boundary_norm_sq,
            "plus_norm_sq": self.plus_norm_sq,
            "minus_norm_sq": self.minus_norm_sq,
            "defect": self.defect,
            "residual_mass": self.residual_mass,
        }


def make_grid(samples: Any, period: float) -> BoundaryGrid:
    values = np.asarray(samples, dtype=complex)
    dim = values.ndim
    if dim < 1 or dim > MAX_GRID_DIM:
        raise GridInvalid(f"Boundary grids must be 1- or 2-dimensional, got {dim} axes")
    size = values.shape[0]
    if any(n != size for n in values.shape):
        raise GridInvalid(f"Grid must have the same number of points on each axis, got {values.shape}")
    if size < MIN_POINTS or size & (size - 1):
        raise GridInvalid(f"Points per axis must be a power of two ≥ {MIN_POINTS}, got {size}")
    if not (np.isfinite(period) and period > 0):
        raise GridInvalid(f"Period must be positive, got {period}")
    if not np.all(np.isfinite(values)):
        raise NonFiniteSamples(
            "Boundary samples contain NaN or infinite values",
            details={"count": int(np.sum(~np.isfinite(values)))},
        )
    values = values.copy()
    values.setflags(write=False)
    return BoundaryGrid(dim=dim, points_per_axis=size, period=float(period), samples=values)


def _bin_indices(dim: int, size: int) -> np.ndarray:
    k = np.rint(fft.fftfreq(size, d=1.0 / size)).astype(int)
    mesh = np.meshgrid(*([k] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def analyze_grid(grid: BoundaryGrid) -> Spectrum:
    """Forward-normalised DFT of the samples, one entry per bin"""
    if not np.all(np.isfinite(grid.samples)):
        raise NonFiniteSamples("Boundary samples contain NaN or infinite values")
    coefficients = fft.fftn(grid.samples, norm="forward").ravel()
    bins = _bin_indices(grid.dim, grid.points_per_axis)
    frequencies = 2 * np.pi * bins / grid.period
    return Spectrum(
        dim=grid.dim,
        points_per_axis=grid.points_per_axis,
        period=grid.period,
        bins=BinSet(bins=bins, frequencies=frequencies, coefficients=coefficients),
    )


def split_spectrum(spectrum: Spectrum, cone: Cone, tol: float = 1e-12) -> SpectrumSplit:
    if cone.dim != spectrum.dim:
        raise GridInvalid(f"Grid dimension {spectrum.dim} does not match cone dimension {cone.dim}")
    if tol < 0:
        raise GridInvalid(f"Residual tolerance must be non-negative, got {tol}")

    bins = spectrum.bins
    freqs = bins.frequencies
    is_dc = np.all(bins.bins == 0, axis=1)
    plus_mask = is_dc | np.asarray(contains_dual(cone, freqs))
    minus_mask = ~plus_mask & np.asarray(contains_dual(cone, -freqs))
    residual_mask = ~(plus_mask | minus_mask)

    plus, minus, residual = bins.subset(plus_mask), bins.subset(minus_mask), bins.subset(residual_mask)
    total = bins.energy
    residual_mass = residual.energy
    if residual_mass > tol * total:
        raise SpectrumOutsideCones(
            f"Spectral mass {residual_mass:.3e} lies outside Ω* ∪ (-Ω*)",
            details={
                "residual_mass": residual_mass,
                "total_energy": total,
                "tol": tol,
                "bins": residual.bins[np.abs(residual.coefficients) > 0][:10].tolist(),
            },
        )
    logger.debug(
        f"Split {bins.bins.shape[0]} bins: {plus.bins.shape[0]} plus, "
        f"{minus.bins.shape[0]} minus, residual mass {residual_mass:.3e}"
    )
    return SpectrumSplit(
        cone=cone,
        dim=spectrum.dim,
        points_per_axis=spectrum.points_per_axis,
        period=spectrum.period,
        plus=plus,
        minus=minus,
        residual=residual,
        residual_mass=residual_mass,
        total_energy=total,
    )


@dataclass(frozen=True, eq=False)
class TubeExtension:
    """
    Finite trigonometric sum Σ b_k e^{i⟨z,ξ_k⟩}, evaluated on the closed
    tube over Ω (side +1) or over -Ω (side -1).
    """
    cone: Cone
    side: int
    bins: BinSet

    def __call__(self, z: Any) -> complex:
        point = np.asarray(z, dtype=complex).reshape(-1)
        if point.shape != (self.cone.dim,):
            raise WrongTube(f"Expected a point of C^{self.cone.dim}, got shape {point.shape}")
        if not contains_primal(self.cone, self.side * point.imag):
            tube = "T_Ω" if self.side > 0 else "T_{-Ω}"
            raise WrongTube(
                f"Im z lies outside the closure of the cone for {tube}",
                details={"y": point.imag.tolist(), "side": self.side},
            )
        return trigonometric_sum(self.bins.frequencies, self.bins.coefficients, point)


def extend(split: SpectrumSplit) -> Tuple[TubeExtension, TubeExtension]:
    return (
        TubeExtension(cone=split.cone, side=1, bins=split.plus),
        TubeExtension(cone=split.cone, side=-1, bins=split.minus),
    )


def inverse_samples(split: SpectrumSplit) -> Tuple[np.ndarray, np.ndarray]:
    """Grid samples of u_+ and u_- (exact inverse of the forward DFT)"""
    shape = (split.points_per_axis,) * split.dim

    def synthesize(part: BinSet) -> np.ndarray:
        spectrum = np.zeros(shape, dtype=complex)
        index = tuple(np.mod(part.bins, split.points_per_axis).T)
        spectrum[index] = part.coefficients
        return fft.ifftn(spectrum, norm="forward")

    return synthesize(split.plus), synthesize(split.minus)


def norm_identity_report(grid: BoundaryGrid, cone: Cone, weight: Weight, tol: float = 1e-12) -> NormIdentityReport:
    """
    ‖u‖² with the reflected weight against ‖F_+‖² + ‖F_-‖²; the defect is
    the absolute mismatch.
    """
    if weight.cone != cone:
        raise GridInvalid("Weight and cone do not match")
    split = split_spectrum(analyze_grid(grid), cone, tol)

    plus_sq = np.abs(split.plus.coefficients) ** 2
    minus_sq = np.abs(split.minus.coefficients) ** 2
    plus_norm = float(np.sum(plus_sq * weight(split.plus.frequencies))) if plus_sq.size else 0.0
    minus_norm = float(np.sum(minus_sq * weight(-split.minus.frequencies))) if minus_sq.size else 0.0

    signal = BinSet(
        bins=np.vstack([split.plus.bins, split.minus.bins]),
        frequencies=np.vstack([split.plus.frequencies, split.minus.frequencies]),
        coefficients=np.concatenate([split.plus.coefficients, split.minus.coefficients]),
    )
    if signal.coefficients.size:
        boundary = float(np.sum(np.abs(signal.coefficients) ** 2 * weight.reflected(signal.frequencies)))
    else:
        boundary = 0.0

    report = NormIdentityReport(
        boundary_norm_sq=boundary,
        plus_norm_sq=plus_norm,
        minus_norm_sq=minus_norm,
        defect=abs(boundary - plus_norm - minus_norm),
        residual_mass=split.residual_mass,
    )
    logger.debug(f"Norm identity: {report.to_dict()}")
    return report


def boundary_limit_error(split: SpectrumSplit, grid: BoundaryGrid, y: Any, side: int = 1) -> float:
    """
    Σ_k |e^{-⟨y,ξ_k⟩} - 1|² |b_k|² over the plus bins (y ∈ int Ω) or, with
    side = -1, over the minus bins (y ∈ -int Ω).
    """
    if (grid.dim, grid.points_per_axis, grid.period) != (split.dim, split.points_per_axis, split.period):
        raise GridInvalid("Split was not computed from this grid")
    shift = np.asarray(y, dtype=float).reshape(-1)
    if shift.shape != (split.cone.dim,):
        raise GridInvalid(f"Height y must have length {split.cone.dim}")
    require_interior(split.cone, side * shift)
    part = split.plus if side > 0 else split.minus
    if not part.coefficients.size:
        return 0.0
    damping = np.exp(-(part.frequencies @ shift))
    return float(np.sum(np.abs(damping - 1.0) ** 2 * np.abs(part.coefficients) ** 2))


# ingestion

def grid_from_modes(
    dim: int,
    points_per_axis: int,
    period: float,
    modes: Iterable[Tuple[Iterable[int], complex]],
) -> BoundaryGrid:
    """Samples of Σ c_k e^{i⟨ξ_k, x⟩} for the listed integer bins k"""
    shape = (points_per_axis,) * dim
    spectrum = np.zeros(shape, dtype=complex)
    for bin_index, coeff in modes:
        k = np.asarray(list(bin_index), dtype=int).reshape(-1)
        if k.shape != (dim,) or np.any(k < -points_per_axis // 2) or np.any(k >= points_per_axis // 2):
            raise GridInvalid(f"Bin {k.tolist()} is not representable on a {points_per_axis}-point grid")
        spectrum[tuple(np.mod(k, points_per_axis))] += complex(coeff)
    return make_grid(fft.ifftn(spectrum, norm="forward"), period)


def grid_from_csv(path: Union[str, Path], period: float) -> BoundaryGrid:
    """
    CSV with columns ``index`` (1D) or ``index_0,index_1`` (2D), plus ``re``
    and ``im``.
    """
    frame = pd.read_csv(path)
    index_columns = [c for c in ("index", "index_0", "index_1") if c in frame.columns]
    if not index_columns or not {"re", "im"} <= set(frame.columns):
        raise GridInvalid(f"{path}: expected index, re and im columns, got {list(frame.columns)}")
    dim = len(index_columns)
    size = int(round(len(frame) ** (1.0 / dim)))
    if size ** dim != len(frame):
        raise GridInvalid(f"{path}: {len(frame)} rows do not form a square grid")
    samples = np.full((size,) * dim, np.nan + 0j)
    indices = frame[index_columns].to_numpy(dtype=int)
    if np.any(indices < 0) or np.any(indices >= size):
        raise GridInvalid(f"{path}: sample indices outside [0, {size})")
    samples[tuple(indices.T)] = frame["re"].to_numpy(dtype=float) + 1j * frame["im"].to_numpy(dtype=float)
    return make_grid(samples, period)


def grid_to_frame(grid: BoundaryGrid) -> pd.DataFrame:
    indices = np.stack(np.unravel_index(np.arange(grid.samples.size), grid.samples.shape), axis=1)
    columns = ["index"] if grid.dim == 1 else [f"index_{a}" for a in range(grid.dim)]
    frame = pd.DataFrame(indices, columns=columns)
    values = grid.samples.ravel()
    frame["re"] = values.real
    frame["im"] = values.imag
    return frame


def grid_from_dict(payload: Mapping[str, Any]) -> BoundaryGrid:
    """
    JSON grid: {"period", "dim", "points_per_axis"} plus either flat C-order
    "re"/"im" sample lists or a "modes" list [{"bin": [..], "coeff": c}].
    """
    try:
        period = float(payload["period"])
        dim = int(payload["dim"])
        size = int(payload["points_per_axis"])
    except (KeyError, TypeError, ValueError) as e:
        raise GridInvalid(f"Grid description is missing period/dim/points_per_axis: {e}")

    if "modes" in payload:
        modes = []
        for mode in payload["modes"]:
            coeff = mode.get("coeff", 1.0)
            if isinstance(coeff, (list, tuple)):
                coeff = complex(coeff[0], coeff[1])
            modes.append((mode["bin"], complex(coeff)))
        return grid_from_modes(dim, size, period, modes)

    re = np.asarray(payload.get("re", []), dtype=float)
    im = np.asarray(payload.get("im", np.zeros_like(re)), dtype=float)
    if re.size != size ** dim or im.size != re.size:
        raise GridInvalid(f"Expected {size ** dim} samples, got {re.size} real and {im.size} imaginary")
    return make_grid((re + 1j * im).reshape((size,) * dim), period)


def grid_from_json(path: Union[str, Path]) -> BoundaryGrid:
    with open(path) as handle:
        return grid_from_dict(json.load(handle))


def synthetic_grid(
    cone: Cone,
    rng: np.random.Generator,
    points_per_axis: int = 32,
    period: float = 2 * np.pi,
    bandwidth: Optional[int] = None,
) -> BoundaryGrid:
    """Random band-limited data whose spectrum lies in Ω* ∪ (-Ω*)"""
    if cone.dim > MAX_GRID_DIM:
        raise GridInvalid(f"Boundary grids support d ≤ {MAX_GRID_DIM}")
    bandwidth = bandwidth if bandwidth is not None else points_per_axis // 4
    bins = _bin_indices(cone.dim, points_per_axis)
    bins = bins[np.all(np.abs(bins) <= bandwidth, axis=1)]
    freqs = 2 * np.pi * bins / period
    allowed = np.asarray(contains_dual(cone, freqs)) | np.asarray(contains_dual(cone, -freqs))
    chosen = bins[allowed]
    coefficients = (rng.normal(size=len(chosen)) + 1j * rng.normal(size=len(chosen))) / (1 + np.abs(chosen).sum(axis=1))
    return grid_from_modes(cone.dim, points_per_axis, period, zip(chosen.tolist(), coefficients))
