"""Turbulence coherence length and random phase screens for the signal path.

The medium is summarized by a transverse coherence length rho. Screens are
Gaussian-correlated random phases with rms amplitude SIGMA_PHASE chosen large
enough that the ensemble mutual coherence of exp(i*phi) follows
exp(-sep^2 / (2 rho^2)) over the separations that matter, with a residual
coherence floor of exp(-2*SIGMA_PHASE^2) ~ 2e-22.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .core_optics import ComplexField, GridSpec
from .errors import InvalidParamsError, ResolutionError, ShapeMismatchError
from .rng import (
    RealizationKey,
    STREAM_PHASE_SCREEN,
    complex_normal_block,
    stream_generator,
)

# rms phase per screen, radians
SIGMA_PHASE = 5.0


@dataclass(frozen=True)
class TurbulenceSpec:
    """Structure constant cn2 (m^(-2/3)), path length and wavelength (m)."""

    cn2: float
    path_length: float
    wavelength: float

    def __post_init__(self) -> None:
        if not (self.cn2 >= 0 and np.isfinite(self.cn2)):
            raise InvalidParamsError("cn2 must be finite and >= 0")
        if not (self.path_length > 0 and np.isfinite(self.path_length)):
            raise InvalidParamsError("path_length must be positive and finite")
        if not (self.wavelength > 0 and np.isfinite(self.wavelength)):
            raise InvalidParamsError("wavelength must be positive and finite")

    @property
    def is_vacuum(self) -> bool:
        return self.cn2 == 0.0


def coherence_length(spec: TurbulenceSpec) -> float:
    """Transverse coherence length rho; +inf in vacuum."""
    if spec.is_vacuum:
        return np.inf
    k = 2.0 * np.pi / spec.wavelength
    return float((0.55 * spec.cn2 * k * k * spec.path_length) ** -0.6)


@dataclass
class PhaseScreen:
    """Random phase samples (radians) on a square grid."""

    phase: np.ndarray
    pitch: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.phase, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidParamsError("screen must be a square 2-D array")
        if not np.all(np.isfinite(arr)):
            raise InvalidParamsError("screen contains non-finite samples")
        self.phase = arr
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise InvalidParamsError("pitch must be positive and finite")


class _ScreenPlan:
    __slots__ = ("spectral_filter", "norm")

    def __init__(self, r_phi: float, grid: GridSpec):
        f = grid.frequencies()
        f2 = f[:, None] ** 2 + f[None, :] ** 2
        self.spectral_filter = np.exp(-np.pi ** 2 * r_phi ** 2 * f2)
        # normalizes the real/imag parts of the filtered field to unit variance
        self.norm = grid.n * grid.n / np.sqrt(np.sum(self.spectral_filter ** 2))


_PLAN_CACHE: dict[tuple, _ScreenPlan] = {}


def _plan(r_phi: float, grid: GridSpec) -> _ScreenPlan:
    key = (r_phi, grid.n, grid.pitch)
    plan = _PLAN_CACHE.get(key)
    if plan is None:
        if len(_PLAN_CACHE) > 8:
            _PLAN_CACHE.clear()
        plan = _ScreenPlan(r_phi, grid)
        _PLAN_CACHE[key] = plan
    return plan


def generate_phase_screen_pair(
    spec: TurbulenceSpec, grid: GridSpec, key: RealizationKey
) -> tuple[PhaseScreen, PhaseScreen]:
    """Two independent screens for the two legs of one signal-arm realization.

    Both come from one complex Gaussian draw (real and imaginary parts are
    independent by circularity), so a realization consumes exactly one block
    of the screen stream. Vacuum yields two zero screens and draws nothing.
    """
    if spec.is_vacuum:
        zero = np.zeros((grid.n, grid.n))
        return PhaseScreen(zero, grid.pitch), PhaseScreen(zero.copy(), grid.pitch)
    rho = coherence_length(spec)
    if rho < 2.0 * grid.pitch:
        raise ResolutionError(
            f"coherence length {rho:g} m is below two grid pitches "
            f"({2 * grid.pitch:g} m); the screen is unresolvable"
        )
    plan = _plan(SIGMA_PHASE * rho, grid)
    rng = stream_generator(key, STREAM_PHASE_SCREEN)
    w = complex_normal_block(rng, grid.n)
    w *= plan.spectral_filter
    g = sfft.ifft2(w, overwrite_x=True)
    g *= plan.norm
    first = PhaseScreen(SIGMA_PHASE * g.real, grid.pitch)
    second = PhaseScreen(SIGMA_PHASE * g.imag, grid.pitch)
    return first, second


def generate_phase_screen(
    spec: TurbulenceSpec, grid: GridSpec, key: RealizationKey
) -> PhaseScreen:
    """One random phase screen, deterministic in (spec, grid, key)."""
    return generate_phase_screen_pair(spec, grid, key)[0]


def apply_screen(field: ComplexField, screen: PhaseScreen) -> ComplexField:
    """Multiply a field by exp(i * phase); conserves power exactly."""
    if field.samples.shape != screen.phase.shape:
        raise ShapeMismatchError("field and screen grids differ in shape")
    if not np.isclose(field.pitch, screen.pitch, rtol=1e-12, atol=0.0):
        raise ShapeMismatchError("field and screen grids differ in pitch")
    return ComplexField._trusted(
        field.samples * np.exp(1j * screen.phase),
        field.pitch, field.wavelength, field.plane_label,
    )
