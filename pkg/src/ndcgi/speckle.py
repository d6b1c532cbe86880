"""Correlated speckle masks for the modulator plane.

Each realization is a unit-variance circular complex Gaussian field with a
Gaussian two-point correlation of 1/e half-width sqrt(2)*l_c, multiplied by a
deterministic Gaussian beam envelope. Synthesis is spectral: white complex
noise shaped by a Gaussian filter, normalized so the field variance is
exactly 1 in expectation.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .core_optics import ComplexField, GridSpec
from .errors import InsufficientSamplesError, InvalidParamsError, ShapeMismatchError
from .rng import RealizationKey, STREAM_SLM, complex_normal_block, stream_generator


@dataclass(frozen=True)
class SpeckleParams:
    """Beam size omega and correlation length l_c on a sampling grid."""

    omega: float
    l_c: float
    grid: GridSpec

    def __post_init__(self) -> None:
        if not (self.omega > 0 and np.isfinite(self.omega)):
            raise InvalidParamsError("omega must be positive and finite")
        if not (self.l_c > 0 and np.isfinite(self.l_c)):
            raise InvalidParamsError("l_c must be positive and finite")
        if self.l_c < 2.0 * self.grid.pitch:
            raise InvalidParamsError(
                f"l_c = {self.l_c:g} m is below two grid pitches "
                f"({2 * self.grid.pitch:g} m); the correlation is unresolvable"
            )
        if self.grid.extent < 6.0 * self.omega:
            raise InvalidParamsError(
                f"grid extent {self.grid.extent:g} m is below 6*omega "
                f"({6 * self.omega:g} m); the envelope is clipped"
            )


class _SpecklePlan:
    """Cached per-parameter synthesis arrays."""

    __slots__ = ("envelope", "spectral_filter", "norm")

    def __init__(self, params: SpeckleParams):
        n = params.grid.n
        u = params.grid.coords()
        u2 = u[:, None] ** 2 + u[None, :] ** 2
        self.envelope = np.exp(-u2 / (4.0 * params.omega ** 2))
        f = params.grid.frequencies()
        f2 = f[:, None] ** 2 + f[None, :] ** 2
        self.spectral_filter = np.exp(-np.pi ** 2 * params.l_c ** 2 * f2)
        # noise blocks carry E|w|^2 = 2, hence the extra factor 2 here
        self.norm = n * n / np.sqrt(2.0 * np.sum(self.spectral_filter ** 2))


_PLAN_CACHE: dict[tuple, _SpecklePlan] = {}


def _plan(params: SpeckleParams) -> _SpecklePlan:
    key = (params.omega, params.l_c, params.grid.n, params.grid.pitch)
    plan = _PLAN_CACHE.get(key)
    if plan is None:
        if len(_PLAN_CACHE) > 8:
            _PLAN_CACHE.clear()
        plan = _SpecklePlan(params)
        _PLAN_CACHE[key] = plan
    return plan


def correlated_unit_field(params: SpeckleParams, key: RealizationKey) -> np.ndarray:
    """The unit-variance correlated complex Gaussian factor, no envelope."""
    plan = _plan(params)
    rng = stream_generator(key, STREAM_SLM)
    w = complex_normal_block(rng, params.grid.n)
    w *= plan.spectral_filter
    g = sfft.ifft2(w, overwrite_x=True)
    g *= plan.norm
    return g


def generate_slm_field(params: SpeckleParams, key: RealizationKey,
                       wavelength: float = 1.0,
                       plane_label: str = "slm") -> ComplexField:
    """One speckle mask realization, deterministic in (params, key).

    The wavelength tag defaults to a placeholder; the mask itself is
    wavelength-agnostic and callers retag it per arm before propagating.
    """
    g = correlated_unit_field(params, key)
    g *= _plan(params).envelope
    return ComplexField._trusted(g, params.grid.pitch, wavelength, plane_label)


def _coord_to_index(u, n: int, pitch: float) -> tuple[int, int]:
    ux, uy = (float(u[0]), float(u[1])) if np.ndim(u) else (float(u), 0.0)
    ix = int(round(ux / pitch)) + n // 2
    iy = int(round(uy / pitch)) + n // 2
    if not (0 <= ix < n and 0 <= iy < n):
        raise InvalidParamsError(f"coordinate {u!r} falls outside the grid")
    return ix, iy


def estimate_correlation(fields, u1, u2) -> complex:
    """Sample mean of V(u1) * conj(V(u2)) over a field ensemble.

    Coordinates are (x, y) in meters (a bare scalar means on-axis x). Needs at
    least two fields.
    """
    fields = list(fields)
    if len(fields) < 2:
        raise InsufficientSamplesError("correlation estimate needs >= 2 fields")
    first = fields[0]
    n = first.samples.shape[0]
    pitch = first.pitch
    i1 = _coord_to_index(u1, n, pitch)
    i2 = _coord_to_index(u2, n, pitch)
    total = 0.0 + 0.0j
    for f in fields:
        if f.samples.shape[0] != n or f.pitch != pitch:
            raise ShapeMismatchError("all fields must share one grid")
        total += f.samples[i1] * np.conj(f.samples[i2])
    return complex(total / len(fields))
