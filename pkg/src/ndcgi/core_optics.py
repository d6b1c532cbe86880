"""Sampled complex optical fields and scalar diffraction between planes.

Propagation uses the band-limited angular-spectrum method: it preserves the
grid pitch (so signal and reference planes stay pixel-aligned for
correlation), is unitary on the retained band, and rejects distances the grid
cannot support instead of aliasing silently.
"""

from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import (
    InvalidFieldError,
    InvalidParamsError,
    SamplingCriterionError,
    ShapeMismatchError,
)

# Fraction of the Nyquist band that must survive the anti-alias limit for a
# propagation to be considered resolvable on the grid.
MIN_BAND_FRACTION = 1.0 / 8.0


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Square sampling grid: n samples per side, pitch meters per sample."""

    n: int
    pitch: float

    def __post_init__(self) -> None:
        if not _is_power_of_two(int(self.n)):
            raise InvalidParamsError("grid side must be a power of two, >= 2")
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise InvalidParamsError("grid pitch must be positive and finite")

    @property
    def extent(self) -> float:
        return self.n * self.pitch

    def coords(self) -> np.ndarray:
        """Physical coordinates of sample centers: (i - n/2) * pitch."""
        return (np.arange(self.n) - self.n // 2) * self.pitch

    def frequencies(self) -> np.ndarray:
        """Spatial frequencies in FFT layout, cycles per meter."""
        return sfft.fftfreq(self.n, self.pitch)


def _validate_square_finite(samples: np.ndarray, what: str) -> np.ndarray:
    arr = np.asarray(samples)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidFieldError(f"{what} must be a square 2-D array")
    if not _is_power_of_two(arr.shape[0]):
        raise InvalidFieldError(f"{what} side must be a power of two, >= 2")
    if not np.all(np.isfinite(arr)):
        raise InvalidFieldError(f"{what} contains non-finite samples")
    return arr


@dataclass
class ComplexField:
    """Complex amplitude samples on a square grid, tagged with a wavelength."""

    samples: np.ndarray
    pitch: float
    wavelength: float
    plane_label: str = ""

    def __post_init__(self) -> None:
        arr = _validate_square_finite(self.samples, "field")
        self.samples = np.ascontiguousarray(arr, dtype=np.complex128)
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise InvalidFieldError("pitch must be positive and finite")
        if not (self.wavelength > 0 and np.isfinite(self.wavelength)):
            raise InvalidFieldError("wavelength must be positive and finite")

    @classmethod
    def _trusted(cls, samples: np.ndarray, pitch: float, wavelength: float,
                 plane_label: str = "") -> "ComplexField":
        # internal fast path: caller guarantees the invariants
        out = object.__new__(cls)
        out.samples = samples
        out.pitch = pitch
        out.wavelength = wavelength
        out.plane_label = plane_label
        return out

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.samples.shape[0], self.pitch)

    def retagged(self, wavelength: float | None = None,
                 plane_label: str | None = None) -> "ComplexField":
        """Same samples, new wavelength tag and/or label."""
        return ComplexField(
            self.samples,
            self.pitch,
            self.wavelength if wavelength is None else wavelength,
            self.plane_label if plane_label is None else plane_label,
        )

    def power(self) -> float:
        """Total power: sum |E|^2 * pitch^2."""
        s = self.samples
        return float(np.sum(s.real * s.real + s.imag * s.imag)) * self.pitch ** 2


@dataclass
class Aperture:
    """Complex transmission mask, magnitude at most 1."""

    samples: np.ndarray
    pitch: float

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidFieldError("aperture must be a square 2-D array")
        if not np.all(np.isfinite(arr)):
            raise InvalidFieldError("aperture contains non-finite samples")
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
        mags = np.abs(arr)
        if mags.max(initial=0.0) > 1.0 + 1e-12:
            raise InvalidFieldError("aperture transmission magnitude exceeds 1")
        self.samples = arr
        if not (self.pitch > 0 and np.isfinite(self.pitch)):
            raise InvalidFieldError("pitch must be positive and finite")


class _TransferKernel:
    """Precomputed angular-spectrum transfer data for one (grid, λ, z)."""

    __slots__ = ("kernel", "band", "band_is_full")

    def __init__(self, kernel: np.ndarray, band: np.ndarray, band_is_full: bool):
        self.kernel = kernel
        self.band = band
        self.band_is_full = band_is_full


_KERNEL_CACHE: "OrderedDict[tuple, _TransferKernel]" = OrderedDict()
_KERNEL_CACHE_MAX = 8


def band_limit_frequency(wavelength: float, distance: float, extent: float) -> float:
    """Largest alias-free spatial frequency for this propagation geometry."""
    return 1.0 / (wavelength * np.hypot(2.0 * distance / extent, 1.0))


def _check_sampling(n: int, pitch: float, wavelength: float, distance: float) -> float:
    f_nyquist = 0.5 / pitch
    f_lim = band_limit_frequency(wavelength, distance, n * pitch)
    if f_lim < MIN_BAND_FRACTION * f_nyquist:
        raise SamplingCriterionError(
            f"distance {distance:g} m retains under {MIN_BAND_FRACTION:.3g} of the "
            f"grid bandwidth at wavelength {wavelength:g} m; enlarge the grid side "
            f"(n={n}) or the pitch ({pitch:g} m) to support this propagation"
        )
    return f_lim


def _transfer(n: int, pitch: float, wavelength: float, distance: float) -> _TransferKernel:
    key = (n, float(pitch), float(wavelength), float(distance))
    cached = _KERNEL_CACHE.get(key)
    if cached is not None:
        _KERNEL_CACHE.move_to_end(key)
        return cached

    f_lim = _check_sampling(n, pitch, wavelength, distance)
    f = sfft.fftfreq(n, pitch)
    fx = f[:, None]
    fy = f[None, :]
    f2 = fx * fx + fy * fy
    arg = 1.0 / wavelength ** 2 - f2
    band = (np.abs(fx) <= f_lim) & (np.abs(fy) <= f_lim) & (arg > 0)

    kernel = np.zeros((n, n), dtype=np.complex128)
    kz = 2.0 * np.pi * distance * np.sqrt(arg[band])
    kernel[band] = np.exp(1j * kz)

    entry = _TransferKernel(kernel, band, bool(band.all()))
    _KERNEL_CACHE[key] = entry
    if len(_KERNEL_CACHE) > _KERNEL_CACHE_MAX:
        _KERNEL_CACHE.popitem(last=False)
    return entry


def propagate(field: ComplexField, distance: float) -> ComplexField:
    """Propagate a field by `distance` meters at its tagged wavelength.

    Raises SamplingCriterionError when the grid cannot support the requested
    distance. distance = 0 returns an identical copy.
    """
    if not isinstance(field, ComplexField):
        raise InvalidFieldError("propagate expects a ComplexField")
    if not (distance >= 0 and np.isfinite(distance)):
        raise InvalidParamsError("propagation distance must be finite and >= 0")
    if distance == 0:
        return ComplexField._trusted(
            field.samples.copy(), field.pitch, field.wavelength, field.plane_label
        )
    n = field.samples.shape[0]
    tk = _transfer(n, field.pitch, field.wavelength, distance)
    spectrum = sfft.fft2(field.samples)
    spectrum *= tk.kernel
    out = sfft.ifft2(spectrum, overwrite_x=True)
    return ComplexField._trusted(out, field.pitch, field.wavelength, field.plane_label)


def apply_aperture(field: ComplexField, aperture: Aperture) -> ComplexField:
    """Pointwise transmission mask; output power never exceeds input power."""
    if field.samples.shape != aperture.samples.shape:
        raise ShapeMismatchError("field and aperture grids differ in shape")
    if not np.isclose(field.pitch, aperture.pitch, rtol=1e-12, atol=0.0):
        raise ShapeMismatchError("field and aperture grids differ in pitch")
    return ComplexField._trusted(
        field.samples * aperture.samples, field.pitch, field.wavelength,
        field.plane_label,
    )


def intensity(field: ComplexField) -> np.ndarray:
    """Pointwise |E|^2; nonnegative real map."""
    s = field.samples
    return s.real * s.real + s.imag * s.imag
