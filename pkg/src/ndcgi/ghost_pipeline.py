"""Monte Carlo ghost imaging: per-realization simulation and covariance.

Per realization: one speckle mask illuminates the object through the signal
arm (optionally through two turbulence screens) and lands on a bucket
detector; the same mask is numerically propagated through the reference arm
in vacuum at its own wavelength. The image is the covariance of the bucket
value with the reference intensity map over realizations.

The per-realization path is fused for speed (shared forward transform of the
mask, in-band Parseval bucket, sparse object support), but it is numerically
the composition of the public module operations; tests assert that
equivalence.
"""

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .core_optics import Aperture, ComplexField, GridSpec, _transfer
from .errors import (
    InsufficientSamplesError,
    InvalidParamsError,
    ShapeMismatchError,
    WidthEstimateError,
)
from .psf_analytic import GeometryParams
from .rng import (
    RealizationKey,
    STREAM_OBJECT_ROUGHNESS,
    stream_generator,
)
from .speckle import SpeckleParams, _plan as _speckle_plan, correlated_unit_field
from .turbulence import TurbulenceSpec, generate_phase_screen_pair

CHUNK_SIZE = 64

_MAX_SEED = 2 ** 64


def uniform_aperture(grid: GridSpec, value: float = 1.0) -> Aperture:
    """Constant transmission mask."""
    return Aperture(np.full((grid.n, grid.n), value, dtype=np.complex128), grid.pitch)


def pinhole_aperture(grid: GridSpec, radius: float) -> Aperture:
    """Centered circular opening of the given radius in meters."""
    if not (radius > 0):
        raise InvalidParamsError("pinhole radius must be positive")
    u = grid.coords()
    u2 = u[:, None] ** 2 + u[None, :] ** 2
    samples = (u2 <= radius * radius).astype(np.complex128)
    if not samples.any():
        raise InvalidParamsError("pinhole radius is below the grid resolution")
    return Aperture(samples, grid.pitch)


def double_slit_aperture(grid: GridSpec, slit_width: float,
                         separation: float) -> Aperture:
    """Two parallel slits, centers `separation` apart along the first axis."""
    if not (slit_width > 0 and separation > slit_width):
        raise InvalidParamsError("need slit_width > 0 and separation > slit_width")
    x = grid.coords()
    in_slit = (np.abs(x - separation / 2) <= slit_width / 2) | (
        np.abs(x + separation / 2) <= slit_width / 2
    )
    samples = np.repeat(in_slit[:, None], grid.n, axis=1).astype(np.complex128)
    return Aperture(samples, grid.pitch)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a reproducible ghost imaging run needs."""

    geometry: GeometryParams
    speckle: SpeckleParams
    object_mask: Aperture
    realizations: int
    master_seed: int
    turbulence: TurbulenceSpec | None = None
    rough_surface: bool = False

    def __post_init__(self) -> None:
        if int(self.realizations) < 2:
            raise InvalidParamsError("covariance needs at least 2 realizations")
        if not (0 <= int(self.master_seed) < _MAX_SEED):
            raise InvalidParamsError("master_seed must fit in 64 unsigned bits")
        grid = self.speckle.grid
        if self.object_mask.samples.shape != (grid.n, grid.n):
            raise ShapeMismatchError("object grid does not match the speckle grid")
        if not math.isclose(self.object_mask.pitch, grid.pitch, rel_tol=1e-12):
            raise ShapeMismatchError("object pitch does not match the speckle grid")
        for name in ("omega", "l_c"):
            if not math.isclose(getattr(self.geometry, name),
                                getattr(self.speckle, name), rel_tol=1e-12):
                raise InvalidParamsError(
                    f"geometry.{name} disagrees with speckle.{name}"
                )

    @property
    def grid(self) -> GridSpec:
        return self.speckle.grid


def config_digest(config: ExperimentConfig) -> str:
    """Deterministic hex digest of the fully resolved configuration."""
    cached = getattr(config, "_digest", None)
    if cached is not None:
        return cached
    g = config.geometry
    t = config.turbulence
    parts = [
        f"lambda_s={g.lambda_s!r}", f"lambda_r={g.lambda_r!r}",
        f"z1={g.z1!r}", f"z2={g.z2!r}", f"z3={g.z3!r}",
        f"omega={g.omega!r}", f"l_c={g.l_c!r}",
        f"grid_n={config.grid.n}", f"pitch={config.grid.pitch!r}",
        f"realizations={int(config.realizations)}",
        f"master_seed={int(config.master_seed)}",
        f"rough_surface={bool(config.rough_surface)}",
        f"cn2={t.cn2!r}" if t is not None else "cn2=none",
        f"turb_path={t.path_length!r}" if t is not None else "turb_path=none",
        f"turb_wl={t.wavelength!r}" if t is not None else "turb_wl=none",
    ]
    h = hashlib.sha256()
    h.update(";".join(parts).encode())
    h.update(np.ascontiguousarray(config.object_mask.samples).tobytes())
    digest = h.hexdigest()
    object.__setattr__(config, "_digest", digest)
    return digest


class _RunPlan:
    """Precomputed kernels, masks, and object support for one configuration."""

    def __init__(self, config: ExperimentConfig):
        g = config.geometry
        grid = config.grid
        n = grid.n
        self.n = n
        self.pitch = grid.pitch
        self.speckle_plan = _speckle_plan(config.speckle)
        # transfer kernels; building them also runs the sampling guard
        self.h_signal = _transfer(n, grid.pitch, g.lambda_s, g.z1)
        self.h_reference = _transfer(n, grid.pitch, g.lambda_r, g.z3)
        self.bucket = _transfer(n, grid.pitch, g.lambda_s, g.z2)

        tsamples = config.object_mask.samples
        self.support = np.flatnonzero(tsamples)
        self.support_values = tsamples.flat[self.support].copy()
        self.turbulence = (
            config.turbulence
            if config.turbulence is not None and not config.turbulence.is_vacuum
            else None
        )
        self.rough = bool(config.rough_surface)
        self.grid = grid
        self.scratch = np.empty((n, n), dtype=np.complex128)


_RUN_PLANS: dict[str, _RunPlan] = {}


def _run_plan(config: ExperimentConfig) -> _RunPlan:
    key = config_digest(config)
    plan = _RUN_PLANS.get(key)
    if plan is None:
        if len(_RUN_PLANS) > 4:
            _RUN_PLANS.clear()
        plan = _RunPlan(config)
        _RUN_PLANS[key] = plan
    return plan


def simulate_realization(config: ExperimentConfig, index: int):
    """One Monte Carlo realization: (bucket value, reference intensity map).

    The reference arm uses the same mask realization but never sees the
    turbulence screens or the object, so its output is identical whether or
    not turbulence is configured.
    """
    if not (0 <= int(index) < int(config.realizations)):
        raise InvalidParamsError("realization index out of range")
    plan = _run_plan(config)
    key = RealizationKey(config.master_seed, int(index))

    mask = correlated_unit_field(config.speckle, key)
    mask *= plan.speckle_plan.envelope
    mask_spectrum = sfft.fft2(mask)

    # signal arm; in vacuum it shares the mask's forward transform
    if plan.turbulence is not None:
        screen1, screen2 = generate_phase_screen_pair(
            plan.turbulence, plan.grid, key
        )
        signal_spectrum = sfft.fft2(mask * np.exp(1j * screen1.phase))
    else:
        screen2 = None
        signal_spectrum = mask_spectrum
    np.multiply(signal_spectrum, plan.h_signal.kernel, out=plan.scratch)
    at_object = sfft.ifft2(plan.scratch)

    vals = at_object.flat[plan.support] * plan.support_values
    if plan.rough:
        rough_rng = stream_generator(key, STREAM_OBJECT_ROUGHNESS)
        vals *= np.exp(1j * rough_rng.uniform(0.0, 2.0 * np.pi, plan.support.size))
    if screen2 is not None:
        vals *= np.exp(1j * screen2.phase.flat[plan.support])

    # bucket = total power after the z2 propagation: the transfer kernel has
    # unit magnitude on its band, so this is the in-band spectral power; with
    # nothing truncated it is just the power at the object plane
    if plan.bucket.band_is_full:
        bucket = float(np.sum(vals.real ** 2 + vals.imag ** 2)) * plan.pitch ** 2
    else:
        out_field = plan.scratch
        out_field[:] = 0
        out_field.flat[plan.support] = vals
        spectrum = sfft.fft2(out_field)
        sq = spectrum.real ** 2 + spectrum.imag ** 2
        bucket = float(np.sum(sq, where=plan.bucket.band))
        bucket *= plan.pitch ** 2 / (plan.n * plan.n)

    # reference arm: the same mask, never the screens or the object
    np.multiply(mask_spectrum, plan.h_reference.kernel, out=plan.scratch)
    ref_field = sfft.ifft2(plan.scratch)
    ref_intensity = ref_field.real ** 2 + ref_field.imag ** 2

    return bucket, ref_intensity


class GhostAccumulator:
    """Streaming covariance sums over realizations, with compensated addition.

    Carries n, sum_b, sum_b2 (bucket moments) and the per-pixel maps sum_i,
    sum_bi. Merging two accumulators adds fields exactly, so chunked or
    parallel accumulation reproduces the sequential result.
    """

    __slots__ = ("n", "sum_b", "sum_b2", "sum_i", "sum_bi", "pitch",
                 "config_digest", "_comp_b", "_comp_b2", "_comp_i", "_comp_bi",
                 "_y", "_t", "_bi")

    def __init__(self, side: int, pitch: float, digest: str = ""):
        self.n = 0
        self.sum_b = 0.0
        self.sum_b2 = 0.0
        self.sum_i = np.zeros((side, side))
        self.sum_bi = np.zeros((side, side))
        self.pitch = pitch
        self.config_digest = digest
        self._comp_b = 0.0
        self._comp_b2 = 0.0
        self._comp_i = np.zeros((side, side))
        self._comp_bi = np.zeros((side, side))
        self._y = np.empty((side, side))
        self._t = np.empty((side, side))
        self._bi = np.empty((side, side))

    @classmethod
    def for_config(cls, config: ExperimentConfig) -> "GhostAccumulator":
        return cls(config.grid.n, config.grid.pitch, config_digest(config))

    def __getstate__(self):
        return {name: getattr(self, name) for name in self.__slots__
                if name not in ("_y", "_t", "_bi")}

    def __setstate__(self, state):
        for name, value in state.items():
            setattr(self, name, value)
        side = self.sum_i.shape[0]
        self._y = np.empty((side, side))
        self._t = np.empty((side, side))
        self._bi = np.empty((side, side))


def _kahan_scalar(total: float, comp: float, value: float) -> tuple[float, float]:
    y = value - comp
    t = total + y
    return t, (t - total) - y


def accumulate(acc: GhostAccumulator, bucket: float,
               reference_intensity: np.ndarray) -> GhostAccumulator:
    """Fold one (bucket, map) sample into the accumulator; returns it."""
    ref = reference_intensity
    if ref.shape != acc.sum_i.shape:
        raise ShapeMismatchError("reference map shape does not match accumulator")
    bucket = float(bucket)
    acc.n += 1
    acc.sum_b, acc._comp_b = _kahan_scalar(acc.sum_b, acc._comp_b, bucket)
    acc.sum_b2, acc._comp_b2 = _kahan_scalar(acc.sum_b2, acc._comp_b2,
                                             bucket * bucket)

    y, t = acc._y, acc._t
    np.subtract(ref, acc._comp_i, out=y)
    np.add(acc.sum_i, y, out=t)
    np.subtract(t, acc.sum_i, out=acc._comp_i)
    np.subtract(acc._comp_i, y, out=acc._comp_i)
    acc.sum_i, acc._t = t, acc.sum_i

    np.multiply(ref, bucket, out=acc._bi)
    y, t = acc._y, acc._t
    np.subtract(acc._bi, acc._comp_bi, out=y)
    np.add(acc.sum_bi, y, out=t)
    np.subtract(t, acc.sum_bi, out=acc._comp_bi)
    np.subtract(acc._comp_bi, y, out=acc._comp_bi)
    acc.sum_bi, acc._t = t, acc.sum_bi
    return acc


def merge(left: GhostAccumulator, right: GhostAccumulator) -> GhostAccumulator:
    """Exact field-wise addition of two accumulators."""
    if left.sum_i.shape != right.sum_i.shape:
        raise ShapeMismatchError("accumulator shapes differ")
    if (left.config_digest and right.config_digest
            and left.config_digest != right.config_digest):
        raise InvalidParamsError("refusing to merge accumulators of different runs")
    out = GhostAccumulator(left.sum_i.shape[0], left.pitch,
                           left.config_digest or right.config_digest)
    out.n = left.n + right.n
    out.sum_b = left.sum_b + right.sum_b
    out.sum_b2 = left.sum_b2 + right.sum_b2
    out._comp_b = left._comp_b + right._comp_b
    out._comp_b2 = left._comp_b2 + right._comp_b2
    np.add(left.sum_i, right.sum_i, out=out.sum_i)
    np.add(left.sum_bi, right.sum_bi, out=out.sum_bi)
    np.add(left._comp_i, right._comp_i, out=out._comp_i)
    np.add(left._comp_bi, right._comp_bi, out=out._comp_bi)
    return out


@dataclass
class GhostImage:
    """Reconstructed covariance image with its provenance metadata."""

    values: np.ndarray
    pitch: float
    config_digest: str
    realizations: int

    def normalized(self) -> np.ndarray:
        """Min-max scaled copy in [0, 1]; flat images come back as zeros."""
        lo = float(self.values.min())
        hi = float(self.values.max())
        if hi <= lo:
            return np.zeros_like(self.values)
        return (self.values - lo) / (hi - lo)


def finalize(acc: GhostAccumulator) -> GhostImage:
    """Covariance image: sum_bi/n - (sum_b/n)(sum_i/n)."""
    if acc.n < 2:
        raise InsufficientSamplesError(
            f"covariance needs >= 2 realizations, got {acc.n}"
        )
    n = acc.n
    values = acc.sum_bi / n - (acc.sum_b / n) * (acc.sum_i / n)
    return GhostImage(values, acc.pitch, acc.config_digest, n)


def _run_chunk(config: ExperimentConfig, start: int, stop: int) -> GhostAccumulator:
    acc = GhostAccumulator.for_config(config)
    for index in range(start, stop):
        bucket, ref = simulate_realization(config, index)
        accumulate(acc, bucket, ref)
    return acc


def run_experiment(config: ExperimentConfig, workers: int = 1,
                   chunk_size: int = CHUNK_SIZE) -> GhostImage:
    """Run all realizations and finalize the image.

    Work is split into fixed chunks accumulated independently and merged in
    index order, so the result is identical for any worker count.
    """
    total = int(config.realizations)
    bounds = [(s, min(s + chunk_size, total)) for s in range(0, total, chunk_size)]
    acc = None
    if workers <= 1 or len(bounds) == 1:
        for s, e in bounds:
            part = _run_chunk(config, s, e)
            acc = part if acc is None else merge(acc, part)
    else:
        with ProcessPoolExecutor(max_workers=int(workers)) as pool:
            futures = [pool.submit(_run_chunk, config, s, e) for s, e in bounds]
            # merge in submission (index) order as results land, so the
            # reduction tree is the same for any worker count
            for future in futures:
                part = future.result()
                acc = part if acc is None else merge(acc, part)
    return finalize(acc)


def range_from_disparity(baseline: float, focal_length: float,
                         disparity: float) -> float:
    """Pinhole stereo range: baseline * focal_length / disparity."""
    if not (disparity > 0):
        raise InvalidParamsError("disparity must be positive")
    if not (baseline > 0 and focal_length > 0):
        raise InvalidParamsError("baseline and focal length must be positive")
    return baseline * focal_length / disparity


def _gaussian_blob(xy, amplitude, x0, y0, sigma, offset):
    x, y = xy
    return (amplitude * np.exp(-((x - x0) ** 2 + (y - y0) ** 2)
                               / (2.0 * sigma ** 2)) + offset).ravel()


def estimate_psf_width(image: GhostImage, ground_truth_object: Aperture,
                       crop_halfwidth: int | None = None) -> float:
    """Gaussian-fit 1/e half-width of a point-like object's reconstruction.

    Crops around the object's centroid, seeds a 2-D Gaussian fit from image
    moments, and returns sqrt(2) times the fitted standard deviation (the 1/e
    half-width). Raises WidthEstimateError when the image is too noisy to
    support a fit, reporting the estimated SNR.
    """
    import warnings

    from scipy.optimize import OptimizeWarning, curve_fit

    values = image.values
    n = values.shape[0]
    weights = np.abs(ground_truth_object.samples) ** 2
    total_w = weights.sum()
    if total_w == 0:
        raise InvalidParamsError("ground-truth object is empty")
    idx = np.arange(n)
    cx = int(round(float((weights.sum(axis=1) * idx).sum() / total_w)))
    cy = int(round(float((weights.sum(axis=0) * idx).sum() / total_w)))

    # noise level from the image border frame, robustly
    frame = max(2, n // 16)
    border = np.concatenate([
        values[:frame, :].ravel(), values[-frame:, :].ravel(),
        values[frame:-frame, :frame].ravel(), values[frame:-frame, -frame:].ravel(),
    ])
    noise = 1.4826 * float(np.median(np.abs(border - np.median(border))))
    peak = float(values.max()) - float(np.median(border))
    snr = peak / noise if noise > 0 else np.inf
    if snr < 3.0:
        raise WidthEstimateError(
            f"image SNR {snr:.2f} is too low for a width fit (need >= 3)"
        )

    if crop_halfwidth is None:
        crop_halfwidth = max(8, n // 16)
    hw = int(min(crop_halfwidth, cx, cy, n - 1 - cx, n - 1 - cy))
    crop = values[cx - hw:cx + hw + 1, cy - hw:cy + hw + 1]
    axis = (np.arange(2 * hw + 1) - hw) * image.pitch
    gx, gy = np.meshgrid(axis, axis, indexing="ij")

    floor = float(np.median(crop))
    positive = np.clip(crop - floor, 0, None)
    mass = positive.sum()
    if mass <= 0:
        raise WidthEstimateError(f"no positive signal in crop (SNR {snr:.2f})")
    mx = float((gx * positive).sum() / mass)
    my = float((gy * positive).sum() / mass)
    spread = math.sqrt(float((((gx - mx) ** 2 + (gy - my) ** 2) * positive).sum()
                             / mass / 2.0))
    try:
        with warnings.catch_warnings():
            # only the parameters are used, not their covariance
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, _ = curve_fit(
                _gaussian_blob, (gx, gy), crop.ravel(),
                p0=(float(crop.max()), mx, my, spread, floor),
                maxfev=20000,
            )
    except RuntimeError as exc:
        raise WidthEstimateError(
            f"width fit did not converge (SNR {snr:.2f}): {exc}"
        ) from exc
    return math.sqrt(2.0) * abs(float(popt[3]))
