"""Acceptance suite: ten numbered criteria covering the analytic theory, the
statistical generators, the propagator, and the Monte Carlo pipeline.

Each criterion returns a CriterionResult with the measured quantity and its
tolerance so reports can show numbers, not just verdicts. Criteria 1-5 are
closed-form and run in milliseconds; 6, 7, 9, 10 are Monte Carlo runs sized
to finish inside their stated budgets on one desktop core.
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .core_optics import ComplexField, GridSpec, intensity, propagate
from .ghost_pipeline import (
    ExperimentConfig,
    estimate_psf_width,
    pinhole_aperture,
    run_experiment,
    simulate_realization,
)
from .psf_analytic import (
    GeometryParams,
    matched_reference_distance,
    psf_report,
    psf_width,
    sweep,
    turbulent_coefficients,
    vacuum_coefficients,
)
from .speckle import SpeckleParams, generate_slm_field
from .rng import RealizationKey
from .turbulence import TurbulenceSpec, coherence_length


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    tolerance: str
    runtime_s: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} criterion {self.number:2d} [{self.name}] "
                f"measured {self.measured}; tolerance {self.tolerance}; "
                f"{self.runtime_s:.1f}s")


# the kilometer-scale wide-beam configuration used by criteria 1-5
_KM_LAMBDA_S = 800e-9
_KM_Z1 = 1000.0
_KM_OMEGA = 0.05
_KM_LC = 1e-3
_KM_LAMBDA_R_LIST = (400e-9, 600e-9, 800e-9, 1000e-9, 1200e-9, 1400e-9)
_KM_LAMBDA_S_LIST = _KM_LAMBDA_R_LIST


def _km_template(lambda_s: float = _KM_LAMBDA_S,
                 lambda_r: float = 800e-9) -> GeometryParams:
    z3 = matched_reference_distance(lambda_s, _KM_Z1, lambda_r)
    return GeometryParams(lambda_s, lambda_r, _KM_Z1, 1.0, z3, _KM_OMEGA, _KM_LC)


def _sweep_minima_curve(lambda_r: float):
    matched = matched_reference_distance(_KM_LAMBDA_S, _KM_Z1, lambda_r)
    values = np.linspace(0.25 * matched, 4.0 * matched, 401)
    rows = sweep(_km_template(lambda_r=lambda_r), "z3", values)
    widths = np.array([r.w_psf for _, r in rows])
    return widths, int(np.argmin(widths))


_MATCHED_STEP_INDEX = 80  # (1 - 0.25) / 3.75 * 400


def criterion_1() -> CriterionResult:
    """Matched-distance minimum of the reference sweep, per reference color."""
    t0 = time.perf_counter()
    deviations = []
    for lambda_r in _KM_LAMBDA_R_LIST:
        _, argmin = _sweep_minima_curve(lambda_r)
        deviations.append(abs(argmin - _MATCHED_STEP_INDEX))
    worst = max(deviations)
    return CriterionResult(
        1, "matched-distance minimum", worst <= 1,
        f"max |argmin - {_MATCHED_STEP_INDEX}| = {worst} steps",
        "<= 1 step", time.perf_counter() - t0,
    )


def criterion_2() -> CriterionResult:
    """All six reference-wavelength minima coincide."""
    t0 = time.perf_counter()
    minima = []
    for lambda_r in _KM_LAMBDA_R_LIST:
        widths, _ = _sweep_minima_curve(lambda_r)
        minima.append(widths.min())
    minima = np.array(minima)
    spread = float((minima.max() - minima.min()) / minima.mean())
    return CriterionResult(
        2, "minima equality across reference colors", spread <= 0.02,
        f"relative spread {spread:.3e}", "<= 2%",
        time.perf_counter() - t0,
    )


def criterion_3() -> CriterionResult:
    """Width is set by the signal color, not the reference color, at match."""
    t0 = time.perf_counter()
    rows_s = sweep(_km_template(), "lambda_s", _KM_LAMBDA_S_LIST)
    ws = np.array([r.w_psf for _, r in rows_s])
    var_s = float((ws.max() - ws.min()) / ws.min())
    rows_r = sweep(_km_template(), "lambda_r", _KM_LAMBDA_R_LIST)
    wr = np.array([r.w_psf for _, r in rows_r])
    var_r = float((wr.max() - wr.min()) / wr.min())
    passed = var_s > 0.20 and var_r < 0.02
    return CriterionResult(
        3, "signal-wavelength dominance", passed,
        f"signal-color variation {var_s:.3f}, reference-color {var_r:.3e}",
        "> 20% and < 2%", time.perf_counter() - t0,
    )


_CN2_LIST = (1e-15, 1e-14, 1e-13, 1e-12)


def _turbulent_widths_over_lambda_s(cn2: float) -> np.ndarray:
    turb = TurbulenceSpec(cn2, _KM_Z1, _KM_LAMBDA_S)
    rows = sweep(_km_template(), "lambda_s", _KM_LAMBDA_S_LIST, turb=turb)
    return np.array([r.w_psf for _, r in rows])


def criterion_4() -> CriterionResult:
    """Turbulence reverses the wavelength ordering; blur grows with cn2."""
    t0 = time.perf_counter()
    weak = _turbulent_widths_over_lambda_s(1e-15)
    strong = _turbulent_widths_over_lambda_s(1e-12)
    increasing = bool(np.all(np.diff(weak) > 0))
    decreasing = bool(np.all(np.diff(strong) < 0))
    minima = np.array([
        _turbulent_widths_over_lambda_s(cn2).min() for cn2 in _CN2_LIST
    ])
    nondecreasing = bool(np.all(np.diff(minima) >= 0))
    passed = increasing and decreasing and nondecreasing
    return CriterionResult(
        4, "turbulence crossover", passed,
        f"weak ordering increasing={increasing}, "
        f"strong decreasing={decreasing}, minima nondecreasing={nondecreasing}",
        "all three orderings hold", time.perf_counter() - t0,
    )


def criterion_5() -> CriterionResult:
    """Negligible turbulence reduces to vacuum; the sentinel reduces exactly."""
    t0 = time.perf_counter()
    g = _km_template()
    vac = vacuum_coefficients(g)

    def rel_diffs(coeffs):
        pairs = [(coeffs.a, vac.a), (coeffs.b, vac.b), (coeffs.c, vac.c),
                 (coeffs.d, vac.d), (coeffs.k1, vac.k1), (coeffs.k2, vac.k2),
                 (coeffs.k3, vac.k3), (coeffs.k4, vac.k4),
                 (psf_width(coeffs), psf_width(vac))]
        return max(abs(x - y) / abs(y) for x, y in pairs)

    tiny = TurbulenceSpec(1e-25, _KM_Z1, _KM_LAMBDA_S)
    err_tiny = rel_diffs(turbulent_coefficients(g, coherence_length(tiny)))
    err_sentinel = rel_diffs(turbulent_coefficients(g, math.inf))
    passed = err_tiny <= 1e-6 and err_sentinel <= 1e-12
    return CriterionResult(
        5, "vacuum reduction", passed,
        f"cn2=1e-25 max rel dev {err_tiny:.3e}, sentinel {err_sentinel:.3e}",
        "<= 1e-6 and <= 1e-12", time.perf_counter() - t0,
    )


def desk_config(realizations: int = 5000, master_seed: int = 7) -> ExperimentConfig:
    """The benchtop-scale profile used for analytic/Monte Carlo consistency."""
    grid = GridSpec(1024, 12e-6)
    lambda_s, lambda_r = 532e-9, 635e-9
    z1, z2 = 0.5, 0.25
    z3 = matched_reference_distance(lambda_s, z1, lambda_r)
    geometry = GeometryParams(lambda_s, lambda_r, z1, z2, z3, 2e-3, 50e-6)
    speckle = SpeckleParams(2e-3, 50e-6, grid)
    hole = pinhole_aperture(grid, 2 * grid.pitch)
    return ExperimentConfig(geometry, speckle, hole, realizations, master_seed,
                            turbulence=None, rough_surface=True)


def criterion_6() -> CriterionResult:
    """Monte Carlo width of a rough pinhole matches the closed form."""
    t0 = time.perf_counter()
    config = desk_config()
    predicted = psf_report(config.geometry).w_psf
    image = run_experiment(config)
    measured = estimate_psf_width(image, config.object_mask, crop_halfwidth=16)
    ratio = measured / predicted
    return CriterionResult(
        6, "analytic vs Monte Carlo width", abs(ratio - 1.0) <= 0.20,
        f"{measured:.4e} m vs analytic {predicted:.4e} m "
        f"(ratio {ratio:.3f})", "within 20%", time.perf_counter() - t0,
    )


def criterion_7(master_seed: int = 11, ensemble: int = 10_000) -> CriterionResult:
    """Empirical speckle correlation matches the Gaussian model."""
    t0 = time.perf_counter()
    grid = GridSpec(128, 50e-6)
    omega, l_c = 1e-3, 200e-6
    params = SpeckleParams(omega, l_c, grid)
    seps_px = (0, 2, 4, 8)

    u = grid.coords()
    env = np.exp(-(u[:, None] ** 2 + u[None, :] ** 2) / (4.0 * omega ** 2))
    half = int(round(omega / grid.pitch))
    lo, hi = grid.n // 2 - half, grid.n // 2 + half
    inv_env = {
        d: 1.0 / (env[lo:hi - d, lo:hi] * env[lo + d:hi, lo:hi])
        for d in seps_px
    }
    sums = {d: 0.0 + 0.0j for d in seps_px}
    counts = {d: (hi - lo - d) * (hi - lo) for d in seps_px}
    for index in range(ensemble):
        v = generate_slm_field(params, RealizationKey(master_seed, index)).samples
        for d in seps_px:
            prod = v[lo:hi - d, lo:hi] * np.conj(v[lo + d:hi, lo:hi])
            sums[d] += np.sum(prod * inv_env[d])

    worst = 0.0
    details = []
    for d in seps_px:
        est = (sums[d] / (ensemble * counts[d])).real
        target = math.exp(-(d * grid.pitch) ** 2 / (2.0 * l_c ** 2))
        rel = abs(est - target) / target
        worst = max(worst, rel)
        details.append(f"{d}px:{rel:.3f}")
    return CriterionResult(
        7, "speckle correlation statistics", worst <= 0.05,
        f"max rel dev {worst:.3f} ({', '.join(details)})", "<= 5%",
        time.perf_counter() - t0,
    )


def criterion_8(random_fields: int = 100) -> CriterionResult:
    """Propagation oracle: beam spreading law and unitarity."""
    t0 = time.perf_counter()
    # beam radius after one Rayleigh distance
    waist = 0.5e-3
    wavelength = 532e-9
    grid = GridSpec(512, 30e-6)
    u = grid.coords()
    r2 = u[:, None] ** 2 + u[None, :] ** 2
    beam = ComplexField(np.exp(-r2 / waist ** 2).astype(np.complex128),
                        grid.pitch, wavelength, "waist")
    rayleigh = math.pi * waist ** 2 / wavelength
    out = propagate(beam, rayleigh)
    profile = intensity(out)
    mean_r2 = float((r2 * profile).sum() / profile.sum())
    measured_radius = math.sqrt(2.0 * mean_r2)
    radius_err = abs(measured_radius / (waist * math.sqrt(2.0)) - 1.0)

    # unitarity on arbitrary pixel noise, at a distance nothing is truncated
    pgrid = GridSpec(256, 20e-6)
    rng = np.random.default_rng(2024)
    worst_power = 0.0
    for _ in range(random_fields):
        samples = (rng.standard_normal((256, 256))
                   + 1j * rng.standard_normal((256, 256)))
        f = ComplexField(samples, pgrid.pitch, wavelength, "noise")
        p0 = f.power()
        p1 = propagate(f, 0.1).power()
        worst_power = max(worst_power, abs(p1 - p0) / p0)
    passed = radius_err <= 1e-3 and worst_power <= 1e-10
    return CriterionResult(
        8, "propagation oracle", passed,
        f"radius rel err {radius_err:.2e}; worst power dev {worst_power:.2e} "
        f"({random_fields} fields)", "<= 1e-3 and <= 1e-10",
        time.perf_counter() - t0,
    )


def _strong_turbulence_config(lambda_s: float, master_seed: int,
                              realizations: int,
                              cn2: float | None = None) -> ExperimentConfig:
    grid = GridSpec(256, 24e-6)
    omega, l_c = 1e-3, 130e-6
    z1 = z2 = 0.5
    lambda_r = 635e-9
    z3 = matched_reference_distance(lambda_s, z1, lambda_r)
    if cn2 is None:
        # structure constant pinned so the 532 nm coherence length is 2 * l_c
        k532 = 2.0 * math.pi / 532e-9
        cn2 = (2.0 * l_c) ** (-5.0 / 3.0) / (0.55 * k532 * k532 * z1)
    geometry = GeometryParams(lambda_s, lambda_r, z1, z2, z3, omega, l_c)
    speckle = SpeckleParams(omega, l_c, grid)
    hole = pinhole_aperture(grid, 1.5 * grid.pitch)
    return ExperimentConfig(geometry, speckle, hole, realizations, master_seed,
                            turbulence=TurbulenceSpec(cn2, z1, lambda_s),
                            rough_surface=True)


def criterion_9(realizations: int = 30, master_seed: int = 5) -> CriterionResult:
    """Reference maps are bitwise independent of the turbulence setting."""
    t0 = time.perf_counter()
    vacuum_cfg = _strong_turbulence_config(532e-9, master_seed, realizations,
                                           cn2=0.0)
    turbid_cfg = _strong_turbulence_config(532e-9, master_seed, realizations,
                                           cn2=1e-12)
    identical = 0
    for index in range(realizations):
        _, ref_a = simulate_realization(vacuum_cfg, index)
        _, ref_b = simulate_realization(turbid_cfg, index)
        identical += int(np.array_equal(ref_a, ref_b))
    passed = identical == realizations
    return CriterionResult(
        9, "reference-arm turbulence independence", passed,
        f"{identical}/{realizations} per-realization maps bitwise identical",
        "all identical", time.perf_counter() - t0,
    )


def criterion_10(realizations: int = 6000, repetitions: int = 5) -> CriterionResult:
    """In strong turbulence the longer signal wavelength resolves better."""
    t0 = time.perf_counter()
    wins = 0
    ratios = []
    for rep in range(repetitions):
        seed = 1000 + rep
        widths = {}
        for lambda_s in (532e-9, 635e-9):
            config = _strong_turbulence_config(lambda_s, seed, realizations)
            image = run_experiment(config)
            widths[lambda_s] = estimate_psf_width(
                image, config.object_mask, crop_halfwidth=32
            )
        ratios.append(widths[635e-9] / widths[532e-9])
        wins += int(widths[635e-9] < widths[532e-9])
    needed = repetitions - 1
    return CriterionResult(
        10, "strong-turbulence wavelength ordering", wins >= needed,
        f"width(635) < width(532) in {wins}/{repetitions} repetitions "
        f"(ratios {', '.join(f'{r:.3f}' for r in ratios)})",
        f">= {needed}/{repetitions}", time.perf_counter() - t0,
    )


QUICK_CRITERIA = (1, 2, 3, 4, 5, 8)
ALL_CRITERIA = tuple(range(1, 11))


def run_criterion(number: int, quick: bool = False) -> CriterionResult:
    if number == 8:
        return criterion_8(random_fields=10 if quick else 100)
    table = {
        1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
        5: criterion_5, 6: criterion_6, 7: criterion_7,
        9: criterion_9, 10: criterion_10,
    }
    return table[number]()


def run_suite(level: str) -> list[CriterionResult]:
    """Run the quick (analytic) or full (Monte Carlo included) suite."""
    if level == "quick":
        return [run_criterion(n, quick=True) for n in QUICK_CRITERIA]
    if level == "full":
        return [run_criterion(n) for n in ALL_CRITERIA]
    raise ValueError(f"unknown validation level {level!r}; use quick or full")
