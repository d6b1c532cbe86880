"""Closed-form resolution theory for two-color ghost imaging.

The reconstructed image of a point object is a Gaussian kernel whose 1/e
half-width w_psf follows from a chain of nested Gaussian integrals over the
source, object, and reference planes. Each integral contributes one complex
quadratic coefficient (a, b, c, d) and one kernel weight (k1..k4); the width
is Re(sqrt(1/(2*sum(k_i^2)))). A turbulent medium with coherence length rho
adds 1/(2 rho^2) couplings to the chain; as rho -> infinity every coefficient
must reduce exactly to its vacuum form, which pins down the algebra below.
"""

import cmath
import math
from dataclasses import dataclass, replace

from .errors import DegenerateWidthError, InvalidParamsError, NonConvergentError
from .turbulence import TurbulenceSpec, coherence_length

SWEEP_AXES = ("lambda_r", "lambda_s", "z3", "cn2")


@dataclass(frozen=True)
class GeometryParams:
    """Arm wavelengths and distances plus the source statistics.

    lambda_s / z1 / z2: signal arm wavelength, source-to-object and
    object-to-bucket distances. lambda_r / z3: reference arm wavelength and
    computed propagation distance. omega: beam size; l_c: speckle correlation
    length.
    """

    lambda_s: float
    lambda_r: float
    z1: float
    z2: float
    z3: float
    omega: float
    l_c: float

    def __post_init__(self) -> None:
        for name in ("lambda_s", "lambda_r", "z1", "z2", "z3", "omega", "l_c"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise InvalidParamsError(f"{name} must be positive and finite")


@dataclass(frozen=True)
class PsfCoefficients:
    """Quadratic coefficients and kernel weights of the Gaussian chain."""

    a: complex
    b: complex
    c: complex
    d: complex
    k1: complex
    k2: complex
    k3: complex
    k4: complex


@dataclass(frozen=True)
class PsfReport:
    """Width, field of view, magnification, and the underlying coefficients."""

    w_psf: float
    w_fov: float
    magnification: float
    coefficients: PsfCoefficients
    turbulent: bool


def matched_reference_distance(lambda_s: float, z1: float, lambda_r: float) -> float:
    """Reference distance that minimizes the PSF width: lambda_s*z1/lambda_r."""
    if not (lambda_s > 0 and z1 > 0 and lambda_r > 0):
        raise InvalidParamsError("wavelengths and distance must be positive")
    return lambda_s * z1 / lambda_r


def _check_convergent(**coeffs: complex) -> None:
    for name, value in coeffs.items():
        if not (value.real > 0 and math.isfinite(value.real)
                and math.isfinite(value.imag)):
            raise NonConvergentError(
                f"coefficient {name} has nonpositive or non-finite real part "
                f"({value!r}); the Gaussian reduction does not converge"
            )


def vacuum_coefficients(g: GeometryParams) -> PsfCoefficients:
    """Coefficient chain for propagation through vacuum."""
    base = 1.0 / (4.0 * g.omega ** 2) + 1.0 / (2.0 * g.l_c ** 2)
    beta_s = math.pi / (g.lambda_s * g.z1)
    beta_r = math.pi / (g.lambda_r * g.z3)
    lc2 = g.l_c ** 2
    lc4 = lc2 * lc2

    a = complex(base, -beta_s)
    b = complex(base, +beta_s)
    _check_convergent(a=a, b=b)
    c = base - 1j * beta_r - 1.0 / (4.0 * b * lc4)
    d = base + 1j * beta_r - 1.0 / (4.0 * a * lc4)
    _check_convergent(c=c, d=d)

    denom = g.lambda_s * g.z1
    k1 = math.pi / (cmath.sqrt(a) * denom)
    k2 = math.pi / (cmath.sqrt(b) * denom)
    k3 = math.pi / (2.0 * b * cmath.sqrt(c) * denom * lc2)
    k4 = math.pi / (2.0 * cmath.sqrt(d) * denom) * (1.0 / (b * lc2) - 1.0 / (a * lc2))
    return PsfCoefficients(a, b, c, d, k1, k2, k3, k4)


def turbulent_coefficients(g: GeometryParams, rho: float) -> PsfCoefficients:
    """Coefficient chain with a turbulent signal path of coherence length rho.

    rho = +inf is the vacuum sentinel and returns the vacuum chain exactly.
    The l_c exponents and the k4 bracket are constrained by that limit: every
    rho-dependent term must vanish as rho -> inf, leaving the vacuum values.
    """
    if rho is None or math.isinf(rho):
        return vacuum_coefficients(g)
    if not (rho > 0):
        raise InvalidParamsError("rho must be positive or the vacuum sentinel")

    base = 1.0 / (4.0 * g.omega ** 2) + 1.0 / (2.0 * g.l_c ** 2)
    beta_s = math.pi / (g.lambda_s * g.z1)
    beta_r = math.pi / (g.lambda_r * g.z3)
    lc2 = g.l_c ** 2
    lc4 = lc2 * lc2
    rho2 = rho * rho
    rho4 = rho2 * rho2
    turb = 1.0 / (2.0 * rho2)

    a = complex(base + turb, -beta_s)
    _check_convergent(a=a)
    b = base + turb + 1j * beta_s - 1.0 / (4.0 * a * rho4)
    _check_convergent(b=b)
    c = base + turb - 1j * beta_r - 1.0 / (4.0 * b * lc4)
    _check_convergent(c=c)
    d = (base + 1j * beta_r
         - 1.0 / (4.0 * a * lc4)
         - 1.0 / (16.0 * a * a * b * lc4 * rho4)
         - 1.0 / (64.0 * a * a * b * b * c * lc4 * lc4 * rho4))
    _check_convergent(d=d)

    x = 1.0 / (2.0 * a * rho2)
    y = 1.0 / (8.0 * a * b * c * lc4 * rho2)
    denom = g.lambda_s * g.z1
    k1 = math.pi / (cmath.sqrt(a) * denom)
    k2 = math.pi / (cmath.sqrt(b) * denom) * (1.0 - x)
    k3 = math.pi / (2.0 * b * cmath.sqrt(c) * denom * lc2) * (1.0 - x)
    # bracket reduces to (1/(b lc2) - 1/(a lc2)) at x = y = 0, matching vacuum
    k4 = math.pi / (2.0 * cmath.sqrt(d) * denom) * (
        -1.0 / (a * lc2) + (1.0 / (b * lc2)) * (1.0 - x) * (1.0 + x + y)
    )
    return PsfCoefficients(a, b, c, d, k1, k2, k3, k4)


def psf_width(coeffs: PsfCoefficients) -> float:
    """1/e half-width of the Gaussian point response."""
    s = (coeffs.k1 ** 2 + coeffs.k2 ** 2 + coeffs.k3 ** 2 + coeffs.k4 ** 2)
    if s == 0:
        raise DegenerateWidthError("kernel weights sum to zero; width undefined")
    w = cmath.sqrt(1.0 / (2.0 * s)).real
    if not (w > 0 and math.isfinite(w)):
        raise DegenerateWidthError(f"width evaluation degenerate (got {w!r})")
    return w


def _field_of_view(g: GeometryParams, coeffs: PsfCoefficients) -> float:
    # 1/e half-width of the object-plane visibility envelope implied by the
    # same Gaussian bookkeeping (sigma is the source-side real curvature)
    sigma = coeffs.a.real
    beta = math.pi / (g.lambda_s * g.z1)
    return (g.lambda_s * g.z1 / (2.0 * math.pi)) * math.sqrt(
        (sigma * sigma + beta * beta) / sigma
    )


def _magnification(g: GeometryParams) -> float:
    # image-to-object coordinate scaling of the reconstruction kernel;
    # exactly -1 at the matched reference distance
    return -(g.lambda_r * g.z3) / (g.lambda_s * g.z1)


def psf_report(g: GeometryParams, turb: TurbulenceSpec | None = None) -> PsfReport:
    """Bundle width, field of view, magnification, and coefficients.

    Vacuum branch when turb is absent or its cn2 is zero.
    """
    if turb is None or turb.is_vacuum:
        coeffs = vacuum_coefficients(g)
        turbulent = False
    else:
        coeffs = turbulent_coefficients(g, coherence_length(turb))
        turbulent = True
    return PsfReport(
        w_psf=psf_width(coeffs),
        w_fov=_field_of_view(g, coeffs),
        magnification=_magnification(g),
        coefficients=coeffs,
        turbulent=turbulent,
    )


def sweep(template: GeometryParams, axis: str, values,
          turb: TurbulenceSpec | None = None,
          rematch: bool = True) -> list[tuple[float, PsfReport]]:
    """One PsfReport per value along the chosen axis.

    Wavelength sweeps re-match z3 per value unless rematch is False. A cn2
    sweep derives per-value turbulence specs from the template's signal arm
    (or from `turb` when given).
    """
    if axis not in SWEEP_AXES:
        raise InvalidParamsError(f"unknown sweep axis {axis!r}; one of {SWEEP_AXES}")
    values = [float(v) for v in values]
    if not values:
        raise InvalidParamsError("sweep needs at least one value")

    rows: list[tuple[float, PsfReport]] = []
    for v in values:
        g = template
        turb_v = turb
        if axis == "lambda_r":
            z3 = matched_reference_distance(g.lambda_s, g.z1, v) if rematch else g.z3
            g = replace(g, lambda_r=v, z3=z3)
        elif axis == "lambda_s":
            z3 = matched_reference_distance(v, g.z1, g.lambda_r) if rematch else g.z3
            g = replace(g, lambda_s=v, z3=z3)
            if turb is not None and not turb.is_vacuum:
                turb_v = TurbulenceSpec(turb.cn2, turb.path_length, v)
        elif axis == "z3":
            g = replace(g, z3=v)
        else:  # cn2
            path = turb.path_length if turb is not None else template.z1
            turb_v = TurbulenceSpec(v, path, template.lambda_s)
        rows.append((v, psf_report(g, turb_v)))
    return rows
