"""Closed-form coefficient chain and width formulas.

The numeric constants below were frozen from an independent symbolic/numeric
evaluation of the coefficient chain (done outside this package) before the
implementation existed; they guard against silent algebra regressions.
"""

import numpy as np
import pytest

from ndcgi.errors import (
    DegenerateWidthError,
    InvalidParamsError,
    NonConvergentError,
)
from ndcgi.psf_analytic import (
    GeometryParams,
    PsfCoefficients,
    _check_convergent,
    matched_reference_distance,
    psf_report,
    psf_width,
    sweep,
    turbulent_coefficients,
    vacuum_coefficients,
)
from ndcgi.turbulence import TurbulenceSpec, coherence_length

KM = dict(lambda_s=800e-9, lambda_r=954.84e-9, z1=1000.0, z2=1.0,
          omega=0.05, l_c=1e-3)
DESK = dict(lambda_s=532e-9, lambda_r=635e-9, z1=0.5, z2=0.25,
            omega=2e-3, l_c=50e-6)


def geometry(profile):
    z3 = matched_reference_distance(
        profile["lambda_s"], profile["z1"], profile["lambda_r"])
    return GeometryParams(
        profile["lambda_s"], profile["lambda_r"], profile["z1"],
        profile["z2"], z3, profile["omega"], profile["l_c"])


class TestMatchedDistance:
    def test_formula(self):
        assert matched_reference_distance(800e-9, 1000.0, 954.84e-9) == \
            pytest.approx(800e-9 * 1000.0 / 954.84e-9, rel=1e-14)

    def test_degenerate_wavelengths_give_z1(self):
        assert matched_reference_distance(532e-9, 0.5, 532e-9) == \
            pytest.approx(0.5, rel=1e-14)


class TestVacuumCoefficients:
    def test_kilometer_first_coefficient(self):
        c = vacuum_coefficients(geometry(KM))
        assert c.a == pytest.approx(500100.0 - 3926.9908169872415j, rel=1e-12)
        assert c.b == pytest.approx(np.conj(c.a), rel=1e-12)

    def test_kilometer_width(self):
        w = psf_width(vacuum_coefficients(geometry(KM)))
        assert w == pytest.approx(0.0027352794127209951, rel=1e-9)

    def test_desk_width(self):
        w = psf_width(vacuum_coefficients(geometry(DESK)))
        assert w == pytest.approx(5.4484638334747852e-5, rel=1e-9)

    def test_width_scale_sanity(self):
        # the width tracks the speckle diffraction scale lambda_s*z1/(2 pi w)
        g = geometry(KM)
        w = psf_width(vacuum_coefficients(g))
        scale = g.lambda_s * g.z1 / (2 * np.pi * g.omega)
        assert w == pytest.approx(scale, rel=0.15)

    def test_validation(self):
        with pytest.raises(InvalidParamsError):
            GeometryParams(0.0, 635e-9, 0.5, 0.25, 0.4, 2e-3, 50e-6)
        with pytest.raises(InvalidParamsError):
            GeometryParams(532e-9, 635e-9, -0.5, 0.25, 0.4, 2e-3, 50e-6)


class TestTurbulentCoefficients:
    def test_sentinel_reduces_to_vacuum_exactly(self):
        g = geometry(KM)
        vac = vacuum_coefficients(g)
        for rho in (None, np.inf):
            turb = turbulent_coefficients(g, rho)
            assert turb == vac

    def test_weak_limit_is_continuous(self):
        g = geometry(KM)
        vac = vacuum_coefficients(g)
        turb = turbulent_coefficients(g, 1e6)
        for name in ("a", "b", "c", "d", "k1", "k2", "k3", "k4"):
            assert getattr(turb, name) == pytest.approx(
                getattr(vac, name), rel=1e-9), name

    def test_first_coefficient_shift(self):
        g = geometry(KM)
        rho = 0.05
        vac = vacuum_coefficients(g)
        turb = turbulent_coefficients(g, rho)
        assert turb.a - vac.a == pytest.approx(1.0 / (2 * rho ** 2), rel=1e-12)

    def test_moderate_strength_chain(self):
        # frozen chain at cn2 = 1e-13 over the kilometer profile
        g = geometry(KM)
        rho = coherence_length(TurbulenceSpec(1e-13, 1000.0, 800e-9))
        assert rho == pytest.approx(0.0076150810257616739, rel=1e-9)
        c = turbulent_coefficients(g, rho)
        assert c.a == pytest.approx(
            508722.25667169413 - 3926.9908169872415j, rel=1e-9)
        assert c.b == pytest.approx(
            508576.12805349886 + 3925.8628031560672j, rel=1e-9)
        assert c.d == pytest.approx(
            4521.8298792508909 + 101.4634341358445j, rel=1e-9)
        assert psf_width(c) == pytest.approx(0.017425376416124267, rel=1e-9)

    def test_width_grows_with_strength(self):
        g = geometry(KM)
        widths = []
        for cn2 in (1e-16, 1e-15, 1e-14, 1e-13):
            rho = coherence_length(TurbulenceSpec(cn2, 1000.0, 800e-9))
            widths.append(psf_width(turbulent_coefficients(g, rho)))
        assert all(w2 > w1 for w1, w2 in zip(widths, widths[1:]))

    def test_guard_contract_on_stress_grid(self):
        # whatever returns must have strictly positive real parts everywhere
        for omega in (1e-4, 1e-3, 1e-2, 1e-1):
            for l_c in (1e-5, 1e-4, 1e-3):
                if l_c >= omega:
                    continue
                g = GeometryParams(800e-9, 954.84e-9, 1000.0, 1.0,
                                   837.84, omega, l_c)
                for rho in (1e-6, 1e-4, 1e-2, 1.0):
                    try:
                        c = turbulent_coefficients(g, rho)
                    except NonConvergentError:
                        continue
                    for name in ("a", "b", "c", "d"):
                        assert getattr(c, name).real > 0, (omega, l_c, rho)

    def test_guard_raises_on_nonpositive_real_part(self):
        with pytest.raises(NonConvergentError):
            _check_convergent(a=-1.0 + 0j)
        with pytest.raises(NonConvergentError):
            _check_convergent(b=0.0 + 5j)
        with pytest.raises(NonConvergentError):
            _check_convergent(c=complex(np.nan, 0.0))


class TestPsfWidth:
    def test_degenerate_kernel_raises(self):
        c = PsfCoefficients(a=1 + 0j, b=1 + 0j, c=1 + 0j, d=1 + 0j,
                            k1=0j, k2=0j, k3=0j, k4=0j)
        with pytest.raises(DegenerateWidthError):
            psf_width(c)


class TestPsfReport:
    def test_vacuum_report(self):
        rep = psf_report(geometry(KM), None)
        assert rep.turbulent is False
        assert rep.magnification == pytest.approx(-1.0, rel=1e-12)
        assert rep.w_psf == pytest.approx(0.0027352794127209951, rel=1e-9)
        assert rep.w_fov == pytest.approx(0.09004341025497255, rel=1e-9)

    def test_sentinel_spec_gives_vacuum_report(self):
        vac = psf_report(geometry(KM), None)
        sent = psf_report(geometry(KM), TurbulenceSpec(0.0, 1000.0, 800e-9))
        assert sent.w_psf == vac.w_psf
        assert sent.turbulent is False

    def test_turbulent_report_flags(self):
        rep = psf_report(geometry(KM), TurbulenceSpec(1e-15, 1000.0, 800e-9))
        assert rep.turbulent is True
        assert rep.w_psf > psf_report(geometry(KM), None).w_psf


class TestSweep:
    def test_unknown_axis_rejected(self):
        with pytest.raises(InvalidParamsError):
            sweep(geometry(KM), "z1", [1.0])

    def test_empty_values_rejected(self):
        with pytest.raises(InvalidParamsError):
            sweep(geometry(KM), "z3", [])

    def test_reference_sweep_rematches_distance(self):
        rows = sweep(geometry(KM), "lambda_r", [700e-9, 954.84e-9, 1200e-9])
        widths = [r.w_psf for r in (rep for _, rep in rows)]
        assert len(rows) == 3
        for value, rep in rows:
            assert rep.magnification == pytest.approx(-1.0, rel=1e-12)
        assert max(widths) - min(widths) <= 1e-12 * widths[0]

    def test_signal_sweep_changes_width(self):
        rows = sweep(geometry(KM), "lambda_s", [600e-9, 800e-9, 1000e-9])
        widths = [rep.w_psf for _, rep in rows]
        assert max(widths) / min(widths) - 1 > 0.2

    def test_distance_sweep_minimum_at_matched(self):
        g = geometry(KM)
        matched = g.z3
        values = list(np.linspace(0.5 * matched, 1.5 * matched, 21))
        rows = sweep(g, "z3", values)
        widths = [rep.w_psf for _, rep in rows]
        assert int(np.argmin(widths)) == 10

    def test_strength_sweep_flags(self):
        rows = sweep(geometry(KM), "cn2", [0.0, 1e-15, 1e-13])
        flags = [rep.turbulent for _, rep in rows]
        widths = [rep.w_psf for _, rep in rows]
        assert flags == [False, True, True]
        assert widths[0] < widths[1] < widths[2]

    def test_values_order_preserved(self):
        vals = [1e-15, 1e-17, 1e-14]
        rows = sweep(geometry(KM), "cn2", vals)
        assert [v for v, _ in rows] == vals
