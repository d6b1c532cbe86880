"""Which signal color survives turbulence best?

In vacuum, a shorter signal wavelength always gives a sharper ghost image.
Turbulence reverses that: the atmospheric coherence length rho grows with
wavelength (rho ~ lambda^(6/5)), so in strong turbulence the longer
wavelength is distorted less and wins. This demo prints the reconstructed
width versus signal wavelength for increasing turbulence strength and shows
the ordering flip.

Run:  python3 demos/turbulence_crossover.py
"""

import numpy as np

from ndcgi import (
    GeometryParams,
    TurbulenceSpec,
    coherence_length,
    matched_reference_distance,
    psf_report,
)

Z1 = 1000.0
OMEGA = 0.05
L_C = 1e-3
LAMBDA_R = 954.84e-9

wavelengths_nm = np.array([500, 600, 700, 800, 900, 1000, 1200, 1550])
strengths = (0.0, 1e-15, 1e-14, 1e-13, 1e-12)

print("reconstructed width (mm) over a 1 km path")
print(f"{'lambda_s (nm)':>14}", end="")
for cn2 in strengths:
    label = "vacuum" if cn2 == 0 else f"cn2={cn2:g}"
    print(f" {label:>12}", end="")
print()

table = np.empty((len(wavelengths_nm), len(strengths)))
for i, nm in enumerate(wavelengths_nm):
    lambda_s = nm * 1e-9
    matched = matched_reference_distance(lambda_s, Z1, LAMBDA_R)
    geometry = GeometryParams(lambda_s, LAMBDA_R, Z1, 1.0, matched,
                              OMEGA, L_C)
    print(f"{nm:>14}", end="")
    for j, cn2 in enumerate(strengths):
        turbulence = TurbulenceSpec(cn2, Z1, lambda_s) if cn2 else None
        report = psf_report(geometry, turbulence)
        table[i, j] = report.w_psf
        print(f" {report.w_psf * 1e3:>12.3f}", end="")
    print()

print()
for j, cn2 in enumerate(strengths):
    order = "shorter is sharper" if table[0, j] < table[-1, j] \
        else "longer is sharper"
    best = wavelengths_nm[int(np.argmin(table[:, j]))]
    label = "vacuum" if cn2 == 0 else f"cn2 = {cn2:g}"
    print(f"  {label:>12}: {order}; best listed color {best} nm")

rho_blue = coherence_length(TurbulenceSpec(1e-12, Z1, 500e-9))
rho_red = coherence_length(TurbulenceSpec(1e-12, Z1, 1550e-9))
print()
print(f"coherence length at cn2 = 1e-12: {rho_blue * 1e3:.2f} mm at 500 nm "
      f"vs {rho_red * 1e3:.2f} mm at 1550 nm")
