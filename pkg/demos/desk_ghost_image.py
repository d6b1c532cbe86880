"""A benchtop two-color ghost image, start to finish.

Runs a reduced desk-scale experiment: a green (532 nm) speckle arm hits a
rough pinhole and a bucket detector; the red (635 nm) reference arm is
computed, never built. Correlating bucket values against computed reference
intensities reconstructs the pinhole. The script writes the image as a PGM
file and compares the measured spot width with the closed-form prediction.

About a minute on one core (1500 realizations on a 256-pixel grid).

Run:  python3 demos/desk_ghost_image.py [output.pgm]
"""

import sys
import time

import numpy as np

from ndcgi import (
    ExperimentConfig,
    GeometryParams,
    GridSpec,
    SpeckleParams,
    estimate_psf_width,
    matched_reference_distance,
    pinhole_aperture,
    psf_report,
    run_experiment,
)

GRID = GridSpec(256, 24e-6)
OMEGA = 1e-3
L_C = 90e-6
LAMBDA_S, LAMBDA_R = 532e-9, 635e-9
Z1, Z2 = 0.5, 0.25

z3 = matched_reference_distance(LAMBDA_S, Z1, LAMBDA_R)
geometry = GeometryParams(LAMBDA_S, LAMBDA_R, Z1, Z2, z3, OMEGA, L_C)
pinhole = pinhole_aperture(GRID, 1.5 * GRID.pitch)
config = ExperimentConfig(
    geometry=geometry,
    speckle=SpeckleParams(OMEGA, L_C, GRID),
    object_mask=pinhole,
    realizations=1500,
    master_seed=42,
    rough_surface=True,
)

print(f"signal arm: {LAMBDA_S * 1e9:.0f} nm over {Z1} m, "
      f"bucket after {Z2} m")
print(f"reference arm (computed): {LAMBDA_R * 1e9:.0f} nm over {z3:.4f} m "
      f"(matched distance)")
print(f"object: rough pinhole, radius {1.5 * GRID.pitch * 1e6:.0f} um")
print()

start = time.perf_counter()
image = run_experiment(config)
elapsed = time.perf_counter() - start
print(f"{config.realizations} realizations in {elapsed:.1f} s")

measured = estimate_psf_width(image, pinhole, crop_halfwidth=32)
predicted = psf_report(geometry, None).w_psf
print(f"measured 1/e half-width:  {measured * 1e6:8.2f} um")
print(f"predicted 1/e half-width: {predicted * 1e6:8.2f} um")
print(f"ratio: {measured / predicted:.3f}")

out_path = sys.argv[1] if len(sys.argv) > 1 else "desk_ghost.pgm"
scaled = np.round(image.normalized() * 65535.0).astype(">u2")
header = f"P5\n{scaled.shape[1]} {scaled.shape[0]}\n65535\n".encode("ascii")
with open(out_path, "wb") as handle:
    handle.write(header + scaled.tobytes())
print(f"wrote {out_path}")
