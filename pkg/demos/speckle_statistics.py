"""Do the generated speckle masks have the statistics they promise?

Draws an ensemble of modulator masks and checks the two claims the whole
method rests on: the two-point correlation falls off as a Gaussian with the
configured correlation length, and the intensity envelope follows the beam
profile. Prints measured versus model values side by side.

Run:  python3 demos/speckle_statistics.py
"""

import numpy as np

from ndcgi import GridSpec, RealizationKey, SpeckleParams, generate_slm_field

N = 64
PITCH = 50e-6
OMEGA = 0.5e-3
L_C = 200e-6
ENSEMBLE = 4000

params = SpeckleParams(OMEGA, L_C, GridSpec(N, PITCH))
print(f"{ENSEMBLE} masks on a {N}x{N} grid, pitch {PITCH * 1e6:.0f} um")
print(f"omega = {OMEGA * 1e3:.1f} mm, l_c = {L_C * 1e6:.0f} um")
print()

stack = np.empty((ENSEMBLE, N, N), dtype=np.complex128)
for i in range(ENSEMBLE):
    stack[i] = generate_slm_field(params, RealizationKey(2024, i)).samples

center = N // 2
print("two-point correlation against exp(-sep^2 / (2 l_c^2)):")
print(f"{'separation':>12} {'measured':>10} {'model':>10}")
for sep_px in (0, 1, 2, 4, 6, 8, 12):
    a = stack[:, center, center - sep_px // 2]
    b = stack[:, center, center - sep_px // 2 + sep_px]
    measured = np.abs(np.mean(a * np.conj(b)))
    sep = sep_px * PITCH
    u1 = (center - sep_px // 2 - center) * PITCH
    u2 = u1 + sep
    envelope = np.exp(-(u1 ** 2 + u2 ** 2) / (4 * OMEGA ** 2))
    model = envelope * np.exp(-sep ** 2 / (2 * L_C ** 2))
    print(f"{sep / L_C:>10.2f}lc {measured:>10.4f} {model:>10.4f}")

print()
print("intensity envelope against exp(-u^2 / (2 omega^2)):")
print(f"{'offset':>12} {'measured':>10} {'model':>10}")
mean_intensity = np.mean(np.abs(stack) ** 2, axis=0)
for off_px in (0, 5, 10, 15, 20):
    u = off_px * PITCH
    measured = mean_intensity[center + off_px, center]
    model = np.exp(-u ** 2 / (2 * OMEGA ** 2))
    print(f"{u / OMEGA:>9.2f} w {measured:>10.4f} {model:>10.4f}")

mean_field = np.abs(stack.mean())
print()
print(f"grand mean |<V>| = {mean_field:.5f} (should vanish as 1/sqrt(M))")
