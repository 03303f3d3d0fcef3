"""Pole densities of plurisubharmonic potentials: plain and weighted.

The density (pole order) of a potential at a point is the slope of its
sup over shrinking spheres against log r.  The weighted variant samples
anisotropic polydisks Delta(r^(1/a1)) x Delta(r^(1/a2)); degenerating the
transverse weight makes line-borne mass visible: a potential carrying no
mass on a line has weighted density decaying to zero along it.
"""

import numpy as np

from greenp2 import kiselman_decay_scan, kiselman_estimate, lelong_estimate, sublevel_volume

u_w = lambda pts: np.log(np.abs(pts[:, 1]) + 1e-300)  # pole on {w = 0}
u_z = lambda pts: np.log(np.abs(pts[:, 0]) + 1e-300)  # pole on {z = 0}
u_ball = lambda pts: np.log(np.linalg.norm(pts.view(float).reshape(len(pts), 4), axis=1))

print("plain densities at the origin:")
print(f"  log|zeta|  -> {lelong_estimate(u_ball, (0, 0)):.4f}  (expect 1)")
print(f"  3 log|z|   -> {lelong_estimate(lambda p: 3 * u_z(p), (0, 0)):.4f}  (expect 3)")

print("\nweighted densities with weights (a, 1):")
print("   a     log|w| (transverse)   log|z| (longitudinal)")
for a in (1.0, 0.5, 0.25, 0.1):
    kw = kiselman_estimate(u_w, (0, 0), (a, 1.0)).slope
    kz = kiselman_estimate(u_z, (0, 0), (a, 1.0)).slope
    print(f"  {a:4.2f}   {kw:8.4f} (expect {a:.2f})    {kz:8.4f} (expect 1)")

print("\ndecay scan along {z = 0} for a transverse-line potential:")
line_points = [(0.0, 0.0), (0.0, 0.35), (0.0, -0.2 + 0.4j)]
for a, v in kiselman_decay_scan(u_w, line_points, [0.5, 0.25, 0.1, 0.05]):
    print(f"  weight {a:5.2f}: sup density {v:.4f}")
print("  (the potential charges no mass on the line, so the table tends to zero)")

print("\nsublevel volumes of u = 2 log|z| on the unit bidisk (law exp(-t)):")
for t, frac in sublevel_volume(
    lambda p: 2 * u_z(p), ((0, 0), (1, 1)), [0.5, 1, 2, 3], 100000, seed=3
):
    print(f"  t = {t:3.1f}: fraction {frac:.4f} vs {np.exp(-t):.4f}")
