"""Radial ground state of -Lap psi + psi = psi^p in the line and the plane.

Run: python demos/04_ground_state.py
"""
import numpy as np

from halfspace_nls.closed_form import homoclinic
from halfspace_nls.grid import Grid2D
from halfspace_nls.ground_state import (
    bump_test_function,
    decay_slope,
    endpoint_scale,
    ground_level,
    nehari_defect,
    radial_ground_state,
    verify_energy_estimates,
)
from halfspace_nls.nonlinearity import NonlinearityCtx

line = radial_ground_state(3.0, 1)
r = np.linspace(0, 20, 401)
print(f"N = 1: psi(0) = {line.psi0:.10f}, max error against the closed form "
      f"{np.max(np.abs(line(r) - homoclinic(r, 3.0)[0])):.1e}, level {ground_level(line):.9f}")

gs = radial_ground_state(3.0, 2)
print(f"N = 2: psi(0) = {gs.psi0:.7f}, level b_inf = {ground_level(gs):.7f}")
print(f"       Nehari defect {nehari_defect(gs):.1e}, tail slope {decay_slope(gs):.1e}, "
      f"amplitude {gs.C_fit:.4f}")

# Cut-off copies pushed away from the boundary; k makes the far end of the ray negative.
grid = Grid2D(16.0, 32.0, 0.125)
k = endpoint_scale(gs)
for radius in (4.0, 8.0, 14.0):
    psi_r, eps = bump_test_function(gs, radius, grid)
    print(f"r = {radius:4.1f}: psi(r) = {eps:.2e}, peak {psi_r.values.max():.5f}")

rep = verify_energy_estimates(gs, NonlinearityCtx(3.0, 1.0), grid)
print(f"\nk = {k:.4f}; max E(t psi_r) stays below b_inf: {rep.passed}")
for key in rep.max_energy:
    print(f"  r = {key}: max {rep.max_energy[key]:.5f}, margin {rep.level_margin[key]:.4f}, "
          f"E(k psi_r) = {rep.endpoint_energy[key]:.3g}")
