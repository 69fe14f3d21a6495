"""Discrete energy, its gradient and the coercivity of the linearization at u_c.

Run: python demos/03_energy_and_coercivity.py
"""
import numpy as np

from halfspace_nls.energy import coercivity_constant, energy, energy_report, gradient
from halfspace_nls.grid import Field, Grid2D, inner
from halfspace_nls.nonlinearity import NonlinearityCtx

ctx = NonlinearityCtx(3.0, 1.0)
grid = Grid2D(8.0, 8.0, 0.125)
X1, X2 = grid.mesh()
bump = Field(grid, np.exp(-(X1**2 + (X2 - 4.0) ** 2)))

# Along a ray the energy first rises, then falls below zero: the mountain-pass shape.
for t in (0.0, 1.0, 2.0, 3.0, 4.0, 6.0):
    print(f"E({t:g} * bump) = {energy(t * bump, ctx):+.5f}")

# Gradient against a central difference in a random direction.
rng = np.random.default_rng(0)
phi = Field(grid, rng.normal(size=grid.shape) * bump.values)
u, eps = 2.0 * bump, 1e-5
fd = (energy(u + eps * phi, ctx) - energy(u - eps * phi, ctx)) / (2 * eps)
print(f"\ndirectional derivative: analytic {inner(gradient(u, ctx), phi):.10f}, difference {fd:.10f}")
print(energy_report(u, ctx, b_inf=5.85).to_json())

# Smallest generalized eigenvalue of (-Lap + V_c, -Lap + I); positive means coercive.
for p, c in ((3.0, 1.0), (2.0, 0.8), (5.0, 0.5)):
    lam = coercivity_constant(grid, NonlinearityCtx(p, c))
    print(f"coercivity at (p, c) = ({p:g}, {c:g}): {lam:.5f}")
