"""Mountain-pass solve of the half-plane problem on a small grid.

The full default run (``halfspace-nls solve``) takes about two minutes; this
uses a 16 x 16 box at h = 0.25, which certifies in a few seconds.

Run: python demos/05_mountain_pass.py
"""
from halfspace_nls.grid import Grid2D
from halfspace_nls.ground_state import ground_level, radial_ground_state
from halfspace_nls.mountain_pass import solve_on_grid, wider_grid_check
from halfspace_nls.nonlinearity import NonlinearityCtx

ctx = NonlinearityCtx(3.0, 1.0, discrete_profile=True)
gs = radial_ground_state(3.0, 2)
b_inf = ground_level(gs)
grid = Grid2D(16.0, 16.0, 0.25)

result = solve_on_grid(ctx, gs, grid, r=6.0, b_inf=b_inf)
print(f"certified: {result.certified} {result.failures or ''}")
print(f"level {result.energy_level:.10f}  (b_inf = {b_inf:.6f})")
print(f"descent: {result.descent_iterations} steps to level {result.descent_level:.10f}")
print("Newton residuals: " + ", ".join(f"{x:.1e}" for x in result.newton_history))
print(f"PDE residual {result.pde_residual_sup:.1e}, min u {result.positivity_min:.1e}, "
      f"asymmetry {result.asymmetry:.1e}")

level, grad = wider_grid_check(result, ctx)
print(f"on a box widened by 8: level {level:.10f}, gradient {grad:.1e}")

# Where the bump sits: height of the maximum of u above the boundary.
u = result.u_star
i, j = divmod(int(u.values.argmax()), grid.ny)
print(f"max u = {u.values.max():.4f} at x1 = {grid.x1[i]:.2f}, x2 = {grid.x2[j]:.2f}")
