"""Mountain-pass solver: path descent, semismooth Newton, certification.

The descent keeps a path from 0 to a fixed endpoint with negative energy.
Its highest node always sits on a ray t -> t w where E(t w) is maximal
(the Nehari point of w), so the running level is max_t E(t w).  Each step
moves w along the preconditioned gradient -alpha B^-1 E'(u) and re-maximizes
along the new ray; Armijo backtracking keeps the level non-increasing.  The
endpoint and the origin are never touched.

Newton then sharpens the critical point using the generalized Jacobian
B - diag(g'(u)) with MINRES, preconditioned by the LU of B.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import brentq

from .energy import (
    base_profile,
    dual_norm,
    energy,
    gradient,
    jacobian_diagonal,
    riesz,
)
from .errors import ConvergenceError, GeometryError, ParameterError
from .grid import Field, Grid2D, h1_norm_sq, helmholtz_factor, helmholtz_matrix, l2_norm
from .ground_state import bump_test_function, endpoint_scale
from .nonlinearity import g_from_profile

log = logging.getLogger(__name__)

ARMIJO = 1e-4
ALPHA_FLOOR = 1e-6
ALPHA_CAP = 1e6
REBUILD_EVERY = 10
LEVEL_MARGIN = 1e-6


@dataclass
class Path:
    """Nodes gamma_0 = 0, ..., gamma_m with cached energies."""

    nodes: list
    energies: list

    @property
    def m(self):
        return len(self.nodes) - 1

    @property
    def top(self):
        return int(np.argmax(self.energies))

    @property
    def level(self):
        return float(max(self.energies))

    def check_endpoints(self, endpoint):
        if np.any(self.nodes[0].values != 0.0):
            raise GeometryError("path no longer starts at 0")
        if self.nodes[-1] is not endpoint or not self.energies[-1] < 0:
            raise GeometryError("path endpoint moved or lost negative energy")


def initial_path(psi_r, k, ctx, m=40):
    """Straight segment gamma_i = (i/m) k psi_r."""
    if m < 40:
        raise ParameterError("the initial path needs at least 40 segments")
    endpoint = k * psi_r
    e_end = energy(endpoint, ctx)
    if not e_end < 0:
        raise GeometryError(f"E(k psi_r) = {e_end:.6g} is not negative; enlarge k or r")
    nodes = [(i / m) * endpoint for i in range(m)] + [endpoint]
    energies = [energy(u, ctx) for u in nodes[:-1]] + [e_end]
    path = Path(nodes, energies)
    if path.top in (0, m):
        raise GeometryError("maximum of the initial path sits at an endpoint")
    return path


class _Ray:
    """Maximizer of t -> E(t w) over t > 0 for a fixed direction w."""

    def __init__(self, grid, ctx):
        self.uc = base_profile(grid, ctx)[None, :]
        self.p = ctx.p
        self.h2 = grid.h**2
        self.ctx = ctx

    def slope(self, t, w, q):
        # (d/dt E(t w)) / t = q - <g(t w), w> / t, decreasing in t
        g = g_from_profile(self.uc, t * w.values, self.p)
        return q - self.h2 * float(np.sum(g * w.values)) / t

    def maximize(self, w):
        """Return ``(t*, t* w, E(t* w))``; ``None`` if E grows without bound on the ray."""
        if not np.any(w.values > 0):
            return None
        q = h1_norm_sq(w)
        scale = 1.0 / max(l2_norm(w), 1e-300)
        lo, hi = 1e-6 * scale, scale
        if self.slope(lo, w, q) <= 0:
            return None
        while self.slope(hi, w, q) > 0:
            lo, hi = hi, 2 * hi
            if hi > 1e12 * scale:
                return None
        t = brentq(self.slope, lo, hi, args=(w, q), xtol=1e-15 * hi, rtol=1e-15, maxiter=200)
        u = t * w
        return t, u, energy(u, self.ctx)


def _unit(u):
    return u / math.sqrt(h1_norm_sq(u))


def rebuild_path(u, endpoint, ctx, m=40):
    """Path 0 -> ray through u -> arc -> ray of the endpoint -> endpoint.

    ``u`` must be the maximizer of E on its ray; every other node then has
    lower energy and the arc and final ray are placed where E < 0.
    """
    x_hat, e_hat = _unit(u), _unit(endpoint)
    t_star = math.sqrt(h1_norm_sq(u))
    k_norm = math.sqrt(h1_norm_sq(endpoint))
    sigma = max(2 * t_star, k_norm)
    n_arc = max(m // 4, 4)
    lambdas = np.linspace(0.0, 1.0, n_arc + 1)
    for _ in range(60):
        arc = [sigma * _unit((1 - lam) * x_hat + lam * e_hat) for lam in lambdas]
        arc_e = [energy(a, ctx) for a in arc]
        if max(arc_e) < 0:
            break
        sigma *= 2
    else:
        raise GeometryError("could not place the connecting arc in the region E < 0")
    n_ray = max(m // 2, 4)
    ray_t = np.union1d(np.linspace(0.0, sigma, n_ray + 1), [t_star])[:-1]
    ray = [Field(u.grid, np.zeros(u.grid.shape))]
    ray += [u if t == t_star else t * x_hat for t in ray_t[1:]]
    n_back = max(m - len(ray) - len(arc), 2)
    back = [s * e_hat for s in np.linspace(sigma, k_norm, n_back + 1)[1:-1]]
    nodes = ray + arc + back + [endpoint]
    energies = [0.0] + [energy(v, ctx) for v in nodes[1:-1]] + [energy(endpoint, ctx)]
    return Path(nodes, energies)


@dataclass
class DescentResult:
    u: Field
    level: float
    grad_norm: float
    iterations: int
    history: list = field(repr=False)
    path: Path = field(repr=False)


def mountain_pass_descend(path, ctx, tol=1e-4, maxiter=20000, rebuild_every=REBUILD_EVERY,
                          report_every=200):
    """Deform ``path`` until its top node is almost critical.

    Returns a :class:`DescentResult`.  ``history`` holds (level, grad_norm,
    alpha) per iteration; the level is non-increasing by construction and
    this is asserted every step.
    """
    endpoint = path.nodes[-1]
    top = path.top
    if top in (0, path.m):
        raise GeometryError("maximum of the path sits at an endpoint")
    grid = endpoint.grid
    ray = _Ray(grid, ctx)
    found = ray.maximize(path.nodes[top])
    if found is None:
        raise GeometryError("top node of the path has no positive part")
    # the segment through the top node peaks at its ray maximum
    _, u, level = found
    r = gradient(u, ctx)
    z = riesz(r)
    gn = math.sqrt(max(grid.h**2 * float(np.dot(r.flat, z.flat)), 0.0))
    alpha0 = 1.0
    history = []
    B = helmholtz_matrix(grid)
    it = 0
    while gn >= tol:
        it += 1
        if it > maxiter:
            raise ConvergenceError(
                f"descent hit the iteration cap with gradient {gn:.3e}",
                result=DescentResult(u, level, gn, maxiter, history, path),
            )
        alpha = alpha0
        while True:
            cand = ray.maximize(u - alpha * z)
            if cand is not None and cand[2] <= level - ARMIJO * alpha * gn**2:
                break
            if alpha <= ALPHA_FLOOR:
                break
            alpha = max(alpha / 2, ALPHA_FLOOR)
        if cand is None or cand[2] > level:
            raise ConvergenceError(
                f"descent stagnated at level {level:.12g} with gradient {gn:.3e}",
                result=DescentResult(u, level, gn, it, history, path),
            )
        u_new, level_new = cand[1], cand[2]
        r_new = gradient(u_new, ctx)
        # Barzilai-Borwein step in the B inner product for the next trial
        s = u_new.flat - u.flat
        y = r_new.flat - r.flat
        sy = float(np.dot(s, y))
        alpha0 = min(max(float(s @ (B @ s)) / sy, ALPHA_FLOOR), ALPHA_CAP) if sy > 0 else 1.0
        assert level_new <= level
        u, level, r = u_new, level_new, r_new
        z = riesz(r)
        gn = math.sqrt(max(grid.h**2 * float(np.dot(r.flat, z.flat)), 0.0))
        history.append((level, gn, alpha))
        if it % rebuild_every == 0:
            path = rebuild_path(u, endpoint, ctx, m=path.m)
            path.check_endpoints(endpoint)
        if report_every and it % report_every == 0:
            log.info("descent %d: level %.10f grad %.3e", it, level, gn)
    path = rebuild_path(u, endpoint, ctx, m=path.m)
    path.check_endpoints(endpoint)
    return DescentResult(u, level, gn, len(history), history, path)


def _is_even(u, rtol=1e-8):
    return float(np.max(np.abs(u.values - u.values[::-1, :]))) <= rtol * float(np.max(np.abs(u.values)))


def newton_refine(u0, ctx, tol=1e-10, maxiter=30, max_rejections=3):
    """Semismooth Newton on E'(u) = 0.

    Returns ``(u, residual_history)`` with residuals in the dual norm.  For
    x1-even data the update is symmetrized, which removes the almost-null
    translation mode of the Jacobian.
    """
    grid = u0.grid
    r = gradient(u0, ctx)
    res = dual_norm(r)
    if not res < 1e-3:
        raise ConvergenceError(f"Newton start too far from a critical point (residual {res:.3e})")
    symmetric = _is_even(u0)
    lu = helmholtz_factor(grid)
    precond = spla.LinearOperator((grid.size, grid.size), matvec=lu.solve, dtype=float)
    B = helmholtz_matrix(grid)
    u = u0
    history = [res]
    for _ in range(maxiter):
        if res < tol:
            return u, history
        J = B - sp.diags(jacobian_diagonal(u, ctx).ravel())
        du, info = spla.minres(J, -r.flat, M=precond, rtol=1e-13, maxiter=2000)
        if info < 0:
            raise ConvergenceError(f"MINRES failed with code {info}")
        step = Field.from_flat(grid, du)
        if symmetric:
            step = 0.5 * (step + step.mirrored())
        lam = 1.0
        for _ in range(max_rejections):
            trial = u + lam * step
            r_trial = gradient(trial, ctx)
            res_trial = dual_norm(r_trial)
            if res_trial < res:
                break
            lam /= 2
        else:
            raise ConvergenceError(
                f"Newton step rejected {max_rejections} times at residual {res:.3e}", result=u
            )
        u, r, res = trial, r_trial, res_trial
        history.append(res)
    if res < tol:
        return u, history
    raise ConvergenceError(f"Newton did not reach {tol:g} (residual {res:.3e})", result=u)


def newton_order(history, floor=1e-11):
    """Observed order from the last three residuals above ``floor`` (roundoff level)."""
    h = [x for x in history if x > floor]
    if len(h) < 3:
        return float("nan")
    a, b, c = h[-3:]
    return math.log(c / b) / math.log(b / a)


@dataclass
class Assembly:
    v: Field
    pde_residual_sup: float
    min_v: float
    boundary_row_error: float
    top_row_max: float
    excess_min: float
    excess_max: float
    failures: list


def assemble_solution(u, ctx, tol_pde=1e-4, decay_tol=1e-6):
    """v = u_c + u with the PDE residual computed against the full boundary data."""
    grid = u.grid
    p = ctx.p
    column = base_profile(grid, ctx)
    top_value = float(ctx.closed_form.u_c(grid.Ly))
    v_vals = column[None, :] + u.values
    padded = np.empty((grid.nx + 2, grid.ny + 2))
    padded[1:-1, 1:-1] = v_vals
    padded[:, 0] = ctx.c
    padded[:, -1] = top_value
    padded[0, 1:-1] = column
    padded[-1, 1:-1] = column
    c = padded[1:-1, 1:-1]
    lap = (4 * c - padded[:-2, 1:-1] - padded[2:, 1:-1] - padded[1:-1, :-2] - padded[1:-1, 2:]) / grid.h**2
    residual = lap + c - np.abs(c) ** (p - 1) * c
    v = Field(grid, v_vals)
    out = Assembly(
        v=v,
        pde_residual_sup=float(np.max(np.abs(residual))),
        min_v=float(v_vals.min()),
        boundary_row_error=float(np.max(np.abs(padded[1:-1, 0] - ctx.c))),
        top_row_max=float(np.max(np.abs(v_vals[:, -1]))),
        excess_min=float(u.values.min()),
        excess_max=float(u.values.max()),
        failures=[],
    )
    if not out.min_v > 0:
        out.failures.append("v is not positive")
    if not out.pde_residual_sup < tol_pde:
        out.failures.append(f"PDE residual {out.pde_residual_sup:.3e} >= {tol_pde:g}")
    if not out.top_row_max < decay_tol:
        out.failures.append(f"top row {out.top_row_max:.3e} does not decay below {decay_tol:g}")
    if not out.excess_max > 0:
        out.failures.append("u vanishes: v coincides with the 1D profile")
    return out


@dataclass
class MountainPassResult:
    u_star: Field = field(repr=False)
    v: Field = field(repr=False)
    energy_level: float
    grad_norm: float
    pde_residual_sup: float
    positivity_min: float
    certified: bool
    b_inf: float
    descent_level: float
    descent_iterations: int
    newton_history: list
    asymmetry: float
    diagnostics: dict
    failures: list
    params: dict

    def to_dict(self):
        skip = {"u_star", "v"}
        d = {k: getattr(self, k) for k in self.__dataclass_fields__ if k not in skip}
        g = self.u_star.grid
        d["grid"] = {"Lx": g.Lx, "Ly": g.Ly, "h": g.h, "nx": g.nx, "ny": g.ny}
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def certify(u, ctx, b_inf, *, tol_grad=1e-10, tol_pde=1e-4, margin=LEVEL_MARGIN,
            descent=None, newton_history=(), params=None):
    """Evaluate every certification condition on a candidate critical point."""
    level = energy(u, ctx)
    gn = dual_norm(gradient(u, ctx))
    asm = assemble_solution(u, ctx, tol_pde=tol_pde)
    failures = list(asm.failures)
    if not gn < tol_grad:
        failures.append(f"gradient {gn:.3e} >= {tol_grad:g}")
    if not 0 < level < b_inf - margin:
        failures.append(f"level {level:.10g} outside (0, b_inf - {margin:g})")
    if not asm.excess_min >= -1e-8:
        failures.append(f"min u = {asm.excess_min:.3e} < -1e-8")
    neg = Field(u.grid, np.minimum(u.values, 0.0))
    return MountainPassResult(
        u_star=u,
        v=asm.v,
        energy_level=float(level),
        grad_norm=float(gn),
        pde_residual_sup=asm.pde_residual_sup,
        positivity_min=asm.excess_min,
        certified=not failures,
        b_inf=float(b_inf),
        descent_level=float(descent.level) if descent else float("nan"),
        descent_iterations=int(descent.iterations) if descent else 0,
        newton_history=[float(x) for x in newton_history],
        asymmetry=float(np.max(np.abs(u.values - u.values[::-1, :]))),
        diagnostics={
            "boundary_row_error": asm.boundary_row_error,
            "top_row_max": asm.top_row_max,
            "min_v": asm.min_v,
            "max_u": asm.excess_max,
            "negative_part_norm": math.sqrt(h1_norm_sq(neg)),
            "newton_order": newton_order(list(newton_history)),
            "descent_newton_gap": abs(level - descent.level) if descent else float("nan"),
        },
        failures=failures,
        params=dict(params or {}),
    )


def embed_into(u, grid):
    """Zero-extend ``u`` onto a larger grid with the same spacing, centered in x1."""
    if not math.isclose(grid.h, u.grid.h) or grid.nx < u.grid.nx or grid.ny < u.grid.ny:
        raise ParameterError("target grid must share h and contain the source grid")
    if (grid.nx - u.grid.nx) % 2:
        raise ParameterError("x1 offset between the grids is not a whole number of cells")
    off = (grid.nx - u.grid.nx) // 2
    vals = np.zeros(grid.shape)
    vals[off : off + u.grid.nx, : u.grid.ny] = u.values
    return Field(grid, vals)


def solve_on_grid(ctx, gs, grid, r, b_inf, *, tol_grad=1e-10, tol_pde=1e-4, descent_tol=1e-4,
                  m=40, max_fallbacks=2, params=None):
    """Profiles -> psi_r -> path -> descent -> Newton -> certification on one grid."""
    psi_r, _ = bump_test_function(gs, r, grid)
    k = endpoint_scale(gs)
    path = initial_path(psi_r, k, ctx, m=m)
    descent = mountain_pass_descend(path, ctx, tol=descent_tol)
    u0 = descent.u
    for attempt in range(max_fallbacks + 1):
        try:
            u, history = newton_refine(u0, ctx, tol=tol_grad)
            break
        except ConvergenceError:
            if attempt == max_fallbacks:
                raise
            log.warning("Newton failed; descending further")
            descent = mountain_pass_descend(descent.path, ctx, tol=descent.grad_norm / 10)
            u0 = descent.u
    return certify(u, ctx, b_inf, tol_grad=tol_grad, tol_pde=tol_pde, descent=descent,
                   newton_history=history, params=params)


def wider_grid_check(result, ctx, extra=8.0, tol_grad=1e-10):
    """Re-solve on a grid widened by ``extra`` in both directions; returns (level, grad)."""
    g = result.u_star.grid
    wide = Grid2D(g.Lx + extra, g.Ly + extra, g.h)
    u0 = embed_into(result.u_star, wide)
    u, _ = newton_refine(u0, ctx, tol=tol_grad)
    return energy(u, ctx), dual_norm(gradient(u, ctx))


__all__ = [
    "Path",
    "DescentResult",
    "MountainPassResult",
    "initial_path",
    "rebuild_path",
    "mountain_pass_descend",
    "newton_refine",
    "newton_order",
    "assemble_solution",
    "certify",
    "embed_into",
    "solve_on_grid",
    "wider_grid_check",
]
