"""Energy functional, gradient, quadratic form and discrete coercivity.

On a :class:`~halfspace_nls.grid.Grid2D`,

    E(u)   = 1/2 ||u||^2 - h^2 sum G(x2, u)
    E'(u)  = B u - g(x2, u),           B = -Delta_h + I
    q_c(u) = ||u||^2 - p h^2 sum u_c^(p-1) u^2

where ``||u||^2`` is :func:`~halfspace_nls.grid.h1_norm_sq`.  Gradient
smallness is measured in the discrete dual norm sqrt(h^2 r^T B^-1 r).
"""
from __future__ import annotations

import functools
import json
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .closed_form import profiles
from .errors import ConvergenceError
from .grid import (
    Field,
    dirichlet_laplacian,
    h1_norm_sq,
    helmholtz_factor,
    helmholtz_matrix,
    lp_norm,
)
from .nonlinearity import G_from_profile, g_from_profile, g_prime_from_profile


@functools.lru_cache(maxsize=32)
def _profile_column(ny, h, p, c, discrete):
    cf = profiles(c, p)
    x2 = h * np.arange(1, ny + 1)
    z = np.asarray(cf.u_c(x2), dtype=float)
    if discrete:
        z = _discrete_profile(z, h, p, c, float(cf.u_c((ny + 1) * h)))
    z.setflags(write=False)
    return z


def _discrete_profile(z, h, p, bottom, top, tol=1e-15, maxiter=50):
    # Newton for (-z'' + z - z^p)_h = 0 with Dirichlet data bottom/top.
    n = z.size
    z = z.copy()
    for _ in range(maxiter):
        padded = np.concatenate([[bottom], z, [top]])
        F = (2 * z - padded[:-2] - padded[2:]) / h**2 + z - z**p
        ab = np.zeros((3, n))
        ab[0, 1:] = -1 / h**2
        ab[2, :-1] = -1 / h**2
        ab[1] = 2 / h**2 + 1 - p * z ** (p - 1)
        dz = sla.solve_banded((1, 1), ab, -F)
        z += dz
        if np.max(np.abs(dz)) < tol:
            return z
    raise ConvergenceError("discrete boundary-layer profile did not converge")


def base_profile(grid, ctx):
    """u_c at the interior x2 nodes (length ``ny``).

    With ``ctx.discrete_profile`` the exact profile is replaced by the
    solution of the discretized 1D equation with the same boundary data, so
    u = 0 leaves no O(h^2) residual on the grid.
    """
    return _profile_column(grid.ny, grid.h, float(ctx.p), float(ctx.c), bool(ctx.discrete_profile))


def _uc(u, ctx):
    return base_profile(u.grid, ctx)[None, :]


def nonlinear_term(u, ctx):
    """Field g(x2, u)."""
    return Field(u.grid, g_from_profile(_uc(u, ctx), u.values, ctx.p))


def energy(u, ctx):
    G = G_from_profile(_uc(u, ctx), u.values, ctx.p)
    return 0.5 * h1_norm_sq(u) - u.grid.h**2 * float(np.sum(G))


def apply_helmholtz(u):
    return Field.from_flat(u.grid, helmholtz_matrix(u.grid) @ u.flat)


def gradient(u, ctx):
    """Residual field r = B u - g(., u); <r, phi> h^2 is the derivative of E along phi."""
    g = g_from_profile(_uc(u, ctx), u.values, ctx.p)
    return Field(u.grid, apply_helmholtz(u).values - g)


def riesz(r):
    """Solve B z = r (the H^1 representative of the functional r)."""
    return Field.from_flat(r.grid, helmholtz_factor(r.grid).solve(r.flat))


def dual_norm(r):
    """Discrete H^-1 norm sqrt(h^2 r^T B^-1 r)."""
    z = riesz(r)
    return float(np.sqrt(max(r.grid.h**2 * np.dot(r.flat, z.flat), 0.0)))


def jacobian_diagonal(u, ctx):
    """d g / d s at u (zero on the inactive set u <= 0)."""
    return g_prime_from_profile(_uc(u, ctx), u.values, ctx.p)


def potential(grid, ctx):
    """V_c = 1 - p u_c^(p-1) at the interior x2 nodes."""
    return 1.0 - ctx.p * base_profile(grid, ctx) ** (ctx.p - 1)


def quadratic_form(u, ctx):
    uc = _uc(u, ctx)
    return h1_norm_sq(u) - ctx.p * u.grid.h**2 * float(np.sum(uc ** (ctx.p - 1) * u.values**2))


def pencil(grid, ctx):
    """Sparse (A, B) with A = -Delta_h + V_c and B = -Delta_h + I."""
    V = np.tile(potential(grid, ctx), grid.nx)
    L = dirichlet_laplacian(grid)
    return (L + sp.diags(V)).tocsc(), helmholtz_matrix(grid)


def _seed(grid):
    # lowest x1 sine mode times a positive x2 bump: deterministic start that
    # overlaps the ground mode of the separable pencil
    X1, X2 = grid.mesh()
    return (np.sin(np.pi * (X1 + grid.Lx) / (2 * grid.Lx)) * X2 * np.exp(-0.5 * X2)).ravel()


def generalized_min_eigenvalue(A, B, x0=None, tol=1e-10, maxiter=500):
    """Smallest eigenvalue of A x = lam B x, by shift-invert Lanczos at shift 0.

    This is inverse iteration on the pencil accelerated by a Krylov space:
    each step applies A^-1 B through one sparse LU of A.  Returns ``(lam, x)``
    with x normalized so that x^T B x = 1.
    """
    try:
        vals, vecs = spla.eigsh(
            sp.csc_matrix(A), k=1, M=B, sigma=0.0, which="LM", v0=x0, tol=tol, maxiter=maxiter
        )
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"pencil eigen-iteration did not converge: {exc}") from exc
    x = vecs[:, 0]
    return float(vals[0]), x / np.sqrt(x @ (B @ x))


def coercivity_constant(grid, ctx, tol=1e-10, maxiter=500):
    """Discrete inf q_c(u) / ||u||^2, i.e. the lowest eigenvalue of the pencil."""
    A, B = pencil(grid, ctx)
    return generalized_min_eigenvalue(A, B, _seed(grid), tol, maxiter)[0]


def limit_energy(u, p):
    """Return ``(E_inf_plus, E_inf)`` of the whole-space functional."""
    half = 0.5 * h1_norm_sq(u)
    h2 = u.grid.h**2
    plus = half - h2 * float(np.sum(np.maximum(u.values, 0.0) ** (p + 1))) / (p + 1)
    full = half - h2 * float(np.sum(np.abs(u.values) ** (p + 1))) / (p + 1)
    return plus, full


def decomposition_check(u, ctx):
    """|E(u) - (E_inf_plus(u) - correction)| evaluated from independent formulas."""
    p = ctx.p
    uc = _uc(u, ctx)
    up = np.maximum(u.values, 0.0)
    correction = (uc + up) ** (p + 1) - uc ** (p + 1) - up ** (p + 1) - (p + 1) * uc**p * up
    rhs = limit_energy(u, p)[0] - u.grid.h**2 * float(np.sum(correction)) / (p + 1)
    return abs(energy(u, ctx) - rhs)


def lower_energy_bound(u, ctx, lam):
    """lam/2 ||u||^2 - C1/(p+1) ||u||_{p+1}^{p+1} - [p>2] C2/3 ||u||_3^3."""
    p = ctx.p
    bound = 0.5 * lam * h1_norm_sq(u) - ctx.C1 / (p + 1) * lp_norm(u, p + 1) ** (p + 1)
    if ctx.indicator_p_gt_2:
        bound -= ctx.C2 / 3 * lp_norm(u, 3) ** 3
    return bound


@dataclass
class EnergyReport:
    E_value: float
    grad_norm: float
    qc_value: float
    b_inf: float | None = None

    @property
    def below_b_inf(self):
        return None if self.b_inf is None else self.E_value < self.b_inf

    def to_dict(self):
        d = asdict(self)
        d["below_b_inf"] = self.below_b_inf
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def energy_report(u, ctx, b_inf=None):
    return EnergyReport(
        E_value=energy(u, ctx),
        grad_norm=dual_norm(gradient(u, ctx)),
        qc_value=quadratic_form(u, ctx),
        b_inf=b_inf,
    )


__all__ = [
    "base_profile",
    "nonlinear_term",
    "energy",
    "gradient",
    "riesz",
    "dual_norm",
    "apply_helmholtz",
    "jacobian_diagonal",
    "potential",
    "quadratic_form",
    "pencil",
    "generalized_min_eigenvalue",
    "coercivity_constant",
    "limit_energy",
    "decomposition_check",
    "lower_energy_bound",
    "EnergyReport",
    "energy_report",
]
