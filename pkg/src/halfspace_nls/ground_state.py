"""Radial ground state of -Delta psi + psi = psi^p in one and two dimensions.

The profile solves psi'' + (N-1)/rho psi' - psi + psi^p = 0 with psi'(0) = 0
and is found by bisection on psi(0): a shot that crosses zero started too
high, one whose slope turns back up started too low.  Past the point where
the two bracketing shots separate (or psi drops below ``TAIL_SWITCH``) the
table continues with the decaying solution of the linearized equation,
psi(rho_c) K(rho) / K(rho_c) with K(rho) = rho^-nu K_nu(rho), nu = N/2 - 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.special import kve

from .closed_form import critical_threshold
from .energy import energy, limit_energy
from .errors import ConvergenceError, ParameterError, SupportOverflowError
from .grid import Field
from .nonlinearity import kappa_q

TAIL_SWITCH = 1e-6
K_SAFETY = 1.1
_SHOOT_RMAX = 80.0
_UPPER_LIMIT = 64.0


def _sphere_area(N):
    return 2.0 if N == 1 else 2.0 * math.pi


def _rhs(N, p):
    def f(rho, y):
        psi, dpsi = y
        return [dpsi, -(N - 1) / rho * dpsi + psi - abs(psi) ** (p - 1) * psi]

    return f


def _start(psi0, N, p, rho0):
    # series start around the coordinate singularity
    a = (psi0 - psi0**p) / (2 * N)
    return [psi0 + a * rho0**2, 2 * a * rho0]


def _shoot(psi0, N, p, rho0, dense=False):
    """Integrate one shot; returns (+1 overshoot | -1 undershoot | 0 undecided, solution)."""

    def crossed(rho, y):
        return y[0]

    crossed.terminal = True
    crossed.direction = -1

    def turned(rho, y):
        return y[1]

    turned.terminal = True
    turned.direction = 1

    y0 = _start(psi0, N, p, rho0)
    if y0[1] >= 0:
        return -1, None
    sol = solve_ivp(
        _rhs(N, p),
        (rho0, _SHOOT_RMAX),
        y0,
        method="DOP853",
        rtol=1e-12,
        atol=1e-16,
        events=(crossed, turned),
        dense_output=dense,
    )
    if sol.t_events[0].size:
        return 1, sol
    if sol.t_events[1].size:
        return -1, sol
    return 0, sol


def _bracket(p, N, rho0):
    cp = critical_threshold(p)
    lo = cp * (1 - 1e-3) if N == 1 else cp
    hi = 4.0
    if _shoot(lo, N, p, rho0)[0] != -1:
        raise ConvergenceError(f"shooting bracket failure: psi(0) = {lo:.6g} does not undershoot")
    while _shoot(hi, N, p, rho0)[0] != 1:
        hi *= 2
        if hi > _UPPER_LIMIT:
            raise ConvergenceError(
                f"shooting bracket failure: no overshoot on [{lo:.6g}, {_UPPER_LIMIT:g}]"
            )
    return lo, hi


def _kernel(nu, rho):
    """rho^-nu K_nu(rho) and its derivative -rho^-nu K_{nu+1}(rho), both times e^rho."""
    rho = np.asarray(rho, dtype=float)
    return rho**-nu * kve(nu, rho), -(rho**-nu) * kve(nu + 1, rho)


@dataclass(frozen=True, eq=False)
class RadialGroundState:
    """Tabulated psi on [0, R_max] with spacing ``drho``.

    ``C_fit`` is the amplitude in psi ~ C_fit rho^-(N-1)/2 e^-rho read off
    the tail; it is a diagnostic, never used in solver logic.
    """

    p: float
    N: int
    R_max: float
    drho: float
    psi0: float
    rho_cut: float
    C_fit: float
    rho: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    dpsi: np.ndarray = field(repr=False)
    _spline: CubicSpline = field(repr=False)

    def __call__(self, r):
        """Evaluate psi at radii ``r`` (tail formula past R_max)."""
        r = np.asarray(r, dtype=float)
        inside = r <= self.R_max
        out = np.empty_like(r)
        out[inside] = self._spline(r[inside])
        if np.any(~inside):
            out[~inside] = self._tail(r[~inside])
        return out if out.ndim else float(out)

    def derivative(self, r):
        return self._spline(np.asarray(r, dtype=float), 1)

    def _tail(self, r):
        nu = self.N / 2 - 1
        k_r, _ = _kernel(nu, r)
        k_c, _ = _kernel(nu, self.rho_cut)
        return self.psi_at_cut * k_r / k_c * np.exp(-(r - self.rho_cut))

    @property
    def psi_at_cut(self):
        return float(self._spline(self.rho_cut))

    def integrate(self, values):
        """int over R^N of a radial function sampled on ``self.rho``."""
        return _sphere_area(self.N) * simpson(values * self.rho ** (self.N - 1), x=self.rho)

    def to_csv(self, path):
        np.savetxt(
            path,
            np.column_stack([self.rho, self.psi]),
            delimiter=",",
            header="rho,psi",
            comments="",
            fmt="%.17g",
        )


def radial_ground_state(p, N=2, R_max=30.0, drho=1e-3):
    if not (np.isfinite(p) and p > 1):
        raise ParameterError(f"exponent p must be > 1, got {p!r}")
    if N not in (1, 2):
        raise ParameterError(f"dimension N must be 1 or 2, got {N!r}")
    if R_max < 20:
        raise ParameterError("R_max must be at least 20")
    rho0 = drho
    lo, hi = _bracket(p, N, rho0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        verdict, _ = _shoot(mid, N, p, rho0)
        if verdict == 0:
            lo = hi = mid
            break
        if verdict > 0:
            hi = mid
        else:
            lo = mid
    psi0 = 0.5 * (lo + hi)

    n = int(round(R_max / drho))
    rho = drho * np.arange(n + 1)
    _, s_lo = _shoot(lo, N, p, rho0, dense=True)
    _, s_hi = _shoot(hi, N, p, rho0, dense=True)
    t_end = min(s_lo.t[-1], s_hi.t[-1])
    body = rho[(rho >= rho0) & (rho <= t_end)]
    y_lo, y_hi = s_lo.sol(body), s_hi.sol(body)
    psi_b = 0.5 * (y_lo[0] + y_hi[0])
    dpsi_b = 0.5 * (y_lo[1] + y_hi[1])
    bad = (psi_b < TAIL_SWITCH) | (np.abs(y_lo[0] - y_hi[0]) > 1e-3 * np.abs(psi_b))
    cut = int(np.argmax(bad)) if bad.any() else body.size - 1
    rho_cut = float(body[cut])

    psi = np.empty_like(rho)
    dpsi = np.empty_like(rho)
    head = rho < rho0
    a = (psi0 - psi0**p) / (2 * N)
    psi[head] = psi0 + a * rho[head] ** 2
    dpsi[head] = 2 * a * rho[head]
    k0 = int(np.count_nonzero(head))
    psi[k0 : k0 + cut + 1] = psi_b[: cut + 1]
    dpsi[k0 : k0 + cut + 1] = dpsi_b[: cut + 1]
    nu = N / 2 - 1
    rest = rho[k0 + cut + 1 :]
    k_r, dk_r = _kernel(nu, rest)
    k_c, _ = _kernel(nu, rho_cut)
    scale = psi_b[cut] / k_c * np.exp(-(rest - rho_cut))
    psi[k0 + cut + 1 :] = scale * k_r
    dpsi[k0 + cut + 1 :] = scale * dk_r
    # amplitude of rho^-(N-1)/2 e^-rho: K_nu(rho) rho^-nu ~ sqrt(pi/2) rho^-(N-1)/2 e^-rho
    C_fit = float(psi_b[cut] / (k_c * math.exp(-rho_cut)) * math.sqrt(math.pi / 2))

    spline = CubicSpline(rho, psi, bc_type=((1, 0.0), "not-a-knot"))
    return RadialGroundState(
        p=float(p),
        N=N,
        R_max=float(rho[-1]),
        drho=float(drho),
        psi0=float(psi0),
        rho_cut=rho_cut,
        C_fit=C_fit,
        rho=rho,
        psi=psi,
        dpsi=dpsi,
        _spline=spline,
    )


def h1_norm_sq_radial(gs):
    return gs.integrate(gs.dpsi**2 + gs.psi**2)


def lp_integral(gs, q):
    """int psi^q over R^N."""
    return gs.integrate(gs.psi**q)


def ground_level(gs):
    """b_inf = (p-1) / (2(p+1)) int psi^(p+1)."""
    return (gs.p - 1) / (2 * (gs.p + 1)) * lp_integral(gs, gs.p + 1)


def energy_direct(gs):
    """E_inf(psi) from its definition, as an independent check of ``ground_level``."""
    return 0.5 * h1_norm_sq_radial(gs) - lp_integral(gs, gs.p + 1) / (gs.p + 1)


def nehari_defect(gs):
    """Relative gap between int |grad psi|^2 + psi^2 and int psi^(p+1)."""
    lhs = h1_norm_sq_radial(gs)
    rhs = lp_integral(gs, gs.p + 1)
    return abs(lhs - rhs) / rhs


def decay_slope(gs, window=(10.0, 20.0)):
    """Slope of log psi + rho + (N-1)/2 log rho on ``window``; near zero for the right rate."""
    m = (gs.rho >= window[0]) & (gs.rho <= window[1])
    r = gs.rho[m]
    y = np.log(gs.psi[m]) + r + 0.5 * (gs.N - 1) * np.log(r)
    return float(np.polyfit(r, y, 1)[0])


def ball_integral(gs, f, radius):
    """int over B_radius(0) of f(psi) for radial psi."""
    m = gs.rho <= radius + 1e-12
    return _sphere_area(gs.N) * simpson(f(gs.psi[m]) * gs.rho[m] ** (gs.N - 1), x=gs.rho[m])


def epsilon(gs, r):
    return float(gs(r))


def bump_test_function(gs, r, grid):
    """psi_r(x) = (psi(|x - r e_2|) - psi(r))^+ on ``grid``; returns ``(field, eps_r)``."""
    if gs.N != 2:
        raise ParameterError("bump test functions live on the two-dimensional grid")
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r!r}")
    if r > grid.Lx or 2 * r > grid.Ly:
        raise SupportOverflowError(
            f"ball of radius {r:g} about (0, {r:g}) leaves [-{grid.Lx:g}, {grid.Lx:g}] x [0, {grid.Ly:g}]"
        )
    eps = epsilon(gs, r)
    X1, X2 = grid.mesh()
    dist = np.hypot(X1, X2 - r)
    values = np.zeros(grid.shape)
    inside = dist < r
    values[inside] = np.maximum(gs(dist[inside]) - eps, 0.0)
    return Field(grid, values), eps


def endpoint_scale(gs, safety=K_SAFETY):
    """k with E(k psi_r) < 0 for large r; ``safety`` times the threshold in the proof."""
    p = gs.p
    eps1 = epsilon(gs, 1.0)
    denom = ball_integral(gs, lambda s: (s - eps1) ** (p + 1), 1.0)
    return safety * ((p + 1) * h1_norm_sq_radial(gs) / (2 * denom)) ** (1 / (p - 1))


@dataclass
class EnergyEstimateReport:
    """Outcome of the scan over radii and ray parameters."""

    b_inf: float
    k: float
    radii: list
    max_energy: dict
    endpoint_energy: dict
    level_margin: dict
    upper_margin: dict
    gap_margin: dict
    failures: list
    passed: bool

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def verify_energy_estimates(gs, ctx, grid, radii=(8.0, 10.0, 12.0, 14.0), nt=64, margin=1e-6):
    """Scan E(t psi_r) for t in [0, k] and the listed radii.

    Checks E(t psi_r) < b_inf - margin and E(k psi_r) < 0; also reports,
    per radius, the smallest slack in the two intermediate estimates
    (upper bound on E_inf_plus, lower bound on E_inf_plus - E) with C_fit
    standing in for the unknown decay constant.
    """
    if nt < 50:
        raise ParameterError("need at least 50 ray samples")
    p = ctx.p
    b_inf = ground_level(gs)
    k = endpoint_scale(gs)
    ts = np.linspace(0.0, k, nt)
    C1 = p * gs.C_fit / (p + 1) * lp_integral(gs, p)
    C2 = kappa_q(p + 1) * ctx.closed_form.m1 / 4 * ball_integral(gs, lambda s: s**p, 1.0)
    out = dict(max_energy={}, endpoint_energy={}, level_margin={}, upper_margin={}, gap_margin={})
    failures = []
    for r in radii:
        bump, _ = bump_test_function(gs, r, grid)
        key = f"{r:g}"
        energies, upper, gap = [], [], []
        decay = math.exp(-r) * r ** (-(gs.N - 1) / 2)
        for t in ts:
            u = t * bump
            e = energy(u, ctx)
            e_plus = limit_energy(u, p)[0]
            energies.append(e)
            upper.append(b_inf + C1 * decay * t ** (p + 1) - e_plus)
            gap.append(e_plus - e - C2 * math.exp(-r) * t**p)
            if not e < b_inf - margin:
                failures.append({"r": r, "t": float(t), "E": e, "check": "E < b_inf"})
        e_k = energies[-1]
        if not e_k < 0:
            failures.append({"r": r, "t": float(k), "E": e_k, "check": "E(k psi_r) < 0"})
        out["max_energy"][key] = float(max(energies))
        out["endpoint_energy"][key] = float(e_k)
        out["level_margin"][key] = float(b_inf - max(energies))
        out["upper_margin"][key] = float(min(upper))
        out["gap_margin"][key] = float(min(gap))
    return EnergyEstimateReport(
        b_inf=float(b_inf),
        k=float(k),
        radii=[float(r) for r in radii],
        failures=failures,
        passed=not failures,
        **out,
    )


__all__ = [
    "RadialGroundState",
    "radial_ground_state",
    "ground_level",
    "energy_direct",
    "nehari_defect",
    "decay_slope",
    "h1_norm_sq_radial",
    "lp_integral",
    "ball_integral",
    "epsilon",
    "bump_test_function",
    "endpoint_scale",
    "EnergyEstimateReport",
    "verify_energy_estimates",
]
