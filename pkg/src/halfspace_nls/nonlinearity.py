"""Transformed nonlinearity g, its primitive G, the defect H and sampling checks.

With u_c the decaying boundary-layer profile,

    g(x, s) = (u_c + s+)^p - u_c^p
    G(x, s) = ((u_c + s+)^(p+1) - u_c^(p+1) - (p+1) u_c^p s+) / (p+1)
    H(x, s) = g(x, s) s / 2 - G(x, s)
    f(x, s) = |u_c + s|^(p-1) (u_c + s) - u_c^p

All of them depend on x only through u_c(x_N).  The ``*_from_profile``
kernels take u_c values directly so grid code can reuse them; G and H are
evaluated by a power series in s/u_c when that ratio is small, which avoids
the cancellation in the closed form.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .closed_form import ClosedForm1D, critical_threshold, profiles
from .errors import ParameterError

ROUNDOFF = 1e-12
_SERIES_CUTOFF = 0.05
_SERIES_TERMS = 18


def _binomials(p, kmax):
    """Generalized binomial coefficients C(p, j) for j = 0..kmax."""
    out = np.empty(kmax + 1)
    out[0] = 1.0
    for j in range(1, kmax + 1):
        out[j] = out[j - 1] * (p - j + 1) / j
    return out


def _series(x, coeffs, kmin):
    # sum_{k >= kmin} coeffs[k] x^k by Horner
    acc = np.zeros_like(x)
    for k in range(len(coeffs) - 1, kmin - 1, -1):
        acc = acc * x + coeffs[k]
    return acc * x**kmin


def _split(uc, s):
    uc = np.asarray(uc, dtype=float)
    sp = np.maximum(np.asarray(s, dtype=float), 0.0)
    uc, sp = np.broadcast_arrays(uc, sp)
    pos = uc > 0
    with np.errstate(over="ignore"):
        x = np.divide(sp, uc, out=np.full(uc.shape, np.inf), where=pos)
    return uc, sp, x


def g_from_profile(uc, s, p):
    uc, sp, x = _split(uc, s)
    # expm1/log1p only where s/u_c is moderate; past that the direct
    # difference has no cancellation and avoids overflow of the ratio
    small = x <= 1.0
    xs = np.where(small, x, 0.0)
    out = np.where(small, uc**p * np.expm1(p * np.log1p(xs)), (uc + sp) ** p - uc**p)
    return np.where(sp > 0, out, 0.0)


def g_prime_from_profile(uc, s, p):
    """d g / d s for s > 0 (the semismooth choice 0 on s <= 0)."""
    uc, sp, _ = _split(uc, s)
    return np.where(sp > 0, p * (uc + sp) ** (p - 1), 0.0)


def G_from_profile(uc, s, p):
    uc, sp, x = _split(uc, s)
    k = np.arange(_SERIES_TERMS + 1)
    coeffs = np.zeros(_SERIES_TERMS + 1)
    coeffs[2:] = _binomials(p, _SERIES_TERMS)[1:-1] / k[2:]
    small = x < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    series = uc ** (p + 1) * _series(xs, coeffs, 2)
    direct = ((uc + sp) ** (p + 1) - uc ** (p + 1) - (p + 1) * uc**p * sp) / (p + 1)
    return np.where(small, series, direct)


def H_from_profile(uc, s, p):
    uc, sp, x = _split(uc, s)
    k = np.arange(_SERIES_TERMS + 1)
    coeffs = np.zeros(_SERIES_TERMS + 1)
    coeffs[3:] = _binomials(p, _SERIES_TERMS)[2:-1] * (0.5 - 1.0 / k[3:])
    small = x < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    series = uc ** (p + 1) * _series(xs, coeffs, 3)
    direct = 0.5 * g_from_profile(uc, sp, p) * sp - G_from_profile(uc, sp, p)
    return np.where(small, series, direct)


def f_from_profile(uc, s, p):
    v = np.asarray(uc, dtype=float) + np.asarray(s, dtype=float)
    return np.abs(v) ** (p - 1) * v - np.asarray(uc, dtype=float) ** p


@dataclass(frozen=True)
class NonlinearityCtx:
    """Exponent, boundary value and the explicit growth constants.

    ``discrete_profile`` selects, for grid computations, the solution of the
    discretized 1D profile equation instead of the exact closed form (see
    :func:`halfspace_nls.energy.base_profile`).
    """

    p: float
    c: float
    discrete_profile: bool = False
    closed_form: ClosedForm1D = field(init=False, compare=False, repr=False)
    C1: float = field(init=False, compare=False)
    C2: float = field(init=False, compare=False)
    D1: float = field(init=False, compare=False)
    D2: float = field(init=False, compare=False)
    indicator_p_gt_2: bool = field(init=False, compare=False)

    def __post_init__(self):
        p = self.p
        cf = profiles(self.c, p)
        set_ = object.__setattr__
        set_(self, "closed_form", cf)
        set_(self, "C1", 1 + 2 ** (p - 3) * p * (p - 1))
        set_(self, "C2", p * (p - 1) * 2 ** (p - 3) * cf.c_p ** (p - 2))
        set_(self, "D1", p * (p - 1) / (p + 1) * (1 + 2 ** (p - 2)))
        set_(self, "D2", p * 2 ** (p - 2) / (p + 1))
        set_(self, "indicator_p_gt_2", bool(p > 2))

    def u_c(self, xN):
        return self.closed_form.u_c(xN)


def g_value(ctx, xN, s):
    return g_from_profile(ctx.u_c(xN), s, ctx.p)


def G_value(ctx, xN, s):
    return G_from_profile(ctx.u_c(xN), s, ctx.p)


def H_value(ctx, xN, s):
    return H_from_profile(ctx.u_c(xN), s, ctx.p)


def f_value(ctx, xN, s):
    return f_from_profile(ctx.u_c(xN), s, ctx.p)


def kappa_q(q):
    """Constructive constant in (a+b)^q - a^q - b^q >= q a^(q-1) b + kappa a b^(q-1)."""
    if not q > 2:
        raise ParameterError(f"kappa_q needs q > 2, got {q!r}")
    kappa1 = (q - 1) / 2 - 1 / q
    return q * min((q - 2) / (q - 1), kappa1)


@dataclass
class InequalityReport:
    """Outcome of one sampled inequality.

    ``worst_margin`` is the smallest scaled margin (lhs - rhs) / scale over
    the samples, so a report passes iff it is >= -1e-12.
    """

    id: str
    samples: int
    worst_margin: float
    worst_location: dict
    passed: bool

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(id_, margins, scale, locations):
    scaled = np.asarray(margins) / np.asarray(scale)
    idx = int(np.argmin(scaled))
    worst = float(scaled.flat[idx])
    loc = {k: float(np.asarray(v).flat[idx]) for k, v in locations.items()}
    return InequalityReport(id_, int(scaled.size), worst, loc, bool(worst >= -ROUNDOFF))


def verify_elementary_inequality(q, amax=10.0, n=201):
    """Sample (a+b)^q - a^q - b^q - q a^(q-1) b - kappa_q a b^(q-1) >= 0 on [0, amax]^2."""
    if amax < 10 or n < 200:
        raise ParameterError("need amax >= 10 and at least 200 points per axis")
    kappa = kappa_q(q)
    axis = np.linspace(0.0, amax, n)
    a, b = np.meshgrid(axis, axis, indexing="ij")
    lhs = (a + b) ** q - a**q - b**q
    rhs = q * a ** (q - 1) * b + kappa * a * b ** (q - 1)
    return _report(f"elementary_q={q:g}", lhs - rhs, 1 + np.abs(lhs), {"a": a, "b": b})


def verify_growth_bounds(ctx, s_range=(-2.0, 20.0), x_range=(0.0, 15.0), ns=441, nx=61):
    """Check the growth bounds for g, G and the lower bound / monotonicity of H.

    Returns four reports: ``g_growth``, ``G_growth``, ``H_lower``, ``H_monotone``.
    """
    p = ctx.p
    ind = 1.0 if ctx.indicator_p_gt_2 else 0.0
    s_axis = np.union1d(np.linspace(*s_range, ns), [0.0])
    x_axis = np.linspace(*x_range, nx)
    xN, s = np.meshgrid(x_axis, s_axis, indexing="ij")
    uc = ctx.u_c(xN)
    sp = np.maximum(s, 0.0)
    loc = {"xN": xN, "s": s}
    tag = f"[p={p:g},c={ctx.c:.6g}]"

    g = g_from_profile(uc, s, p)
    lin = sp * p * uc ** (p - 1)
    bound = ctx.C1 * sp**p + ind * ctx.C2 * sp**2
    scale = 1 + np.abs(g) + np.abs(bound)
    margin = np.minimum(g - lin, bound - (g - lin))
    reports = [_report("g_growth" + tag, margin, scale, loc)]

    G = G_from_profile(uc, s, p)
    quad = 0.5 * p * sp**2 * uc ** (p - 1)
    bound = ctx.C1 / (p + 1) * sp ** (p + 1) + ind * ctx.C2 / 3 * sp**3
    scale = 1 + np.abs(G) + np.abs(bound)
    margin = np.minimum(G - quad, bound - (G - quad))
    reports.append(_report("G_growth" + tag, margin, scale, loc))

    H = H_from_profile(uc, s, p)
    lower = np.maximum(
        0.0,
        (p - 1) / (2 * (p + 1)) * sp ** (p + 1)
        - uc ** (p - 1) * ctx.D1 * sp**2
        - uc * ind * ctx.D2 * sp**p,
    )
    scale = 1 + np.abs(H) + np.abs(lower)
    reports.append(_report("H_lower" + tag, H - lower, scale, loc))

    dH = np.diff(H, axis=1)
    scale = 1 + np.abs(H[:, 1:])
    reports.append(
        _report("H_monotone" + tag, dH, scale, {"xN": xN[:, 1:], "s": s[:, 1:]})
    )
    return reports


def standard_contexts(ps=(1.5, 2.0, 3.0, 5.0), fractions=(0.5, 0.9)):
    """Contexts for the default sweep: c = fraction * c_p."""
    return [NonlinearityCtx(p, f * critical_threshold(p)) for p in ps for f in fractions]


def growth_asymptotics(ctx, xN, s):
    """g(x, s) / s^p, which tends to 1 as s -> infinity."""
    return g_value(ctx, xN, s) / np.asarray(s, dtype=float) ** ctx.p


__all__ = [
    "NonlinearityCtx",
    "InequalityReport",
    "g_value",
    "G_value",
    "H_value",
    "f_value",
    "kappa_q",
    "verify_elementary_inequality",
    "verify_growth_bounds",
    "standard_contexts",
    "growth_asymptotics",
    "g_from_profile",
    "g_prime_from_profile",
    "G_from_profile",
    "H_from_profile",
    "f_from_profile",
]
