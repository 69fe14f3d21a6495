"""Uniform mesh on the truncated half-strip [-Lx, Lx] x [0, Ly].

Unknowns live on interior nodes only; every boundary node is a homogeneous
Dirichlet node.  Values are stored as arrays of shape ``(nx, ny)`` with the
first index running along x1 and the second along x2, and flattened in C
order, so x2 is the fast index of every sparse operator built here.
"""
from __future__ import annotations

import functools
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import GridMismatchError, ParameterError

DEFAULT_LX = 24.0
DEFAULT_LY = 24.0
DEFAULT_H = 0.125

_HEADER = struct.Struct("<iiddd")


def _count(length, h, what):
    n = length / h
    k = round(n)
    if k < 2 or abs(n - k) > 1e-9 * max(1.0, n):
        raise ParameterError(f"{what} = {length:g} is not a multiple (>= 2) of h = {h:g}")
    return int(k) - 1


@dataclass(frozen=True)
class Grid2D:
    """Interior-node mesh with spacing ``h``; ``nx = 2 Lx / h - 1`` and ``ny = Ly / h - 1``."""

    Lx: float = DEFAULT_LX
    Ly: float = DEFAULT_LY
    h: float = DEFAULT_H
    nx: int = field(init=False)
    ny: int = field(init=False)

    def __post_init__(self):
        for name in ("Lx", "Ly", "h"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "nx", _count(2 * self.Lx, self.h, "2*Lx"))
        object.__setattr__(self, "ny", _count(self.Ly, self.h, "Ly"))

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def size(self):
        return self.nx * self.ny

    @property
    def x1(self):
        return -self.Lx + self.h * np.arange(1, self.nx + 1)

    @property
    def x2(self):
        return self.h * np.arange(1, self.ny + 1)

    def mesh(self):
        """Coordinate arrays ``(X1, X2)`` of shape ``(nx, ny)``."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def zeros(self):
        return Field(self, np.zeros(self.shape))

    def refined(self):
        return Grid2D(self.Lx, self.Ly, self.h / 2)


class Field:
    """Real grid function on the interior nodes of ``grid``."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        values = np.array(values, dtype=float).reshape(grid.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.grid = grid
        self.values = values

    @classmethod
    def from_flat(cls, grid, flat):
        return cls(grid, np.asarray(flat).reshape(grid.shape))

    @property
    def flat(self):
        return self.values.reshape(-1)

    def _other(self, other):
        if isinstance(other, Field):
            check_same_grid(self, other)
            return other.values
        return other

    def __add__(self, other):
        return Field(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Field(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return Field(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return Field(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Field(self.grid, self.values / self._other(other))

    def __neg__(self):
        return Field(self.grid, -self.values)

    def positive_part(self):
        return Field(self.grid, np.maximum(self.values, 0.0))

    def mirrored(self):
        """Reflection x1 -> -x1."""
        return Field(self.grid, self.values[::-1, :])

    def __repr__(self):
        return f"Field(nx={self.grid.nx}, ny={self.grid.ny}, max={self.values.max():.6g})"


def check_same_grid(*fields):
    first = fields[0].grid
    for f in fields[1:]:
        if f.grid != first:
            raise GridMismatchError(f"fields live on different grids: {first} vs {f.grid}")
    return first


def laplacian_apply(u):
    """Five-point -Delta_h u with zero ghost values."""
    g = u.grid
    w = np.pad(u.values, 1)
    c = w[1:-1, 1:-1]
    lap = (4 * c - w[:-2, 1:-1] - w[2:, 1:-1] - w[1:-1, :-2] - w[1:-1, 2:]) / g.h**2
    return Field(g, lap)


def _second_difference(n, h):
    main = np.full(n, 2.0)
    off = np.full(n - 1, -1.0)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr") / h**2


@functools.lru_cache(maxsize=8)
def dirichlet_laplacian(grid):
    """Sparse -Delta_h on the flattened interior unknowns."""
    tx = _second_difference(grid.nx, grid.h)
    ty = _second_difference(grid.ny, grid.h)
    return (sp.kron(tx, sp.identity(grid.ny)) + sp.kron(sp.identity(grid.nx), ty)).tocsc()


@functools.lru_cache(maxsize=8)
def helmholtz_matrix(grid):
    """B = -Delta_h + I."""
    return (dirichlet_laplacian(grid) + sp.identity(grid.size, format="csc")).tocsc()


@functools.lru_cache(maxsize=4)
def helmholtz_factor(grid):
    """Sparse LU of B, shared by every solve on this grid."""
    return spla.splu(helmholtz_matrix(grid))


def inner(u, v):
    check_same_grid(u, v)
    return float(u.grid.h**2 * np.sum(u.values * v.values))


def l2_norm(u):
    return float(np.sqrt(inner(u, u)))


def h1_norm_sq(u):
    """Discrete int |grad u|^2 + u^2; equals <(-Delta_h + I) u, u> h^2 exactly."""
    h = u.grid.h
    w = np.pad(u.values, 1)
    grad_sq = np.sum(np.diff(w, axis=0) ** 2) + np.sum(np.diff(w, axis=1) ** 2)
    return float(grad_sq + h**2 * np.sum(u.values**2))


def lp_norm(u, q):
    if not q >= 1:
        raise ParameterError(f"lp_norm needs q >= 1, got {q!r}")
    return float((u.grid.h**2 * np.sum(np.abs(u.values) ** q)) ** (1.0 / q))


def embed_profile(grid, f):
    """Field with values f(x2), constant along x1."""
    column = np.broadcast_to(np.asarray(f(grid.x2), dtype=float), (grid.ny,))
    return Field(grid, np.broadcast_to(column, grid.shape))


def write_csv(u, path):
    """Write ``x1,x2,value`` rows, one per interior node."""
    X1, X2 = u.grid.mesh()
    table = np.column_stack([X1.ravel(), X2.ravel(), u.flat])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, table, delimiter=",", header="x1,x2,value", comments="", fmt="%.17g")


def write_binary(u, path):
    """Header ``<iiddd`` (nx, ny, h, Lx, Ly) followed by row-major little-endian doubles."""
    g = u.grid
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(g.nx, g.ny, g.h, g.Lx, g.Ly))
        fh.write(np.ascontiguousarray(u.values, dtype="<f8").tobytes())


def read_binary(path):
    with open(path, "rb") as fh:
        nx, ny, h, Lx, Ly = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.frombuffer(fh.read(), dtype="<f8")
    grid = Grid2D(Lx, Ly, h)
    if (grid.nx, grid.ny) != (nx, ny) or data.size != nx * ny:
        raise ValueError(f"corrupt field file {path}")
    return Field(grid, data.reshape(nx, ny))


__all__ = [
    "Grid2D",
    "Field",
    "check_same_grid",
    "laplacian_apply",
    "dirichlet_laplacian",
    "helmholtz_matrix",
    "helmholtz_factor",
    "inner",
    "l2_norm",
    "h1_norm_sq",
    "lp_norm",
    "embed_profile",
    "write_csv",
    "write_binary",
    "read_binary",
]
