"""Uniform 2-D grids, sampled scalar fields, and finite-difference primitives.

Everything downstream (the solver, the monotone functionals, free-boundary
extraction) works on a ``Grid2D`` plus a ``ScalarField``.  Fields store their
values row-major by y then x, so ``values[j, i]`` lives at
``(x_min + i*h, y_min + j*h)``.  All operations here are pure functions on
immutable value types and are safe to evaluate concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Relative tolerance for the square-spacing check in build_grid.
SPACING_RTOL = 1e-12

# Snap tolerance (fraction of a cell) used by interpolation so that exact
# node coordinates reproduce stored node values bit-for-bit.
_NODE_SNAP = 1e-12


def float_repr(v: float) -> str:
    """Canonical 17-significant-digit text form used in every artifact."""
    v = float(v)
    if v == 0.0:
        v = 0.0  # normalize -0.0
    return format(v, ".17g")


@dataclass(frozen=True)
class Grid2D:
    """Uniform vertex-centered grid on [x_min, x_max] x [y_min, y_max].

    The spacing ``h`` is identical along both axes; ``build_grid`` refuses
    rectangles whose requested node counts would break that.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int
    h: float

    @property
    def shape(self) -> tuple[int, int]:
        """Array shape (ny, nx); y is the slow axis."""
        return (self.ny, self.nx)

    def x(self, i: int) -> float:
        return self.x_min + i * self.h

    def y(self, j: int) -> float:
        return self.y_min + j * self.h

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y_min + self.h * np.arange(self.ny)

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.xs, self.ys)

    def is_interior(self, i: int, j: int) -> bool:
        return 0 < i < self.nx - 1 and 0 < j < self.ny - 1

    def contains(self, x: float, y: float) -> bool:
        sx = _NODE_SNAP * (self.x_max - self.x_min)
        sy = _NODE_SNAP * (self.y_max - self.y_min)
        return (
            self.x_min - sx <= x <= self.x_max + sx
            and self.y_min - sy <= y <= self.y_max + sy
        )

    def contains_ball(self, center: tuple[float, float], r: float) -> bool:
        cx, cy = center
        return (
            cx - r >= self.x_min
            and cx + r <= self.x_max
            and cy - r >= self.y_min
            and cy + r <= self.y_max
        )


def build_grid(
    x_min: float, x_max: float, y_min: float, y_max: float, nx: int, ny: int
) -> Grid2D:
    """Construct a uniform grid; rejects non-square spacing and nx/ny < 3."""
    if not (x_max > x_min and y_max > y_min):
        raise ValueError("grid bounds must satisfy x_min < x_max and y_min < y_max")
    if nx < 3 or ny < 3:
        raise ValueError(f"need at least 3 nodes per axis, got nx={nx} ny={ny}")
    hx = (x_max - x_min) / (nx - 1)
    hy = (y_max - y_min) / (ny - 1)
    if abs(hx - hy) > SPACING_RTOL * max(abs(hx), abs(hy)):
        raise ValueError(f"spacing mismatch: hx={hx!r} hy={hy!r}")
    return Grid2D(float(x_min), float(x_max), float(y_min), float(y_max), nx, ny, hx)


@dataclass(frozen=True)
class ScalarField:
    """Nodal values on a Grid2D.  values[j, i] sits at (x(i), y(j))."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError(f"value shape {v.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)


def sample(grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> ScalarField:
    """Sample fn(X, Y) at every node; fn must accept ndarray arguments."""
    X, Y = grid.meshgrid()
    return ScalarField(grid, np.asarray(fn(X, Y), dtype=float))


def _require_interior(grid: Grid2D, i: int, j: int) -> None:
    if not grid.is_interior(i, j):
        raise ValueError(f"node ({i}, {j}) is not interior on a {grid.nx}x{grid.ny} grid")


def discrete_laplacian(f: ScalarField, i: int, j: int) -> float:
    """Five-point Laplacian at interior node (i, j); exact on cubics."""
    _require_interior(f.grid, i, j)
    v = f.values
    h2 = f.grid.h * f.grid.h
    return (v[j, i - 1] + v[j, i + 1] + v[j - 1, i] + v[j + 1, i] - 4.0 * v[j, i]) / h2


def laplacian_interior(f: ScalarField) -> np.ndarray:
    """Five-point Laplacian on the full interior block, shape (ny-2, nx-2)."""
    v = f.values
    h2 = f.grid.h * f.grid.h
    return (
        v[1:-1, :-2] + v[1:-1, 2:] + v[:-2, 1:-1] + v[2:, 1:-1] - 4.0 * v[1:-1, 1:-1]
    ) / h2


def gradient_central(f: ScalarField, i: int, j: int) -> np.ndarray:
    """Central-difference gradient at interior node (i, j)."""
    _require_interior(f.grid, i, j)
    v = f.values
    two_h = 2.0 * f.grid.h
    gx = (v[j, i + 1] - v[j, i - 1]) / two_h
    gy = (v[j + 1, i] - v[j - 1, i]) / two_h
    return np.array([gx, gy])


def gradient_fields(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Gradient components as full fields.

    Central differences in the interior; second-order one-sided stencils on
    the boundary ring so the fields are defined everywhere (the functional
    quadratures interpolate them near domain edges).
    """
    v = f.values
    h = f.grid.h
    gx = np.empty_like(v)
    gy = np.empty_like(v)
    gx[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * h)
    gx[:, 0] = (-3.0 * v[:, 0] + 4.0 * v[:, 1] - v[:, 2]) / (2.0 * h)
    gx[:, -1] = (3.0 * v[:, -1] - 4.0 * v[:, -2] + v[:, -3]) / (2.0 * h)
    gy[1:-1, :] = (v[2:, :] - v[:-2, :]) / (2.0 * h)
    gy[0, :] = (-3.0 * v[0, :] + 4.0 * v[1, :] - v[2, :]) / (2.0 * h)
    gy[-1, :] = (3.0 * v[-1, :] - 4.0 * v[-2, :] + v[-3, :]) / (2.0 * h)
    return ScalarField(f.grid, gx), ScalarField(f.grid, gy)


def _locate(grid: Grid2D, x: np.ndarray, y: np.ndarray):
    """Cell indices and local coordinates for bilinear interpolation.

    Local coordinates are snapped to {0, 1} when within _NODE_SNAP of a node
    so grid nodes reproduce their stored values exactly.
    """
    tx = (x - grid.x_min) / grid.h
    ty = (y - grid.y_min) / grid.h
    bad = (tx < -_NODE_SNAP) | (tx > grid.nx - 1 + _NODE_SNAP) \
        | (ty < -_NODE_SNAP) | (ty > grid.ny - 1 + _NODE_SNAP)
    if np.any(bad):
        n = int(np.count_nonzero(bad))
        raise ValueError(f"{n} interpolation point(s) outside grid bounds")
    i0 = np.clip(np.floor(tx).astype(int), 0, grid.nx - 2)
    j0 = np.clip(np.floor(ty).astype(int), 0, grid.ny - 2)
    fx = tx - i0
    fy = ty - j0
    # snap: carry near-1 fractions onto the next node, zero out near-0 ones
    up_x = fx > 1.0 - _NODE_SNAP
    up_y = fy > 1.0 - _NODE_SNAP
    i0 = np.where(up_x & (i0 < grid.nx - 2), i0 + 1, i0)
    j0 = np.where(up_y & (j0 < grid.ny - 2), j0 + 1, j0)
    fx = tx - i0
    fy = ty - j0
    fx = np.where(np.abs(fx) < _NODE_SNAP, 0.0, fx)
    fy = np.where(np.abs(fy) < _NODE_SNAP, 0.0, fy)
    fx = np.where(fx > 1.0 - _NODE_SNAP, 1.0, fx)
    fy = np.where(fy > 1.0 - _NODE_SNAP, 1.0, fy)
    return i0, j0, fx, fy


def interpolate_many(f: ScalarField, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Bilinear interpolation at an array of points inside the grid."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    i0, j0, fx, fy = _locate(f.grid, x, y)
    v = f.values
    v00 = v[j0, i0]
    v10 = v[j0, i0 + 1]
    v01 = v[j0 + 1, i0]
    v11 = v[j0 + 1, i0 + 1]
    # symmetric weights keep fx, fy in {0, 1} bit-exact at the nodes
    bottom = (1.0 - fx) * v00 + fx * v10
    top = (1.0 - fx) * v01 + fx * v11
    return (1.0 - fy) * bottom + fy * top


def interpolate(f: ScalarField, p: tuple[float, float]) -> float:
    """Bilinear interpolation at a single point; exact at grid nodes."""
    return float(interpolate_many(f, np.array([p[0]]), np.array([p[1]]))[0])


def boundary_mask(grid: Grid2D) -> np.ndarray:
    m = np.zeros(grid.shape, dtype=bool)
    m[0, :] = m[-1, :] = True
    m[:, 0] = m[:, -1] = True
    return m


@dataclass(frozen=True)
class BoundaryMap:
    """Dirichlet data: values on exactly the boundary ring of a grid.

    Stored as a full (ny, nx) array whose interior entries are forced to
    zero, which keeps the solver's assembly trivial.
    """

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.shape:
            raise ValueError("boundary map shape mismatch")
        if not np.all(np.isfinite(v)):
            raise ValueError("boundary values must be finite")
        v = v.copy()
        v[1:-1, 1:-1] = 0.0
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "BoundaryMap":
        X, Y = grid.meshgrid()
        vals = np.asarray(fn(X, Y), dtype=float)
        out = np.zeros(grid.shape)
        m = boundary_mask(grid)
        out[m] = vals[m]
        return cls(grid, out)

    def perturbed(self, fn: Callable[[np.ndarray, np.ndarray], np.ndarray], amplitude: float) -> "BoundaryMap":
        """New map with amplitude * fn(x, y) added on the boundary ring."""
        X, Y = self.grid.meshgrid()
        out = self.values.copy()
        m = boundary_mask(self.grid)
        out[m] += amplitude * np.asarray(fn(X, Y), dtype=float)[m]
        return BoundaryMap(self.grid, out)

    def sup_diff(self, other: "BoundaryMap") -> float:
        if other.grid != self.grid:
            raise ValueError("boundary maps live on different grids")
        m = boundary_mask(self.grid)
        return float(np.max(np.abs(self.values[m] - other.values[m])))


def dump_field_csv(f: ScalarField, path: str) -> None:
    """Write `x,y,value` rows for every node, row-major by y then x."""
    g = f.grid
    lines = ["x,y,value"]
    xs, ys = g.xs, g.ys
    v = f.values
    for j in range(g.ny):
        yj = ys[j]
        for i in range(g.nx):
            lines.append(f"{float_repr(xs[i])},{float_repr(yj)},{float_repr(v[j, i])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
