"""Uniform tensor grids, sampled space-time fields, and deterministic quadrature.

The spatial domain is the box [-L, L]^n truncating full space; every
measurement that depends on L is expected to pass the :func:`extent_audit`
(recompute on a 1.5x wider box, require <0.1% relative change) so truncation
error is observed rather than assumed.

Quadrature conventions
----------------------
* Grid points are x_j = -L + j*dx, j = 0..N-1 (bit-reproducible order); the
  cell of x_j is [x_j - dx/2, x_j + dx/2].
* Ball integrals use uniform weights with boundary cells clipped by the exact
  cell/ball overlap fraction in 1D and by cell-center membership in 2D (first
  order at the rim, acceptable under the >=1% tolerances of the experiments).
* All reductions go through :func:`caloric.util.det_sum`, a correctly rounded
  compensated sum, so results are independent of evaluation schedule.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Callable, Literal

import numpy as np
from numpy.typing import NDArray

from .errors import (
    CoverageError,
    DataError,
    DomainTooSmallError,
    InsufficientResolutionError,
)
from .optrack import track
from .util import det_sum, fmt_float

BoundaryMode = Literal["periodic", "zero_padded"]

_COVER_TOL = 1e-9


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform tensor grid on [-L, L]^dim with spacing dx.

    Points per axis equal round(2L/dx) and 2L/dx must be an integer to
    round-off, so the periodic wrap x_{N-1} + dx == L is exact.
    """

    dim: int
    half_extent: float
    spacing: float
    boundary_mode: BoundaryMode = "periodic"

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"SpatialGrid invariant violated: dim must be 1 or 2, got {self.dim}")
        if not (self.half_extent > 0 and self.spacing > 0):
            raise ValueError("SpatialGrid invariant violated: half_extent and spacing must be positive")
        if not self.spacing < self.half_extent / 4:
            raise ValueError("SpatialGrid invariant violated: need spacing < half_extent/4")
        ratio = 2.0 * self.half_extent / self.spacing
        n = round(ratio)
        if abs(ratio - n) > 1e-6 * max(1.0, n):
            raise ValueError(
                "SpatialGrid invariant violated: 2L/dx must be integral "
                f"(got {ratio!r}); build with SpatialGrid.make to avoid this"
            )
        if n < 8:
            raise ValueError("SpatialGrid invariant violated: need >= 8 points per axis")
        if self.boundary_mode not in ("periodic", "zero_padded"):
            raise ValueError(f"unknown boundary_mode {self.boundary_mode!r}")

    @classmethod
    def make(cls, dim: int, half_extent: float, points_per_axis: int,
             boundary_mode: BoundaryMode = "periodic") -> "SpatialGrid":
        """Grid with exactly *points_per_axis* points per axis."""
        return cls(dim, half_extent, 2.0 * half_extent / points_per_axis, boundary_mode)

    @property
    def points_per_axis(self) -> int:
        return round(2.0 * self.half_extent / self.spacing)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dim

    @property
    def n_points(self) -> int:
        return self.points_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @cached_property
    def axis(self) -> NDArray[np.float64]:
        """The 1D coordinate axis -L + j*dx, j = 0..N-1 (shared by all axes)."""
        x = -self.half_extent + np.arange(self.points_per_axis, dtype=float) * self.spacing
        x.flags.writeable = False
        return x

    def meshgrid(self) -> tuple[NDArray[np.float64], ...]:
        """Coordinate arrays of shape ``self.shape`` (indexing='ij')."""
        return tuple(np.meshgrid(*([self.axis] * self.dim), indexing="ij"))

    def refined(self, factor: int = 2) -> "SpatialGrid":
        """Same box, spacing divided by *factor*."""
        return replace(self, spacing=self.spacing / factor)

    def enlarged(self, factor: float = 1.5) -> "SpatialGrid":
        """Wider box at identical spacing (for extent audits)."""
        n_new = round(self.points_per_axis * factor / 2) * 2
        return SpatialGrid(self.dim, n_new * self.spacing / 2.0, self.spacing, self.boundary_mode)


@dataclass(frozen=True)
class StripSpec:
    """Interior time strip (a, b); the size condition is measured on these."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (0.0 < self.a < self.b):
            raise ValueError(f"StripSpec invariant violated: need 0 < a < b, got a={self.a}, b={self.b}")

    @property
    def width(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class SpaceTimeField:
    """Samples u(t_i, x_j) of a solution on a grid and a strictly increasing t-ladder."""

    grid: SpatialGrid
    times: NDArray[np.float64]
    values: NDArray[np.float64]
    label: str = ""

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.size == 0:
            raise DataError("times must be a non-empty 1D array")
        if not np.all(times > 0):
            raise DataError("SpaceTimeField invariant violated: all times must be > 0")
        if not np.all(np.diff(times) > 0):
            raise DataError("SpaceTimeField invariant violated: times must be strictly increasing")
        if values.shape != (times.size, *self.grid.shape):
            raise DataError(
                f"values shape {values.shape} inconsistent with "
                f"{times.size} times and grid shape {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise DataError("SpaceTimeField invariant violated: all values must be finite")
        times.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def n_times(self) -> int:
        return int(self.times.size)

    def slice_at(self, t: float, tol: float = 1e-9) -> NDArray[np.float64]:
        """Spatial slice at sample time t (linear interpolation between samples)."""
        times = self.times
        if t < times[0] - tol or t > times[-1] + tol:
            raise CoverageError(f"time {t} outside sampled range [{times[0]}, {times[-1]}]")
        idx = int(np.searchsorted(times, t))
        if idx < times.size and abs(times[idx] - t) <= tol:
            return self.values[idx]
        if idx > 0 and abs(times[idx - 1] - t) <= tol:
            return self.values[idx - 1]
        lo, hi = idx - 1, idx
        w = (t - times[lo]) / (times[hi] - times[lo])
        return (1.0 - w) * self.values[lo] + w * self.values[hi]

    def scaled(self, c: float, label: str | None = None) -> "SpaceTimeField":
        return SpaceTimeField(self.grid, self.times, c * np.asarray(self.values),
                              label if label is not None else self.label)


def ball_weights(grid: SpatialGrid, center, radius: float) -> NDArray[np.float64]:
    """Quadrature weights for the ball B(center, radius).

    1D: exact cell/interval overlap lengths.  2D: cell-center membership
    times the cell area.  Raises DomainTooSmallError when the ball is not
    covered by the grid's cells.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if center.size != grid.dim:
        raise ValueError(f"center has {center.size} coordinates on a dim-{grid.dim} grid")
    if radius > grid.half_extent + _COVER_TOL:
        raise DomainTooSmallError(
            f"ball radius {radius} exceeds grid half-extent {grid.half_extent}")
    h = grid.spacing
    L = grid.half_extent
    for ci in center:
        if abs(ci) + radius > L - h / 2 + _COVER_TOL * max(1.0, L):
            raise DomainTooSmallError(
                f"ball B({tuple(center)}, {radius}) not covered by grid cells "
                f"(|c|+R must stay below L - dx/2 = {L - h / 2})")
    x = grid.axis
    if grid.dim == 1:
        lo = np.maximum(x - h / 2, center[0] - radius)
        hi = np.minimum(x + h / 2, center[0] + radius)
        return np.clip(hi - lo, 0.0, None)
    xg, yg = grid.meshgrid()
    dist2 = (xg - center[0]) ** 2 + (yg - center[1]) ** 2
    inside = dist2 <= radius**2 * (1.0 + 1e-12)
    return np.where(inside, h * h, 0.0)


@track("integrate_ball")
def integrate_ball(grid: SpatialGrid, values: NDArray[np.float64], center, radius: float) -> float:
    """Deterministic quadrature of a spatial slice over B(center, radius)."""
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise DataError(f"slice shape {values.shape} does not match grid shape {grid.shape}")
    w = ball_weights(grid, center, radius)
    mask = w > 0
    return det_sum(values[mask] * w[mask])


def ball_measure(grid: SpatialGrid, center, radius: float) -> float:
    """Discrete measure of the ball (quadrature of the constant 1)."""
    w = ball_weights(grid, center, radius)
    return det_sum(w[w > 0])


def time_trapezoid(times: NDArray[np.float64], g: NDArray[np.float64],
                   a: float, b: float) -> float:
    """Trapezoid of a sampled function of time over [a, b].

    Endpoint values at a and b are obtained by linear interpolation when they
    fall between samples; samples outside [a, b] are ignored.
    """
    times = np.asarray(times, dtype=float)
    g = np.asarray(g, dtype=float)
    tol = 1e-12 * max(1.0, abs(b))
    if a < times[0] - tol or b > times[-1] + tol:
        raise CoverageError(f"[{a}, {b}] not covered by sample times "
                            f"[{times[0]}, {times[-1]}]")
    nodes = [a]
    vals = [float(np.interp(a, times, g))]
    inside = (times > a + tol) & (times < b - tol)
    nodes.extend(times[inside].tolist())
    vals.extend(g[inside].tolist())
    nodes.append(b)
    vals.append(float(np.interp(b, times, g)))
    nodes_arr = np.asarray(nodes)
    vals_arr = np.asarray(vals)
    pieces = 0.5 * (vals_arr[1:] + vals_arr[:-1]) * np.diff(nodes_arr)
    return det_sum(pieces)


@track("integrate_strip_L2")
def integrate_strip_L2(u: SpaceTimeField, strip: StripSpec, radius: float,
                       center=None) -> float:
    """L2 norm of u over the strip (a,b) x B(center, R).

    Square root of the time-trapezoid of the ball integral of |u(t, .)|^2.
    Requires at least 4 sample times inside [a, b].
    """
    times = u.times
    n_inside = int(np.count_nonzero((times >= strip.a - 1e-12) & (times <= strip.b + 1e-12)))
    if n_inside < 4:
        raise InsufficientResolutionError(
            f"only {n_inside} time samples in [{strip.a}, {strip.b}]; need >= 4")
    if center is None:
        center = np.zeros(u.grid.dim)
    w = ball_weights(u.grid, center, radius)
    mask = w > 0
    wm = w[mask]
    g = np.empty(u.n_times)
    for i in range(u.n_times):
        sl = u.values[i]
        g[i] = det_sum(sl[mask] ** 2 * wm)
    total = time_trapezoid(times, g, strip.a, strip.b)
    return float(np.sqrt(max(total, 0.0)))


@track("gradient")
def gradient(grid: SpatialGrid, values: NDArray[np.float64]) -> NDArray[np.float64]:
    """Second-order central differences; returns array of shape (dim, *grid.shape).

    Boundary handling follows the grid's boundary mode: periodic wrap, or
    one-sided second-order stencils for zero-padded grids.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != grid.shape:
        raise DataError(f"slice shape {values.shape} does not match grid shape {grid.shape}")
    h = grid.spacing
    out = np.empty((grid.dim, *grid.shape))
    for ax in range(grid.dim):
        if grid.boundary_mode == "periodic":
            d = (np.roll(values, -1, axis=ax) - np.roll(values, 1, axis=ax)) / (2 * h)
        else:
            d = np.empty_like(values)
            mid = (np.take(values, range(2, grid.shape[ax]), axis=ax)
                   - np.take(values, range(0, grid.shape[ax] - 2), axis=ax)) / (2 * h)
            _assign_along(d, ax, slice(1, -1), mid)
            first = (-3 * _take1(values, ax, 0) + 4 * _take1(values, ax, 1)
                     - _take1(values, ax, 2)) / (2 * h)
            last = (3 * _take1(values, ax, -1) - 4 * _take1(values, ax, -2)
                    + _take1(values, ax, -3)) / (2 * h)
            _assign_along(d, ax, 0, first)
            _assign_along(d, ax, -1, last)
        out[ax] = d
    return out


def _take1(arr: NDArray, axis: int, idx: int) -> NDArray:
    sl: list = [slice(None)] * arr.ndim
    sl[axis] = idx
    return arr[tuple(sl)]


def _assign_along(arr: NDArray, axis: int, idx, values) -> None:
    sl: list = [slice(None)] * arr.ndim
    sl[axis] = idx
    arr[tuple(sl)] = values


@dataclass(frozen=True)
class ExtentAudit:
    """Result of recomputing a scalar on a 1.5x wider box."""

    value: float
    enlarged_value: float
    rel_change: float
    passed: bool
    factor: float = 1.5


def extent_audit(compute: Callable[[SpatialGrid], float], grid: SpatialGrid,
                 factor: float = 1.5, rel_tol: float = 1e-3) -> ExtentAudit:
    """Check that a reported quantity is insensitive to the domain truncation.

    Recomputes ``compute`` on a grid enlarged by *factor* (same spacing) and
    reports the relative change; passes when it stays below *rel_tol*.
    """
    v = float(compute(grid))
    v_big = float(compute(grid.enlarged(factor)))
    scale = max(abs(v), abs(v_big), 1e-300)
    rel = abs(v_big - v) / scale
    return ExtentAudit(v, v_big, rel, rel <= rel_tol, factor)


def field_to_csv(u: SpaceTimeField) -> str:
    """Serialize snapshots: grid header comment, then t,x[,y],value rows."""
    g = u.grid
    buf = io.StringIO()
    buf.write(f"# grid n={g.dim} L={fmt_float(g.half_extent)} "
              f"dx={fmt_float(g.spacing)} mode={g.boundary_mode}\n")
    if g.dim == 1:
        buf.write("t,x,value\n")
        for i, t in enumerate(u.times):
            for j, x in enumerate(g.axis):
                buf.write(f"{fmt_float(t)},{fmt_float(x)},{fmt_float(u.values[i, j])}\n")
    else:
        buf.write("t,x,y,value\n")
        ax = g.axis
        for i, t in enumerate(u.times):
            for j, x in enumerate(ax):
                for k, y in enumerate(ax):
                    buf.write(f"{fmt_float(t)},{fmt_float(x)},{fmt_float(y)},"
                              f"{fmt_float(u.values[i, j, k])}\n")
    return buf.getvalue()


def field_from_csv(text: str, label: str = "") -> SpaceTimeField:
    """Parse the output of :func:`field_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("# grid"):
        raise DataError("missing '# grid' header line")
    header = dict(item.split("=", 1) for item in lines[0][len("# grid"):].split())
    grid = SpatialGrid(int(header["n"]), float(header["L"]), float(header["dx"]),
                       header["mode"])  # type: ignore[arg-type]
    body = lines[1:]
    if body and not body[0][0].isdigit() and not body[0].startswith("-"):
        body = body[1:]  # skip column header row
    rows = [tuple(float(v) for v in ln.split(",")) for ln in body]
    times = sorted({r[0] for r in rows})
    t_index = {t: i for i, t in enumerate(times)}
    n = grid.points_per_axis
    values = np.full((len(times), *grid.shape), np.nan)
    x0, h = -grid.half_extent, grid.spacing
    for r in rows:
        i = t_index[r[0]]
        j = round((r[1] - x0) / h)
        if grid.dim == 1:
            values[i, j] = r[2]
        else:
            k = round((r[2] - x0) / h)
            values[i, j, k] = r[3]
    if np.isnan(values).any():
        raise DataError("CSV does not cover the full grid")
    return SpaceTimeField(grid, np.asarray(times), values, label)
