"""Exact caloric functions and initial data - the ground-truth corpus.

Every member evaluates in closed form (value, gradient, and, except for the
flat-series solution, the initial trace), so measurements can be checked
against quantities with no discretization error of their own.

The flat-series member deserves its own warning label.  It is the classical
nonuniqueness witness sum_k f^(k)(t) x^{2k} / (2k)! with f(t) = e^{-1/t},
where the evaluator contract is the K-term partial sum plus a truncation
flag.  Derivatives come from the Cauchy integral on the circle of radius t/2
(inside the analyticity half-plane), which is numerically faithful to the
exact partial sum at the ~0.1% level even deep in the cancellation regime.
Two caveats, verified against a high-precision oracle during development:

* the infinite series has zero initial trace only on |x| < 2 for this flat
  function (t -> 0 decay like exp(-(1-|x|/2)^2/t)); compact-support probes
  of the vanishing trace must therefore live inside (-2, 2);
* outside its convergence budget (roughly |x|^2/(4t) > K/e) the partial sum
  is truncation-dominated; the flag reports this, and the counterexample
  experiments deliberately measure the flagged, super-exponentially growing
  truncated object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import lgamma, log, pi, sqrt
from typing import Sequence, Union

import numpy as np
from numpy.typing import NDArray
from scipy.special import erf

from .grid import SpaceTimeField, SpatialGrid
from .optrack import track
from .probes import SchwartzProbe, evolve_gauss_poly

Array = NDArray[np.float64]


def heat_kernel(t: float, r2: Array, dim: int) -> Array:
    """Fundamental solution (4 pi t)^{-n/2} exp(-r^2/4t)."""
    return (4.0 * pi * t) ** (-dim / 2.0) * np.exp(-r2 / (4.0 * t))


@dataclass(frozen=True)
class GaussianKernelSolution:
    """u(t, x) = Phi(t0 + t, x - x0): the fundamental solution started at -t0."""

    t0: float = 1.0
    x0: tuple[float, ...] = (0.0,)

    kind = "gaussian_kernel"

    def __post_init__(self) -> None:
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")

    @property
    def dim(self) -> int:
        return len(self.x0)

    @property
    def label(self) -> str:
        return f"gaussian_kernel(t0={self.t0:g})"

    def _r2(self, axes) -> Array:
        r2 = np.zeros(np.broadcast_shapes(*(np.shape(a) for a in axes)))
        for a, c in zip(axes, self.x0):
            r2 = r2 + (np.asarray(a, dtype=float) - c) ** 2
        return r2

    def value(self, t: float, *axes: Array) -> Array:
        return heat_kernel(self.t0 + t, self._r2(axes), self.dim)

    def gradient(self, t: float, *axes: Array) -> tuple[Array, ...]:
        v = self.value(t, *axes)
        tt = self.t0 + t
        return tuple(-(np.asarray(a, dtype=float) - c) / (2.0 * tt) * v
                     for a, c in zip(axes, self.x0))

    def initial_values(self, *axes: Array) -> Array:
        return heat_kernel(self.t0, self._r2(axes), self.dim)


@dataclass(frozen=True)
class CaloricPolynomial:
    """1D heat polynomial v_m(t,x) = sum_j m!/((m-2j)! j!) x^{m-2j} t^j."""

    m: int

    kind = "caloric_polynomial"
    dim = 1

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError("degree must be >= 0")

    @property
    def label(self) -> str:
        return f"caloric_polynomial({self.m})"

    def value(self, t: float, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j in range(self.m // 2 + 1):
            coef = math.factorial(self.m) / (math.factorial(self.m - 2 * j) * math.factorial(j))
            out = out + coef * x ** (self.m - 2 * j) * t**j
        return out

    def gradient(self, t: float, x: Array) -> tuple[Array]:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j in range(self.m // 2 + 1):
            p = self.m - 2 * j
            if p == 0:
                continue
            coef = math.factorial(self.m) / (math.factorial(p) * math.factorial(j))
            out = out + coef * p * x ** (p - 1) * t**j
        return (out,)

    def initial_values(self, x: Array) -> Array:
        return np.asarray(x, dtype=float) ** self.m


@dataclass(frozen=True)
class ExponentialSolution:
    """u(t, x) = exp(mu.x + |mu|^2 t): caloric with exponential spatial growth."""

    mu: tuple[float, ...] = (1.0,)

    kind = "exponential"

    @property
    def dim(self) -> int:
        return len(self.mu)

    @property
    def label(self) -> str:
        return f"exponential(mu={','.join(f'{m:g}' for m in self.mu)})"

    def _phase(self, axes) -> Array:
        p = np.zeros(np.broadcast_shapes(*(np.shape(a) for a in axes)))
        for a, m in zip(axes, self.mu):
            p = p + m * np.asarray(a, dtype=float)
        return p

    def value(self, t: float, *axes: Array) -> Array:
        mu2 = sum(m * m for m in self.mu)
        return np.exp(self._phase(axes) + mu2 * t)

    def gradient(self, t: float, *axes: Array) -> tuple[Array, ...]:
        v = self.value(t, *axes)
        return tuple(m * v for m in self.mu)

    def initial_values(self, *axes: Array) -> Array:
        return np.exp(self._phase(axes))


@dataclass(frozen=True)
class Eigenmode:
    """u(t, x) = A exp(-|w|^2 t) sin(w.x): bounded decaying eigenfunction."""

    omega: tuple[float, ...] = (1.0,)
    amplitude: float = 1.0

    kind = "eigenmode"

    @property
    def dim(self) -> int:
        return len(self.omega)

    @property
    def label(self) -> str:
        return f"eigenmode(omega={','.join(f'{w:g}' for w in self.omega)})"

    def _phase(self, axes) -> Array:
        p = np.zeros(np.broadcast_shapes(*(np.shape(a) for a in axes)))
        for a, w in zip(axes, self.omega):
            p = p + w * np.asarray(a, dtype=float)
        return p

    def _decay(self, t: float) -> float:
        return self.amplitude * math.exp(-sum(w * w for w in self.omega) * t)

    def value(self, t: float, *axes: Array) -> Array:
        return self._decay(t) * np.sin(self._phase(axes))

    def gradient(self, t: float, *axes: Array) -> tuple[Array, ...]:
        c = self._decay(t) * np.cos(self._phase(axes))
        return tuple(w * c for w in self.omega)

    def initial_values(self, *axes: Array) -> Array:
        return self.amplitude * np.sin(self._phase(axes))


@dataclass(frozen=True)
class ErfFront:
    """u(t, x) = erf(x / sqrt(4t)): the heat evolution of sign(x)."""

    kind = "erf_front"
    dim = 1
    label = "erf_front"

    def value(self, t: float, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        return erf(x / sqrt(4.0 * t))

    def gradient(self, t: float, x: Array) -> tuple[Array]:
        x = np.asarray(x, dtype=float)
        return (np.exp(-(x**2) / (4.0 * t)) / sqrt(pi * t),)

    def initial_values(self, x: Array) -> Array:
        return np.sign(np.asarray(x, dtype=float))


@lru_cache(maxsize=256)
def _contour_means(t: float, k_max: int) -> tuple[float, ...]:
    """Contour means mean_theta[f(t + r e^{i th}) e^{-ik th}], r = t/2, f = e^{-1/t}.

    f^(k)(t) = k! r^{-k} * mean_k; trapezoid on N = max(64, 8k) nodes, which
    is spectrally accurate for this periodic analytic integrand.
    """
    r = 0.5 * t
    means = []
    for k in range(k_max + 1):
        n = max(64, 8 * k)
        theta = 2.0 * pi * np.arange(n) / n
        z = t + r * np.exp(1j * theta)
        means.append(float(np.mean(np.exp(-1.0 / z) * np.exp(-1j * k * theta)).real))
    return tuple(means)


def _tychonoff_terms(t: float, x_flat: Array, K: int) -> tuple[Array, Array]:
    """Scaled series terms on flattened points: (signed, log_scale).

    Term k equals mean_k * exp(lgamma(k+1) - lgamma(2k+1) - k log r
    + 2k log|x|); exponents are combined and rescaled by the per-point
    maximum before the single exp, so the huge factorials and powers never
    materialize individually.  True term k = signed[k] * exp(log_scale).
    """
    r = 0.5 * t
    means = np.asarray(_contour_means(t, K))
    ks = np.arange(K + 1, dtype=float)
    base = np.array([lgamma(k + 1) - lgamma(2 * k + 1) - k * log(r) for k in range(K + 1)])
    log_mean = np.log(np.abs(means) + 1e-300)
    absx = np.abs(x_flat)
    zero = absx == 0.0
    logx = np.where(zero, 0.0, np.log(np.where(zero, 1.0, absx)))
    expo = (base + log_mean)[:, None] + 2.0 * ks[:, None] * logx[None, :]
    m = expo.max(axis=0)
    signed = np.sign(means)[:, None] * np.exp(expo - m[None, :])
    if zero.any():
        # only the k = 0 term survives at x = 0: the series value is f(t)
        signed[:, zero] = 0.0
        m[zero] = 0.0
        signed[0, zero] = means[0]
    return signed, m


@dataclass(frozen=True)
class TychonoffSolution:
    """K-term flat series sum_k f^(k)(t) x^{2k}/(2k)!, f(t) = e^{-1/t}, t in (0,1].

    The evaluator returns the partial sum; use value_with_flag to obtain the
    truncation flag (last term above 1e-12 of the running sum).  See the
    module docstring for the domain-of-validity notes.
    """

    K: int = 40

    kind = "tychonoff"
    dim = 1

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError("need K >= 1 series terms")

    @property
    def label(self) -> str:
        return f"tychonoff(K={self.K})"

    def _check_t(self, t: float) -> None:
        if not 0.0 < t <= 1.0:
            raise ValueError(f"flat series defined for t in (0, 1], got {t}")

    def value_with_flag(self, t: float, x: Array) -> tuple[Array, NDArray[np.bool_]]:
        self._check_t(t)
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        signed, m = _tychonoff_terms(t, flat, self.K)
        scaled_sum = np.add.reduce(signed, axis=0)
        value = _rescale(scaled_sum, m)
        flag = np.abs(signed[-1]) > 1e-12 * np.maximum(np.abs(scaled_sum), 1e-300)
        return value.reshape(x.shape), flag.reshape(x.shape)

    def value(self, t: float, x: Array) -> Array:
        return self.value_with_flag(t, x)[0]

    def gradient(self, t: float, x: Array) -> tuple[Array]:
        """Term-wise derivative sum_{k>=1} f^(k)(t) x^{2k-1}/(2k-1)!."""
        self._check_t(t)
        x = np.asarray(x, dtype=float)
        flat = np.atleast_1d(x).ravel()
        signed, m = _tychonoff_terms(t, flat, self.K)
        ks = np.arange(self.K + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            dsigned = np.where(np.abs(flat)[None, :] > 0,
                               signed * (2.0 * ks)[:, None] / flat[None, :], 0.0)
        out = _rescale(np.add.reduce(dsigned, axis=0), m)
        return (out.reshape(x.shape),)

    def initial_values(self, x: Array) -> Array:
        raise NotImplementedError(
            "the flat series has no closed-form trace sample; it vanishes as "
            "t -> 0 only on |x| < 2 (see module docstring)")


def _rescale(scaled_sum: Array, log_scale: Array) -> Array:
    """exp(log_scale) * scaled_sum without overflowing the intermediate exp."""
    out = np.zeros_like(scaled_sum)
    nz = scaled_sum != 0.0
    out[nz] = np.sign(scaled_sum[nz]) * np.exp(log_scale[nz] + np.log(np.abs(scaled_sum[nz])))
    return out


AnalyticSolution = Union[GaussianKernelSolution, CaloricPolynomial, ExponentialSolution,
                         Eigenmode, ErfFront, TychonoffSolution]


@track("eval_solution")
def eval_solution(sol: AnalyticSolution, t: float, *axes: Array) -> Array:
    """Closed-form value of a zoo member at time t on coordinate arrays."""
    if t <= 0:
        raise ValueError("t must be positive")
    if len(axes) != sol.dim:
        raise ValueError(f"{sol.label} is {sol.dim}D; got {len(axes)} coordinate arrays")
    return sol.value(t, *axes)


@track("tychonoff_eval")
def tychonoff_eval(t: float, x, K: int = 40) -> tuple[float, bool]:
    """Flat-series partial sum at a point: (value, truncation_flag)."""
    sol = TychonoffSolution(K)
    v, flag = sol.value_with_flag(t, np.asarray(x, dtype=float).reshape(()))
    return float(v), bool(flag)


def sample_solution(sol: AnalyticSolution, grid: SpatialGrid, times: Sequence[float],
                    label: str | None = None) -> SpaceTimeField:
    """Exact samples of a zoo member on a grid x time ladder."""
    times_arr = np.asarray(sorted(times), dtype=float)
    mesh = grid.meshgrid()
    values = np.empty((times_arr.size, *grid.shape))
    for i, t in enumerate(times_arr):
        values[i] = eval_solution(sol, float(t), *mesh)
    return SpaceTimeField(grid, times_arr, values, label or sol.label)


@dataclass(frozen=True)
class ResidualProbeRegion:
    """Interior probe lattice and FD steps for the heat-residual check."""

    t_range: tuple[float, float]
    x_extent: float
    n_t: int = 7
    n_x: int = 41
    dt: float = 1e-3
    dx: float = 1e-3
    stencil_order: int = 2

    def __post_init__(self) -> None:
        if self.stencil_order not in (2, 4):
            raise ValueError("stencil_order must be 2 or 4")
        steps = 2 if self.stencil_order == 4 else 1
        if self.t_range[0] - steps * self.dt <= 0:
            raise ValueError("probe times must leave room for the time stencil")


@track("heat_residual")
def heat_residual(sol: AnalyticSolution, region: ResidualProbeRegion) -> float:
    """max |d_t u - Lap u| over the probe lattice, by central differences.

    The stencil order is configurable: order 2 is the default; order 4 makes
    the check exact (up to round-off) for heat polynomials of degree <= 5.
    """
    ts = np.linspace(region.t_range[0], region.t_range[1], region.n_t)
    xs = np.linspace(-region.x_extent, region.x_extent, region.n_x)
    axes = (xs,) if sol.dim == 1 else (xs, xs)
    mesh = np.meshgrid(*axes, indexing="ij") if sol.dim == 2 else (xs,)
    dt, dx = region.dt, region.dx
    worst = 0.0
    for t in ts:
        if region.stencil_order == 2:
            ut = (sol.value(t + dt, *mesh) - sol.value(t - dt, *mesh)) / (2 * dt)
        else:
            ut = (-sol.value(t + 2 * dt, *mesh) + 8 * sol.value(t + dt, *mesh)
                  - 8 * sol.value(t - dt, *mesh) + sol.value(t - 2 * dt, *mesh)) / (12 * dt)
        lap = np.zeros_like(ut)
        for ax in range(sol.dim):
            lap += _axis_second_difference(sol, t, mesh, ax, dx, region.stencil_order)
        worst = max(worst, float(np.abs(ut - lap).max()))
    return worst


def _axis_second_difference(sol, t, mesh, ax, dx, order):
    def shifted(delta):
        moved = list(mesh)
        moved[ax] = mesh[ax] + delta
        return sol.value(t, *moved)

    if order == 2:
        return (shifted(dx) - 2.0 * shifted(0.0) + shifted(-dx)) / dx**2
    return (-shifted(2 * dx) + 16 * shifted(dx) - 30 * shifted(0.0)
            + 16 * shifted(-dx) - shifted(-2 * dx)) / (12 * dx**2)


# ---------------------------------------------------------------------------
# Initial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchwartzGaussPolyDatum:
    """u0(x) = p(x) e^{-x^2/2 sigma^2}; evolution stays in closed form."""

    coeffs: tuple[float, ...] = (1.0,)
    sigma: float = 1.0

    kind = "gauss_poly"
    dim = 1

    @property
    def label(self) -> str:
        return f"gauss_poly(p={list(self.coeffs)},sigma={self.sigma:g})"

    def sample(self, grid: SpatialGrid) -> Array:
        return SchwartzProbe(self.coeffs, self.sigma).value(grid.axis)

    def evolved_values(self, t: float, x: Array) -> Array:
        coeffs_t, sigma_t = evolve_gauss_poly(self.coeffs, self.sigma, t)
        return SchwartzProbe(coeffs_t, sigma_t).value(np.asarray(x, dtype=float))

    def initial_function(self, x: Array) -> Array:
        return SchwartzProbe(self.coeffs, self.sigma).value(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SignDatum:
    """u0 = sign(x); e^{tL} u0 = erf(x/sqrt(4t))."""

    kind = "sign"
    dim = 1
    label = "sign"

    def sample(self, grid: SpatialGrid) -> Array:
        return np.sign(grid.axis)

    def evolved_values(self, t: float, x: Array) -> Array:
        return erf(np.asarray(x, dtype=float) / sqrt(4.0 * t))

    def initial_function(self, x: Array) -> Array:
        return np.sign(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class DiracDatum:
    """Unit point mass at x0; evolution is the heat kernel centered there."""

    x0: float = 0.0

    kind = "dirac"
    dim = 1

    @property
    def label(self) -> str:
        return f"dirac(x0={self.x0:g})"

    def sample(self, grid: SpatialGrid) -> Array:
        j = int(round((self.x0 + grid.half_extent) / grid.spacing))
        if not 0 <= j < grid.points_per_axis:
            raise ValueError("dirac location outside the grid")
        out = np.zeros(grid.shape)
        out[j] = 1.0 / grid.spacing
        return out

    def evolved_values(self, t: float, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        return heat_kernel(t, (x - self.x0) ** 2, 1)


@dataclass(frozen=True)
class OscillatorDatum:
    """u0 = A sin(w x) = d/dx(-A cos(w x)/w): a bounded-primitive datum.

    The primitive -A cos(w x)/w is bounded, so the datum is a divergence of
    an L^inf (hence BMO) field; its heat extension has finite tent norm.
    """

    omega: float = 1.0
    amplitude: float = 1.0

    kind = "oscillator"
    dim = 1

    @property
    def label(self) -> str:
        return f"oscillator(omega={self.omega:g},amp={self.amplitude:g})"

    def sample(self, grid: SpatialGrid) -> Array:
        return self.amplitude * np.sin(self.omega * grid.axis)

    def evolved_values(self, t: float, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        return self.amplitude * math.exp(-self.omega**2 * t) * np.sin(self.omega * x)

    def initial_function(self, x: Array) -> Array:
        return self.amplitude * np.sin(self.omega * np.asarray(x, dtype=float))

    def rescaled(self, factor: float) -> "OscillatorDatum":
        """The tent-norm-preserving rescaling w -> factor*w, A -> factor*A."""
        return OscillatorDatum(self.omega * factor, self.amplitude * factor)


InitialDatum = Union[SchwartzGaussPolyDatum, SignDatum, DiracDatum, OscillatorDatum]


def evolve_datum_exact(datum: InitialDatum, grid: SpatialGrid,
                       times: Sequence[float], label: str | None = None) -> SpaceTimeField:
    """Closed-form evolution samples of an initial datum."""
    times_arr = np.asarray(sorted(times), dtype=float)
    values = np.empty((times_arr.size, *grid.shape))
    for i, t in enumerate(times_arr):
        values[i] = datum.evolved_values(float(t), grid.axis)
    return SpaceTimeField(grid, times_arr, values, label or f"e^(tL){datum.label}")


def exact_pairing(datum: InitialDatum, probe) -> float:
    """High-accuracy <u0, phi> independent of any ladder or grid."""
    from scipy.integrate import quad

    if isinstance(datum, DiracDatum):
        return float(probe.value(np.asarray([datum.x0]))[0])
    window = probe.decay_window() if hasattr(probe, "decay_window") else 30.0
    if isinstance(datum, SignDatum):
        val, _ = quad(lambda y: float(probe.value(np.asarray([y]))[0]), 0.0, window, limit=400)
        val2, _ = quad(lambda y: float(probe.value(np.asarray([y]))[0]), -window, 0.0, limit=400)
        return float(val - val2)
    fn = datum.initial_function
    val, _ = quad(lambda y: float(fn(np.asarray([y]))[0] * probe.value(np.asarray([y]))[0]),
                  -window, window, limit=400)
    return float(val)


# ---------------------------------------------------------------------------
# String registry (CLI configs name zoo members by id)
# ---------------------------------------------------------------------------


def _parse_params(spec: str) -> dict[str, str]:
    if not spec:
        return {}
    return dict(item.split("=", 1) for item in spec.split(","))


def solution_from_id(ident: str) -> AnalyticSolution:
    """Build a zoo member from an id like ``tychonoff:K=40``."""
    name, _, params_txt = ident.partition(":")
    p = _parse_params(params_txt)
    name = name.strip()
    if name == "gaussian_kernel":
        return GaussianKernelSolution(t0=float(p.get("t0", 1.0)),
                                      x0=(float(p.get("x0", 0.0)),) * int(p.get("dim", 1)))
    if name == "caloric_polynomial":
        return CaloricPolynomial(int(p.get("m", 2)))
    if name == "exponential":
        return ExponentialSolution((float(p.get("mu", 1.0)),) * int(p.get("dim", 1)))
    if name == "eigenmode":
        return Eigenmode((float(p.get("omega", 1.0)),) * int(p.get("dim", 1)),
                         float(p.get("amp", 1.0)))
    if name == "erf_front":
        return ErfFront()
    if name == "tychonoff":
        return TychonoffSolution(int(p.get("K", 40)))
    raise ValueError(f"unknown solution id {ident!r}")


def datum_from_id(ident: str) -> InitialDatum:
    """Build an initial datum from an id like ``oscillator:omega=1,amp=1``."""
    name, _, params_txt = ident.partition(":")
    p = _parse_params(params_txt)
    name = name.strip()
    if name == "sign":
        return SignDatum()
    if name == "dirac":
        return DiracDatum(float(p.get("x0", 0.0)))
    if name == "oscillator":
        return OscillatorDatum(float(p.get("omega", 1.0)), float(p.get("amp", 1.0)))
    if name == "gauss_poly":
        coeffs = tuple(float(c) for c in p.get("coeffs", "1").split("|"))
        return SchwartzGaussPolyDatum(coeffs, float(p.get("sigma", 1.0)))
    raise ValueError(f"unknown datum id {ident!r}")
