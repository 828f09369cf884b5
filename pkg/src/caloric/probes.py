"""Pairing duals: compactly supported bumps and Gaussian-polynomial probes.

Both families evaluate exactly (value, gradient, Laplacian, and - in 1D -
arbitrary-order derivatives), which is what the seminorm and pairing-bound
measurements need.  The Gaussian-polynomial probes additionally evolve in
closed form under the heat semigroup: evolving p(x) e^{-x^2/2s^2} yields
another polynomial times a Gaussian of width sqrt(s^2 + 2t), computed from
the Gaussian moment formula, so probe evolution introduces no quadrature
error at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import sqrt
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

Array = NDArray[np.float64]

# exp(1 - 1/w) underflows for 1/w beyond ~745; cut a bit earlier.
_EXP_FLOOR = 700.0


@dataclass(frozen=True)
class TestFunction:
    """Smooth compactly supported bump, unit peak, supp = B(center, radius).

    Profile exp(1 - 1/(1 - s)) with s = |x - center|^2 / radius^2; exactly
    zero outside the support, evaluated in the stable exponent form inside.
    """

    __test__ = False  # keep pytest from collecting this as a test class

    center: tuple[float, ...] = (0.0,)
    radius: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not self.label:
            c = ",".join(f"{ci:g}" for ci in self.center)
            object.__setattr__(self, "label", f"bump(c={c},r={self.radius:g})")

    @property
    def dim(self) -> int:
        return len(self.center)

    def _s(self, axes: tuple[Array, ...]) -> Array:
        s = np.zeros(np.broadcast_shapes(*(np.shape(a) for a in axes)))
        for a, c in zip(axes, self.center):
            s = s + ((np.asarray(a, dtype=float) - c) / self.radius) ** 2
        return s

    def value(self, *axes: Array) -> Array:
        s = self._s(axes)
        w = 1.0 - s
        safe = w > 1.0 / _EXP_FLOOR
        out = np.zeros_like(s)
        out[safe] = np.exp(1.0 - 1.0 / w[safe])
        return out

    def gradient(self, *axes: Array) -> tuple[Array, ...]:
        s = self._s(axes)
        w = 1.0 - s
        safe = w > 1.0 / _EXP_FLOOR
        phi = np.zeros_like(s)
        phi[safe] = np.exp(1.0 - 1.0 / w[safe])
        comps = []
        for a, c in zip(axes, self.center):
            g = np.zeros_like(s)
            da = np.broadcast_to(np.asarray(a, dtype=float) - c, s.shape)
            g[safe] = phi[safe] * (-1.0 / w[safe] ** 2) * (2.0 * da[safe] / self.radius**2)
            comps.append(g)
        return tuple(comps)

    def laplacian(self, *axes: Array) -> Array:
        s = self._s(axes)
        w = 1.0 - s
        safe = w > 1.0 / _EXP_FLOOR
        out = np.zeros_like(s)
        ws = w[safe]
        ss = s[safe]
        phi = np.exp(1.0 - 1.0 / ws)
        n = self.dim
        out[safe] = phi / self.radius**2 * (4 * ss / ws**4 - 8 * ss / ws**3 - 2 * n / ws**2)
        return out

    def derivative(self, order: int, x: Array) -> Array:
        """Exact d^order/dx^order of the 1D bump.

        Uses the rational recursion phi^(m) = N_m(z) / (1-z^2)^{2m} * phi / r^m
        with z = (x - c)/r; N_{m+1} = w^2 N_m' + (4 m z w - 2 z) N_m.
        """
        if self.dim != 1:
            raise ValueError("high-order derivatives implemented for 1D bumps only")
        num = _bump_numerators(order)
        x = np.asarray(x, dtype=float)
        z = (x - self.center[0]) / self.radius
        w = 1.0 - z**2
        safe = w > 1.0 / _EXP_FLOOR
        out = np.zeros_like(z)
        if order == 0:
            out[safe] = np.exp(1.0 - 1.0 / w[safe])
            return out
        ws = w[safe]
        # phi / w^{2m} evaluated as a single exponential to avoid 0 * inf.
        log_scale = (1.0 - 1.0 / ws) - 2.0 * order * np.log(ws)
        poly_val = np.polynomial.polynomial.polyval(z[safe], num)
        out[safe] = poly_val * np.exp(log_scale) / self.radius**order
        return out

    @property
    def max_derivative_order(self) -> int:
        return 12 if self.dim == 1 else 2


def _bump_numerators(order: int) -> Array:
    """Coefficients (ascending) of N_order in the bump derivative recursion."""
    num = np.array([1.0])
    w2 = np.array([1.0, 0.0, -2.0, 0.0, 1.0])  # (1 - z^2)^2
    w = np.array([1.0, 0.0, -1.0])
    for m in range(order):
        dnum = np.polynomial.polynomial.polyder(num) if num.size > 1 else np.array([0.0])
        term1 = np.polynomial.polynomial.polymul(w2, dnum)
        lin = np.polynomial.polynomial.polymul(np.array([0.0, 4.0 * m]), w)
        lin = np.polynomial.polynomial.polyadd(lin, np.array([0.0, -2.0]))
        term2 = np.polynomial.polynomial.polymul(lin, num)
        num = np.polynomial.polynomial.polyadd(term1, term2)
    return num


@dataclass(frozen=True)
class SchwartzProbe:
    """phi(x) = p(x) exp(-x^2 / 2 sigma^2) with exact derivatives to order 12."""

    coeffs: tuple[float, ...] = (1.0,)
    sigma: float = 1.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not self.coeffs:
            raise ValueError("need at least one polynomial coefficient")
        if not self.label:
            object.__setattr__(
                self, "label",
                f"probe(p={list(self.coeffs)},sigma={self.sigma:g})")

    @property
    def dim(self) -> int:
        return 1

    @property
    def max_derivative_order(self) -> int:
        return 12

    def value(self, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        p = np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs))
        return p * np.exp(-(x**2) / (2.0 * self.sigma**2))

    def _derivative_coeffs(self, order: int) -> Array:
        c = np.asarray(self.coeffs, dtype=float)
        for _ in range(order):
            dc = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.array([0.0])
            shift = np.polynomial.polynomial.polymul(np.array([0.0, -1.0 / self.sigma**2]), c)
            c = np.polynomial.polynomial.polyadd(dc, shift)
        return c

    def derivative(self, order: int, x: Array) -> Array:
        """Exact d^order phi/dx^order (polynomial recursion against the Gaussian)."""
        if order > self.max_derivative_order:
            raise ValueError(f"derivatives available only to order {self.max_derivative_order}")
        x = np.asarray(x, dtype=float)
        c = self._derivative_coeffs(order)
        return np.polynomial.polynomial.polyval(x, c) * np.exp(-(x**2) / (2.0 * self.sigma**2))

    def laplacian(self, x: Array) -> Array:
        return self.derivative(2, x)

    def evolved(self, t: float) -> "SchwartzProbe":
        """Closed-form heat evolution; returns another Gaussian-polynomial probe."""
        if t < 0:
            raise ValueError("t must be >= 0")
        if t == 0:
            return self
        coeffs_t, sigma_t = evolve_gauss_poly(self.coeffs, self.sigma, t)
        return SchwartzProbe(coeffs_t, sigma_t, label=f"{self.label}@t={t:g}")

    def decay_window(self, tail: float = 1e-18) -> float:
        """Half-width beyond which |phi| is below *tail* (for sup searches)."""
        deg = len(self.coeffs) - 1
        x = self.sigma * (sqrt(2.0 * abs(np.log(tail))) + deg + 4.0)
        return float(x)


def evolve_gauss_poly(coeffs: Sequence[float], sigma: float, t: float
                      ) -> tuple[tuple[float, ...], float]:
    """Heat-evolve p(x) e^{-x^2/2 sigma^2}: new coefficients and width.

    Completing the square in the Gaussian convolution gives, per monomial,
    e^{tL}[y^m e^{-y^2/2 s^2}](x) = N * E[(beta x + Z)^m] * e^{-x^2/2(s^2+2t)}
    with beta = s^2/(s^2+2t), Z ~ N(0, v), v = 2 t s^2/(s^2+2t), and
    N = s/sqrt(s^2+2t); the expectation expands by Gaussian moments.
    """
    s2 = sigma * sigma
    sig_t = sqrt(s2 + 2.0 * t)
    beta = s2 / (s2 + 2.0 * t)
    v = 2.0 * t * s2 / (s2 + 2.0 * t)
    scale = sigma / sig_t
    out = np.zeros(len(coeffs))
    # E[(beta x + Z)^m] = sum_j C(m, 2j) (2j-1)!! v^j (beta x)^{m-2j}
    for m, cm in enumerate(coeffs):
        if cm == 0.0:
            continue
        for j in range(m // 2 + 1):
            dfact = 1.0
            for i in range(1, 2 * j, 2):
                dfact *= i
            out[m - 2 * j] += cm * math.comb(m, 2 * j) * dfact * v**j * beta ** (m - 2 * j)
    return tuple((scale * out).tolist()), sig_t


def hermite_probe(degree: int, sigma: float) -> SchwartzProbe:
    """Probabilists' Hermite polynomial He_degree(x/sigma) times the Gaussian."""
    he = {0: [1.0], 1: [0.0, 1.0], 2: [-1.0, 0.0, 1.0], 3: [0.0, -3.0, 0.0, 1.0]}
    if degree not in he:
        raise ValueError("hermite_probe supports degrees 0..3")
    coeffs = tuple(c / sigma**k for k, c in enumerate(he[degree]))
    return SchwartzProbe(coeffs, sigma, label=f"He{degree}(s={sigma:g})")


def default_test_panel() -> tuple[TestFunction, ...]:
    """Six bumps spanning parity, scale and position: centers 0, +-2; radii 1, 2."""
    return tuple(
        TestFunction((c,), r)
        for r in (1.0, 2.0)
        for c in (0.0, -2.0, 2.0)
    )


def default_schwartz_panel() -> tuple[SchwartzProbe, ...]:
    """Eight probes: Hermite degrees 0..3 at widths 1 and 2."""
    return tuple(
        hermite_probe(d, s)
        for s in (1.0, 2.0)
        for d in (0, 1, 2, 3)
    )


def central_compact_panel(radii: Sequence[float] = (0.5, 1.0, 1.5)) -> tuple[TestFunction, ...]:
    """Origin-centered bumps, used where the probed solution is only tame near 0."""
    return tuple(TestFunction((0.0,), r) for r in radii)
