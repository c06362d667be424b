"""Observables built from resolvents and quaternionic fields.

One-dimensional densities come from the boundary value of a resolvent,
two-dimensional densities from Gauss's law ``rho = (1/pi) d g / d zbar`` and the
eigenvector-overlap correlator from ``|p_w|^2`` on the ``w -> 0`` sheet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .characteristics import FieldSample, HermitianSolver, quaternionic_field
from .errors import EmptySupport, GridTooSmall, NegativeDensity

NEGATIVE_CLAMP = -1e-8


@dataclass(frozen=True)
class DensityGrid1D:
    x: np.ndarray
    rho: np.ndarray
    epsilon: float

    def mass(self) -> float:
        return float(np.trapezoid(self.rho, self.x))


@dataclass(frozen=True)
class FieldGrid2D:
    """Field samples on a rectangular grid; arrays are indexed ``[iy, ix]``."""

    x: np.ndarray
    y: np.ndarray
    g: np.ndarray
    pw_sq: np.ndarray

    def __post_init__(self):
        for name, axis in (("x", self.x), ("y", self.y)):
            d = np.diff(axis)
            if axis.size >= 2 and (np.any(d <= 0) or np.ptp(d) > 1e-9 * abs(d[0])):
                raise ValueError(f"{name} axis must be uniformly increasing")
        if self.g.shape != (self.y.size, self.x.size) or self.pw_sq.shape != self.g.shape:
            raise ValueError("field arrays must have shape (len(y), len(x))")

    @property
    def z(self) -> np.ndarray:
        return self.x[None, :] + 1j * self.y[:, None]

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def hy(self) -> float:
        return float(self.y[1] - self.y[0])

    @classmethod
    def from_sampler(cls, sampler, x, y) -> FieldGrid2D:
        """``sampler(z_array) -> (g, pw_sq)`` evaluated on the grid ``x + i y``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        z = x[None, :] + 1j * y[:, None]
        g, pw_sq = sampler(z)
        return cls(x, y, np.asarray(g, dtype=complex), np.asarray(pw_sq, dtype=float))


@dataclass(frozen=True)
class ScalarGrid2D:
    """Real values on a rectangular grid, indexed ``[iy, ix]``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        hx = self.x[1] - self.x[0] if self.x.size > 1 else 1.0
        hy = self.y[1] - self.y[0] if self.y.size > 1 else 1.0
        return float(np.sum(self.values) * hx * hy)


# -------------------------------------------------------------- 1D


def hermitian_resolvent(initial, spec, t):
    """Callable ``z -> G(z, t)`` for a Hermitian flow from atomic data.

    Accepts a scalar or an array of ``z``.
    """
    if t == 0:
        return initial.resolvent
    solver = HermitianSolver(initial, spec, t)

    def resolvent(z):
        if np.ndim(z) == 0:
            return solver.solve(z)
        return solver.solve_many(np.asarray(z, dtype=complex))

    return resolvent


def density_1d(resolvent, x_grid, epsilon: float) -> DensityGrid1D:
    """``rho(x) = max(0, -Im G(x + i eps) / pi)``."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    x = np.asarray(x_grid, dtype=float).reshape(-1)
    zs = x + 1j * epsilon
    try:
        g = np.asarray(resolvent(zs), dtype=complex)
    except (TypeError, ValueError):
        g = None
    if g is None or g.shape != zs.shape:
        g = np.array([resolvent(complex(z)) for z in zs], dtype=complex)
    rho = np.maximum(0.0, -g.imag / math.pi)
    return DensityGrid1D(x, rho, float(epsilon))


# -------------------------------------------------------------- 2D


def density_2d(field: FieldGrid2D) -> ScalarGrid2D:
    """Centered-difference ``Re (d_x + i d_y) g / (2 pi)`` on interior nodes."""
    ny, nx = field.g.shape
    if nx < 3 or ny < 3:
        raise GridTooSmall(f"need at least 3x3 nodes, got {nx}x{ny}")
    g = field.g
    rho = _gauss_stencil(g, field.hx, field.hy, 1)
    # truncation noise estimated by comparing with the 2h stencil
    noise = np.zeros_like(rho)
    if nx >= 5 and ny >= 5:
        coarse = _gauss_stencil(g, field.hx, field.hy, 2)
        noise = np.pad(np.abs(coarse - rho[1:-1, 1:-1]), 1, mode="edge")
        noise = maximum_filter(noise, size=3, mode="nearest")
    # stencils mixing inside and outside nodes straddle the jump of dg and are exempt
    inside = field.pw_sq > 0
    arms = (inside[1:-1, 2:], inside[1:-1, :-2], inside[2:, 1:-1], inside[:-2, 1:-1])
    straddle = np.logical_or.reduce(arms) & ~np.logical_and.reduce(arms)
    excess = np.where(straddle, 0.0, rho + noise)
    worst = float(excess.min())
    if worst < NEGATIVE_CLAMP:
        raise NegativeDensity(f"density {worst:.3e} below clamp threshold")
    rho = np.where(rho < 0, 0.0, rho)
    return ScalarGrid2D(field.x[1:-1], field.y[1:-1], rho)


def _gauss_stencil(g, hx, hy, k):
    gx = (g[k:-k, 2 * k:] - g[k:-k, :-2 * k]) / (2 * k * hx)
    gy = (g[2 * k:, k:-k] - g[:-2 * k, k:-k]) / (2 * k * hy)
    return ((gx + 1j * gy) / (2 * math.pi)).real


def overlap_correlator(field: FieldGrid2D) -> ScalarGrid2D:
    """Diagonal eigenvector-overlap density ``O = |p_w|^2 / pi``."""
    return ScalarGrid2D(field.x, field.y, np.maximum(field.pw_sq, 0.0) / math.pi)


def _pw_sq_of(value) -> float:
    if isinstance(value, FieldSample):
        return value.pw_sq
    if isinstance(value, tuple):
        return float(np.real(value[1]))
    return float(value)


def support_boundary(sampler, t: float, tol: float = 1e-12, rays: int = 256,
                     center: complex = 0j, precision: float = 1e-13) -> list:
    """Points where ``|p_w|^2`` drops to ``tol``, one per ray from ``center``.

    ``sampler(z)`` returns ``|p_w|^2``, a ``(g, pw_sq)`` pair or a FieldSample.
    Rays are equally spaced in angle starting at angle 0; the result traces a
    closed contour counter-clockwise.
    """
    if rays < 3:
        raise ValueError("need at least 3 rays")
    center = complex(center)

    def inside(z):
        return _pw_sq_of(sampler(z)) > tol

    if not inside(center):
        raise EmptySupport(f"no support around {center!r} at t={t}")
    scale = max(math.sqrt(max(t, 0.0)), 1e-3)
    out = []
    for k in range(rays):
        d = complex(math.cos(2 * math.pi * k / rays), math.sin(2 * math.pi * k / rays))
        lo, hi = 0.0, scale
        grow = 0
        while inside(center + hi * d):
            lo, hi = hi, 2 * hi
            grow += 1
            if grow > 60:
                raise EmptySupport("support does not appear bounded")
        while hi - lo > precision * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if inside(center + mid * d):
                lo = mid
            else:
                hi = mid
        out.append(center + 0.5 * (lo + hi) * d)
    return out


# ------------------------------------------------- closed-form samplers


def ginibre_field(t: float):
    """Exact field for Ginibre flow from a point mass at 0."""
    if not t > 0:
        raise ValueError("t must be positive")

    def sampler(z):
        z = np.asarray(z, dtype=complex)
        r2 = np.abs(z) ** 2
        inside = r2 < t
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(inside, np.conj(z) / t, 1 / z)
        pw_sq = np.where(inside, (t - r2) / t ** 2, 0.0)
        return g, pw_sq

    return sampler


def elliptic_field(tau: float, t: float):
    """Exact field for elliptic flow from a point mass at 0; ``|tau| < 1``."""
    if not t > 0:
        raise ValueError("t must be positive")
    if not abs(tau) < 1:
        raise ValueError("closed form needs |tau| < 1")

    def sampler(z):
        z = np.asarray(z, dtype=complex)
        z0 = (z - tau * np.conj(z)) / (1 - tau ** 2)
        s = t - np.abs(z0) ** 2
        inside = s > 0
        # outside: z = u + tau t / u with |u| >= sqrt(t)
        root = np.sqrt(z * z - 4 * tau * t + 0j)
        u = np.where(np.abs(z + root) >= np.abs(z - root), (z + root) / 2, (z - root) / 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(inside, np.conj(z0) / t, 1 / u)
        pw_sq = np.where(inside, s / t ** 2, 0.0)
        return g, pw_sq

    return sampler


def numeric_field(initial, spec, t: float):
    """Vectorized wrapper around the pointwise characteristic solver."""

    def sampler(z):
        z = np.asarray(z, dtype=complex)
        g = np.empty(z.shape, dtype=complex)
        pw = np.empty(z.shape, dtype=float)
        for idx in np.ndindex(z.shape):
            f = quaternionic_field(initial, spec, z[idx], t)
            g[idx], pw[idx] = f.g, f.pw_sq
        return g, pw

    return sampler
