"""Free unitary diffusion on the circle.

Two charts are provided.  In the angular chart the cotangent resolvent
``J`` obeys the inviscid Burgers equation, so ``J(theta, t) = J0(theta0)`` with
``theta = theta0 + t J0(theta0)``.  In the z-plane chart the product ``zp`` is
conserved and ``z = u exp(t (1/2 - u G0(u)))``.  Both are solved by Newton's
method continued in from far off the circle, which selects the physical branch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NoConvergence
from .measures import AngularMeasure

CAUSTIC_FLAG = 1e-6


@dataclass(frozen=True)
class AngularField:
    theta: np.ndarray
    J: np.ndarray
    rho: np.ndarray
    epsilon: float
    near_caustic: np.ndarray

    def mass(self) -> float:
        return float(np.trapezoid(self.rho, self.theta))


def cot_resolvent(measure: AngularMeasure, theta):
    """``J(theta) = 1/2 sum_i w_i cot((theta - theta_i) / 2)``."""
    out = measure.cot_kernel(theta)
    return complex(out) if np.ndim(out) == 0 else out


def _continuation_heights(eps, top=30.0, steps=80):
    return np.geomspace(top, eps, steps)


def _newton(f_and_df, x, target, tol=1e-13, max_iter=50):
    for _ in range(max_iter):
        f, df = f_and_df(x)
        f = f - target
        step = f / df
        x = x - step
        if np.all(np.abs(step) <= tol * (1 + np.abs(x))):
            break
    return x


def angular_characteristics(initial: AngularMeasure, theta, t: float):
    """Solve ``theta0 + t J0(theta0) = theta`` for complex ``theta`` with ``Im theta > 0``.

    Returns ``(theta0, dtheta/dtheta0)``.
    """
    theta = np.asarray(theta, dtype=complex)
    if np.any(theta.imag <= 0):
        raise ValueError("theta must lie in the upper half-plane")

    def fd(x):
        return x + t * initial.cot_kernel(x), 1 + t * initial.cot_kernel_derivative(x)

    top = max(30.0, 4 * float(theta.imag.max()))
    x = theta.real + 1j * top + 0.5j * t  # J0 -> -i/2 far above the axis
    for h in _continuation_heights(float(theta.imag.min()), top):
        target = theta.real + 1j * np.maximum(h, theta.imag)
        x = _newton(fd, x, target)
    x = _newton(fd, x, theta)
    f, df = fd(x)
    res = np.abs(f - theta)
    if not np.all(res < 1e-10 * (1 + np.abs(theta))):
        raise NoConvergence(f"angular characteristics residual {res.max():.2e}")
    return x, df


def unitary_density(initial: AngularMeasure, theta_grid, t: float,
                    epsilon: float = 1e-6) -> AngularField:
    """Density ``-Im J(theta + i eps) / pi`` of the diffused phases."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    theta = np.asarray(theta_grid, dtype=float).reshape(-1)
    tc = theta + 1j * epsilon
    if t == 0:
        J = initial.cot_kernel(tc)
        flags = np.zeros(theta.shape, dtype=bool)
    else:
        theta0, dth = angular_characteristics(initial, tc, t)
        J = initial.cot_kernel(theta0)
        flags = np.abs(dth) < CAUSTIC_FLAG
    rho = np.maximum(0.0, -J.imag / math.pi)
    return AngularField(theta, J, rho, float(epsilon), flags)


def _circle_resolvent(initial: AngularMeasure, u):
    lam = np.exp(1j * initial.phases)
    d = u[..., None] - lam
    g = np.sum(initial.weights / d, axis=-1)
    dg = -np.sum(initial.weights / d ** 2, axis=-1)
    return g, dg


def zplane_characteristics(initial: AngularMeasure, z, t: float):
    """Solve ``z = u exp(t (1/2 - c(u)))`` with ``c = u G0(u)`` for ``|z| > 1``.

    Returns ``(u, c)``; the resolvent at time ``t`` is ``G(z) = c / z``.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) <= 1):
        raise ValueError("z must lie outside the unit circle")

    def fd(u):
        g, dg = _circle_resolvent(initial, u)
        c = u * g
        dc = g + u * dg
        e = np.exp(t * (0.5 - c))
        return u * e, e * (1 - t * u * dc)

    r = np.abs(z)
    phase = z / r
    top = max(50.0, 4 * float(r.max()))
    u = phase * top * math.exp(t / 2)  # c -> 1 far from the circle
    for rad in np.geomspace(top, float(r.min()), 80):
        u = _newton(fd, u, phase * np.maximum(rad, r))
    u = _newton(fd, u, z)
    f, _ = fd(u)
    res = np.abs(f - z)
    if not np.all(res < 1e-10 * np.abs(z)):
        raise NoConvergence(f"z-plane characteristics residual {res.max():.2e}")
    g, _ = _circle_resolvent(initial, u)
    return u, u * g


def unitary_density_zplane(initial: AngularMeasure, theta_grid, t: float,
                           epsilon: float = 1e-6) -> AngularField:
    """Density ``(2 Re[z G(z)] - 1) / (2 pi)`` at ``|z| = 1 + eps``.

    ``J`` is reported on the matching point ``theta - i log(1 + eps)`` of the
    angular chart, using ``J = i (z G - 1/2)``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    theta = np.asarray(theta_grid, dtype=float).reshape(-1)
    z = (1 + epsilon) * np.exp(1j * theta)
    if t == 0:
        g, _ = _circle_resolvent(initial, z)
        c = z * g
    else:
        _, c = zplane_characteristics(initial, z, t)
    rho = np.maximum(0.0, (2 * c.real - 1) / (2 * math.pi))
    J = 1j * (c - 0.5)
    return AngularField(theta, J, rho, float(epsilon), np.zeros(theta.shape, dtype=bool))


def caustic_strength(initial: AngularMeasure, theta0):
    """``m(theta0) = 1/4 sum_i w_i / sin^2((theta0 - theta_i)/2)``; caustics sit at ``t m = 1``."""
    theta0 = np.asarray(theta0, dtype=float)
    s = np.sin((theta0[..., None] - initial.phases) / 2)
    return 0.25 * np.sum(initial.weights / s ** 2, axis=-1)


def gap_closing_time(initial: AngularMeasure, scan: int = 4096) -> float:
    """Time at which the last spectral gap on the circle closes.

    A real caustic ``1 + t J0'(theta0) = 0`` exists while ``t <= 1 / m(theta0)``
    for some real ``theta0``, so the gaps close at ``1 / min m``.  The minimum is
    located per inter-atom arc by a scan and refined by bounded Brent search.
    """
    phases = np.sort(initial.phases)
    best = math.inf
    for k in range(phases.size):
        lo = phases[k]
        hi = phases[k + 1] if k + 1 < phases.size else phases[0] + 2 * math.pi
        if hi - lo < 1e-12:
            continue
        grid = np.linspace(lo, hi, scan + 2)[1:-1]
        vals = caustic_strength(initial, grid)
        j = int(np.argmin(vals))
        a, b = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
        res = minimize_scalar(lambda x: float(caustic_strength(initial, x)), bounds=(a, b),
                              method="bounded", options={"xatol": 1e-12})
        best = min(best, float(res.fun), float(vals[j]))
    return 1.0 / best


def spectral_gap(initial: AngularMeasure, t: float, scan: int = 4096) -> float:
    """Largest arc free of eigenvalue density at time ``t`` (0 once the gaps close).

    Edges are images ``theta0 + t J0(theta0)`` of the real caustics.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    phases = np.sort(initial.phases)
    widest = 0.0
    for k in range(phases.size):
        lo = phases[k]
        hi = phases[k + 1] if k + 1 < phases.size else phases[0] + 2 * math.pi
        grid = np.linspace(lo, hi, scan + 2)[1:-1]
        f = t * caustic_strength(initial, grid) - 1
        idx = np.nonzero(np.sign(f[:-1]) != np.sign(f[1:]))[0]
        if idx.size < 2:
            continue
        edges = []
        for i in (idx[0], idx[-1]):
            r = brentq(lambda x: t * float(caustic_strength(initial, x)) - 1, grid[i], grid[i + 1],
                       xtol=1e-14)
            edges.append(r + t * float(initial.cot_kernel(r).real))
        widest = max(widest, edges[1] - edges[0])
    return widest
