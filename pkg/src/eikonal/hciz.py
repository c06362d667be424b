"""Large-N HCIZ asymptotics through a matrix Brownian bridge.

The density of a bridge from ``A`` (t=0) to ``B`` (t=1) solves
``G = G_br(z - t(1-t) G)`` with ``G_br`` the resolvent of ``(1-t)A + tB``, i.e.
free Brownian motion at time ``t(1-t)`` started from that interpolated matrix.
A matching velocity is obtained from the continuity equation and the Euler
action ``1/2 int dt int dx rho (mu^2 + pi^2 rho^2 / 3)`` is evaluated with an
endpoint cutoff.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .characteristics import HermitianSolver, caustic_edges
from .ensembles import GUE, Bridge
from .errors import BridgeTimeOverflow, DegenerateDensity
from .measures import SpectralMeasure


@dataclass(frozen=True)
class HCIZProblem:
    atoms_a: SpectralMeasure
    atoms_b: SpectralMeasure
    beta: int = 2

    def __post_init__(self):
        if self.beta not in (1, 2):
            raise ValueError("beta must be 1 or 2")
        if not (self.atoms_a.is_real and self.atoms_b.is_real):
            raise ValueError("HCIZ end matrices must have real spectra")

    @classmethod
    def from_json(cls, obj) -> HCIZProblem:
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(SpectralMeasure.from_pairs(obj["atoms_a"]),
                   SpectralMeasure.from_pairs(obj["atoms_b"]), int(obj.get("beta", 2)))

    def to_json(self) -> dict:
        return {"atoms_a": self.atoms_a.to_pairs(), "atoms_b": self.atoms_b.to_pairs(),
                "beta": self.beta}

    def swapped(self) -> HCIZProblem:
        return HCIZProblem(self.atoms_b, self.atoms_a, self.beta)

    def coupling(self):
        """Comonotone pairing of the two spectra: arrays ``(a, b, w)``.

        Both measures are read as quantile functions on [0, 1]; each piece where
        both quantiles are constant gives one pair.  This is the joint spectrum
        of commuting ``A`` and ``B`` with equally ordered eigenvectors.
        """
        ia = np.argsort(self.atoms_a.real_locations, kind="stable")
        ib = np.argsort(self.atoms_b.real_locations, kind="stable")
        xa, wa = self.atoms_a.real_locations[ia], self.atoms_a.weights[ia]
        xb, wb = self.atoms_b.real_locations[ib], self.atoms_b.weights[ib]
        ca, cb = np.cumsum(wa), np.cumsum(wb)
        cuts = np.unique(np.concatenate([ca, cb]))
        cuts[-1] = 1.0
        lo = np.concatenate([[0.0], cuts[:-1]])
        w = cuts - lo
        keep = w > 1e-15
        mid = 0.5 * (lo + cuts)[keep]
        a = xa[np.minimum(np.searchsorted(ca, mid), xa.size - 1)]
        b = xb[np.minimum(np.searchsorted(cb, mid), xb.size - 1)]
        w = w[keep]
        return a, b, w / w.sum()

    def interpolated(self, t: float) -> SpectralMeasure:
        """Spectrum of ``(1-t)A + tB``, coinciding atoms merged."""
        a, b, w = self.coupling()
        c = (1 - t) * a + t * b
        locs, inv = np.unique(c, return_inverse=True)
        wts = np.bincount(inv.ravel(), weights=w)
        return SpectralMeasure(locs, wts / wts.sum())


def _check_time(t):
    if not 0 < t < 1:
        if t >= 1:
            raise BridgeTimeOverflow(f"bridge time {t} must be below 1")
        raise ValueError(f"bridge time {t} must lie in (0, 1)")


def bridge_solver(problem: HCIZProblem, t: float) -> HermitianSolver:
    _check_time(t)
    return HermitianSolver(problem.interpolated(t), GUE(), t * (1 - t))


def bridge_resolvent(problem: HCIZProblem, z, t: float) -> complex:
    """Herglotz solution of ``G = G_br(z - t(1-t) G)``."""
    return bridge_solver(problem, t).solve(z)


def bridge_characteristic_map(problem: HCIZProblem, z0, alpha0, t: float):
    """Closed-form bridge characteristic from ``(z0, alpha0)`` at time 0 to ``t``.

    Initial momenta are ``p0 = tr (z0 - A + alpha0 B)^-1`` and
    ``p_alpha0 = tr B (z0 - A + alpha0 B)^-1`` under the comonotone pairing.
    """
    if t >= 1:
        raise BridgeTimeOverflow(f"bridge time {t} must be below 1")
    a, b, w = problem.coupling()
    z0 = np.asarray(z0, dtype=complex)
    alpha0 = np.asarray(alpha0, dtype=complex)
    d = z0[..., None] - a + alpha0[..., None] * b
    p0 = np.sum(w / d, axis=-1)
    pa0 = np.sum(w * b / d, axis=-1)
    q = np.stack([z0, alpha0], axis=-1)
    p = np.stack([p0, pa0], axis=-1)
    qt, pt = Bridge(1.0).flow(q, p, t)
    return qt[..., 0], pt[..., 0], qt[..., 1], pt[..., 1]


def bridge_initial_state(problem: HCIZProblem, z0, alpha0) -> np.ndarray:
    """Phase point ``(z, alpha, p, p_alpha)`` at time 0 for RK4 integration."""
    a, b, w = problem.coupling()
    z0 = np.asarray(z0, dtype=complex)
    alpha0 = np.asarray(alpha0, dtype=complex)
    d = z0[..., None] - a + alpha0[..., None] * b
    return np.stack([z0, alpha0, np.sum(w / d, axis=-1), np.sum(w * b / d, axis=-1)], axis=-1)


# ------------------------------------------------------------------ fluid


@dataclass(frozen=True)
class FluidField:
    """Density and velocity on an ``(t, x)`` grid; arrays are indexed ``[it, ix]``."""

    x: np.ndarray
    t: np.ndarray
    rho: np.ndarray
    mu: np.ndarray | None = None
    support: np.ndarray | None = None
    problem: HCIZProblem | None = field(default=None, repr=False)
    epsilon: float = 0.0

    def masses(self) -> np.ndarray:
        return np.trapezoid(self.rho, self.x, axis=1)


def _support_mask(problem, x, t):
    mask = np.zeros((t.size, x.size), dtype=bool)
    for i, ti in enumerate(t):
        edges = caustic_edges(problem.interpolated(ti), GUE(), ti * (1 - ti))
        for lo, hi in zip(edges[::2], edges[1::2]):
            mask[i] |= (x > lo) & (x < hi)
    return mask


def bridge_fluid(problem: HCIZProblem, x_grid, t_grid, epsilon: float = 1e-9) -> FluidField:
    """Density ``rho(x, t)`` of the bridge on a grid, with its support mask."""
    x = np.asarray(x_grid, dtype=float).reshape(-1)
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if np.any(np.diff(t) <= 0) or np.any(np.diff(x) <= 0):
        raise ValueError("grids must be increasing")
    rho = np.empty((t.size, x.size))
    zs = x + 1j * epsilon
    for i, ti in enumerate(t):
        g = bridge_solver(problem, ti).solve_many(zs)
        rho[i] = np.maximum(0.0, -g.imag / math.pi)
    return FluidField(x, t, rho, None, _support_mask(problem, x, t), problem, float(epsilon))


def _analytic_flux(problem, x, t, epsilon):
    """Probability flux ``j = Im(d phi / dt) / pi`` from the complex log-potential.

    With ``c_k = (1-t)a_k + t b_k``, ``s = t(1-t)`` and ``z0 = z - s G``,
    ``phi = sum_k w_k log(z0 - c_k) + s G^2 / 2`` and
    ``d phi/dt = -(1-2t) G^2 / 2 - sum_k w_k (b_k - a_k) / (z0 - c_k)``.
    The cumulative distribution is ``1 - Im phi / pi`` on the axis, so ``j``
    equals minus its time derivative.
    """
    a, b, w = problem.coupling()
    zs = x + 1j * epsilon
    out = np.empty((t.size, x.size))
    for i, ti in enumerate(t):
        s = ti * (1 - ti)
        g = bridge_solver(problem, ti).solve_many(zs)
        c = (1 - ti) * a + ti * b
        z0 = zs - s * g
        dphi = -(1 - 2 * ti) * g * g / 2 - np.sum(w * (b - a) / (z0[:, None] - c), axis=1)
        out[i] = dphi.imag / math.pi
    return out


def euler_match_velocity(fluid: FluidField, method: str = "auto") -> FluidField:
    """Velocity ``mu`` from continuity ``d_t rho + d_x(rho mu) = 0``.

    ``mu = -(1/rho) d_t int_{-inf}^x rho``.  With ``method="analytic"`` (the
    default when the field carries its problem) the flux comes from the
    complex potential; ``method="grid"`` differentiates the gridded
    cumulative density in time with centered differences.  ``mu`` is set to 0
    outside the support.
    """
    if method == "auto":
        method = "analytic" if fluid.problem is not None else "grid"
    support = fluid.support if fluid.support is not None else fluid.rho > 0
    if np.any(fluid.rho[support] < 1e-10):
        raise DegenerateDensity("density below 1e-10 inside the reported support")
    if method == "analytic":
        if fluid.problem is None:
            raise ValueError("analytic velocity needs the originating problem")
        flux = _analytic_flux(fluid.problem, fluid.x, fluid.t, fluid.epsilon or 1e-9)
    elif method == "grid":
        cdf = np.concatenate([np.zeros((fluid.t.size, 1)),
                              np.cumsum(0.5 * (fluid.rho[:, 1:] + fluid.rho[:, :-1])
                                        * np.diff(fluid.x), axis=1)], axis=1)
        if fluid.t.size < 2:
            raise ValueError("grid velocity needs at least two time slices")
        flux = -np.gradient(cdf, fluid.t, axis=0)
    else:
        raise ValueError(f"unknown method {method!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = np.where(support, flux / fluid.rho, 0.0)
    return replace(fluid, mu=mu)


def interior_mask(fluid: FluidField, t_margin: float = 0.15, rho_frac: float = 0.5) -> np.ndarray:
    """Nodes whose full centered stencil sits well inside the support.

    Excludes ``t`` within ``t_margin`` of either end and nodes whose density is
    below ``rho_frac`` of the slice maximum (square-root edges).
    """
    sup = fluid.support if fluid.support is not None else fluid.rho > 0
    strong = sup & (fluid.rho >= rho_frac * fluid.rho.max(axis=1, keepdims=True))
    m = np.zeros_like(strong)
    m[1:-1, 1:-1] = (strong[1:-1, 1:-1] & strong[:-2, 1:-1] & strong[2:, 1:-1]
                     & strong[1:-1, :-2] & strong[1:-1, 2:])
    tt = fluid.t[:, None]
    return m & (tt >= t_margin) & (tt <= 1 - t_margin)


def euler_residual(fluid: FluidField, mask=None, mu=None) -> float:
    """Sup-norm of ``d_t mu + mu d_x mu - (pi^2/2) d_x(rho^2)`` on ``mask``."""
    mu = fluid.mu if mu is None else mu
    mask = interior_mask(fluid) if mask is None else mask
    dt = np.gradient(mu, fluid.t, axis=0)
    dx = np.gradient(mu, fluid.x, axis=1)
    force = 0.5 * math.pi ** 2 * np.gradient(fluid.rho ** 2, fluid.x, axis=1)
    r = dt + mu * dx - force
    return float(np.max(np.abs(r[mask])))


def burgers_residual(fluid: FluidField, mask=None, mu=None) -> float:
    """Sup-norm of ``d_t h + h d_x h`` for ``h = mu + i pi rho`` on ``mask``."""
    mu = fluid.mu if mu is None else mu
    mask = interior_mask(fluid) if mask is None else mask
    h = mu + 1j * math.pi * fluid.rho
    r = np.gradient(h, fluid.t, axis=0) + h * np.gradient(h, fluid.x, axis=1)
    return float(np.max(np.abs(r[mask])))


def velocity_sign_check(fluid: FluidField, mask=None) -> dict:
    """Burgers residuals of ``+mu`` and ``-mu``; the constructed sign should win."""
    return {"+": burgers_residual(fluid, mask), "-": burgers_residual(fluid, mask, -fluid.mu)}


# ------------------------------------------------------------------ action


@dataclass(frozen=True)
class ActionResult:
    s_of_delta: list
    log_coefficient: float
    bulk_constant: float


def slice_integrand(fluid: FluidField) -> np.ndarray:
    """``1/2 int dx rho (mu^2 + pi^2 rho^2 / 3)`` for every time slice."""
    if fluid.mu is None:
        raise ValueError("velocity missing; run euler_match_velocity first")
    dens = fluid.rho * (fluid.mu ** 2 + math.pi ** 2 * fluid.rho ** 2 / 3)
    return 0.5 * np.trapezoid(dens, fluid.x, axis=1)


def action_evaluate(fluid: FluidField, delta_list) -> ActionResult:
    """Cut-off action ``S(delta) = int_delta^(1-delta) I(t) dt`` and its log fit.

    The slice integrand is linearly interpolated at the cutoffs; the fit is
    ``S = -c log(delta) + const`` by least squares.
    """
    deltas = np.asarray(delta_list, dtype=float)
    if np.any((deltas <= 0) | (deltas >= 0.5)):
        raise ValueError("cutoffs must lie in (0, 1/2)")
    integrand = slice_integrand(fluid)
    t = fluid.t
    values = []
    for d in deltas:
        if d < t[0] - 1e-12 or 1 - d > t[-1] + 1e-12:
            raise ValueError(f"time grid does not cover [{d}, {1 - d}]")
        inner = (t > d) & (t < 1 - d)
        tt = np.concatenate([[d], t[inner], [1 - d]])
        ii = np.concatenate([[np.interp(d, t, integrand)], integrand[inner],
                             [np.interp(1 - d, t, integrand)]])
        values.append(float(np.trapezoid(ii, tt)))
    values = np.asarray(values)
    if deltas.size >= 2:
        slope, const = np.polyfit(-np.log(deltas), values, 1)
    else:
        slope, const = float("nan"), float("nan")
    return ActionResult([(float(d), float(v)) for d, v in zip(deltas, values)],
                        float(slope), float(const))
