"""Solving the Hamilton-Jacobi dynamics along characteristics.

Hermitian ensembles with a closed-form characteristic map are solved
globally: for atomic initial data the map ``z0 -> z`` is rational, so clearing
denominators gives a polynomial whose roots (companion-matrix eigenvalues)
contain every characteristic ending at ``z``.  The admissible one is picked by
the Herglotz condition and polished by Newton's method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ensembles import Ensemble, HolomorphicEnsemble, QuaternionicEnsemble
from .errors import (BranchAmbiguity, NoConvergence, NonHermitianSpec, StepUnderflow,
                     UnsupportedVariant)
from .measures import SpectralMeasure
from .quaternion import as_complex

TIE_BREAK_DELTA = 1e-9


@dataclass(frozen=True)
class PhaseTrajectory:
    """RK4 time series; ``states[..., :dim]`` are coordinates, the rest momenta."""

    times: np.ndarray
    states: np.ndarray
    dim: int
    error_estimate: float = float("nan")

    @property
    def q(self) -> np.ndarray:
        return self.states[..., : self.dim]

    @property
    def p(self) -> np.ndarray:
        return self.states[..., self.dim:]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True)
class FieldSample:
    """Electric field ``g = p_z`` and ``|p_w|^2`` at ``(z, w -> 0)``."""

    z: complex
    g: complex
    pw_sq: float
    inside_support: bool
    ambiguous: bool = False
    branches: tuple = field(default=(), repr=False)


# ------------------------------------------------------------ Hermitian


def _require_hermitian(initial: SpectralMeasure, spec: Ensemble):
    if not (isinstance(spec, HolomorphicEnsemble) and spec.hermitian):
        raise NonHermitianSpec(f"{spec.variant} is not a Hermitian scalar ensemble")
    if not initial.is_real:
        raise NonHermitianSpec("Hermitian flows need real atom locations")


class HermitianSolver:
    """Characteristic solver for one (measure, ensemble, time) triple.

    The polynomials depend only on the inputs, so one instance can be reused
    across a grid of evaluation points.
    """

    def __init__(self, initial: SpectralMeasure, spec: HolomorphicEnsemble, t: float):
        _require_hermitian(initial, spec)
        if t < 0:
            raise ValueError("time must be non-negative")
        self.initial, self.spec, self.t = initial, spec, float(t)
        den, num = initial.denominator_numerator()
        self.den, self.num = den, num
        if self.t > 0:
            zn, zd, pn, pd = spec.characteristic_polynomials(den, num, self.t)
            self.zn, self.zd, self.pn, self.pd = zn, zd, pn, pd
            self.dzn, self.dzd = zn.deriv(), zd.deriv()

    def residual(self, z, g) -> float:
        """``|p0 - G0(z0)|`` after transporting ``(z, g)`` back to time 0."""
        if self.t == 0:
            return abs(g - complex(self.initial.resolvent(z)))
        z0, p0, _, _ = self.spec.backward(z, g, self.t)
        return abs(p0 - complex(self.initial.resolvent(z0)))

    def _polish(self, z, g):
        spec, G0 = self.spec, self.initial
        best, best_res = g, self.residual(z, g)
        for _ in range(8):
            if best_res < 1e-15:
                break
            z0, p0, dz0, dp0 = spec.backward(z, g, self.t)
            f = p0 - complex(G0.resolvent(z0))
            df = dp0 - complex(G0.resolvent_derivative(z0)) * dz0
            if df == 0:
                break
            g = g - f / df
            res = self.residual(z, g)
            if res < best_res:
                best, best_res = g, res
            else:
                break
        return best, best_res

    def candidates(self, z):
        """All characteristics ending at ``z``: list of ``(g, z0, residual)``."""
        poly = self.zn - self.zd * z
        roots = poly.roots()
        dpoly = poly.deriv()
        out = []
        for r in roots:
            for _ in range(3):
                d = dpoly(r)
                if d == 0:
                    break
                step = poly(r) / d
                r = r - step
                if abs(step) < 1e-16 * (1 + abs(r)):
                    break
            pd = self.pd(r)
            if pd == 0 or self.zd(r) == 0:
                continue
            g, res = self._polish(z, self.pn(r) / pd)
            if not np.isfinite(g) or res > 1e-8 * (1 + abs(g)):
                continue
            z0 = self.spec.backward(z, g, self.t)[0]
            out.append((complex(g), complex(z0), res))
        return out

    def _admissible(self, z, cands):
        s = math.copysign(1.0, z.imag)
        return [c for c in cands if c[0].imag * s < 0 and c[1].imag * s > 0]

    def solve(self, z) -> complex:
        z = as_complex(z, "z")
        return complex(self.solve_many(np.array([z]))[0])

    def _batched(self, flat, t):
        """Every characteristic ending at each ``flat[i]``: ``(g, z0, residual)`` rows."""
        if t == self.t:
            zn, zd, pn, pd = self.zn, self.zd, self.pn, self.pd
        else:
            zn, zd, pn, pd = self.spec.characteristic_polynomials(self.den, self.num, t)
        a = zn.coef
        b = np.zeros_like(a)
        b[: zd.coef.size] = zd.coef
        coef = a[None, :] - flat[:, None] * b[None, :]
        lead = coef[:, -1]
        if np.any(lead == 0):
            raise BranchAmbiguity("characteristic polynomial drops degree")
        coef = coef / lead[:, None]
        deg = coef.shape[1] - 1
        comp = np.zeros((flat.size, deg, deg), dtype=complex)
        comp[:, 1:, :-1] = np.eye(deg - 1)
        comp[:, :, -1] = -coef[:, :-1]
        roots = np.linalg.eigvals(comp)
        dcoef = coef[:, 1:] * np.arange(1, deg + 1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for _ in range(3):
                f = _horner(coef, roots)
                df = _horner(dcoef, roots)
                roots = np.where(df != 0, roots - f / df, roots)
            g = pn(roots) / pd(roots)
        return self._polish_many(flat[:, None], g, 3)

    def _polish_many(self, z, g, iterations):
        G0 = self.initial
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for _ in range(iterations):
                z0, p0, dz0, dp0 = self.spec.backward(z, g, self.t)
                f = p0 - G0.resolvent(z0)
                df = dp0 - G0.resolvent_derivative(z0) * dz0
                g = g - f / df
            z0, p0, _, _ = self.spec.backward(z, g, self.t)
            res = np.abs(p0 - G0.resolvent(z0))
        bad = ~np.isfinite(g) | ~np.isfinite(res)
        return np.where(bad, np.nan, g), z0, np.where(bad, np.inf, res)

    def _admissible_mask(self, flat, g, z0, res, tol=1e-10):
        """Herglotz sign, start point on the same side, and a characteristic that never
        crosses the real axis on the way."""
        s = np.sign(flat.imag)[:, None]
        ok = (res < tol * np.maximum(1, np.abs(g))) & (g.imag * s < 0) & (z0.imag * s > 0)
        if not np.any(ok):
            return ok
        frac = np.linspace(0, 1, 17)[1:-1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            _, p0, _, _ = self.spec.backward(flat[:, None], g, self.t)
            zz = self.spec.flow(z0[..., None, None] + 0 * frac[:, None],
                                p0[..., None, None] + 0 * frac[:, None], self.t * frac[:, None])
            if zz is not None:
                ok &= np.all(zz[0][..., 0].imag * s[..., None] > 0, axis=-1)
        # several polynomial roots can polish onto the same characteristic
        with np.errstate(invalid="ignore"):
            same = np.abs(g[:, :, None] - g[:, None, :]) <= 1e-10 * (1 + np.abs(g[:, :, None]))
        earlier = np.tril(np.ones(same.shape[1:], dtype=bool), -1)
        ok &= ~np.any(same & earlier & ok[:, None, :], axis=2)
        return ok

    def _track_in_z(self, flat) -> np.ndarray:
        """Continue the root behaving like ``1/z`` far from the axis down to ``flat``.

        Newton continuation is tried first; rows where it breaks down are redone by
        nearest-root tracking over all polynomial roots.
        """
        atoms = self.initial.real_locations
        top = 1e3 * (1 + np.max(np.abs(atoms)) + self.t)
        sgn = np.sign(flat.imag)
        heights = np.geomspace(top, np.abs(flat.imag).min(), 200)
        g = None
        for h in heights:
            zk = flat.real + 1j * sgn * np.maximum(h, np.abs(flat.imag))
            g = 1 / zk if g is None else g
            g, _, res = self._polish_many(zk, g, 4)
        failed = ~(res < 1e-10 * np.maximum(1, np.abs(g)))
        if np.any(failed):
            sub = flat[failed]
            rows = np.arange(sub.size)
            gs = None
            for h in heights[::2]:
                zk = sub.real + 1j * np.sign(sub.imag) * np.maximum(h, np.abs(sub.imag))
                gk, z0k, rk = self._batched(zk, self.t)
                ok = self._admissible_mask(zk, gk, z0k, rk, tol=1e-8)
                ref = 1 / zk if gs is None else gs
                dist = np.abs(gk - ref[:, None])
                dist = np.where(ok, dist, np.where(np.isfinite(gk), 1e3 * dist + 1e3, np.inf))
                gs = gk[rows, np.argmin(dist, axis=1)]
            g[failed] = gs
        return g

    def solve_many(self, zs) -> np.ndarray:
        """Physical resolvent at every ``z`` of an array."""
        zs = np.asarray(zs, dtype=complex)
        flat = zs.ravel()
        if not np.all(np.isfinite(flat)):
            raise ValueError("z must be finite")
        if np.any(flat.imag == 0):
            raise ValueError("z must be off the real axis")
        if self.t == 0:
            return np.asarray(self.initial.resolvent(zs), dtype=complex)
        g, z0, res = self._batched(flat, self.t)
        ok = self._admissible_mask(flat, g, z0, res)
        count = ok.sum(axis=1)
        if np.any(count == 0):
            i = int(np.argmin(count))
            raise BranchAmbiguity(f"no admissible root at z={flat[i]!r}, t={self.t}")
        out = np.where(ok, g, 0).sum(axis=1)
        multi = np.nonzero(count > 1)[0]
        if multi.size:
            ref = self._track_in_z(flat[multi])
            dist = np.where(ok[multi], np.abs(g[multi] - ref[:, None]), np.inf)
            order = np.argsort(dist, axis=1)
            first = g[multi, order[:, 0]]
            out[multi] = first
            second = g[multi, order[:, 1]]
            close = np.isfinite(dist[np.arange(multi.size), order[:, 1]]) & (
                np.abs(first - second) < 1e-7 * (1 + np.abs(first)))
            if np.any(close):
                # coalescing roots at a shock: follow the evaluation further off the axis
                idx = multi[close]
                shifted = flat[idx] + 1j * np.sign(flat[idx].imag) * TIE_BREAK_DELTA
                near = self.solve_many(shifted)
                d = np.where(ok[idx], np.abs(g[idx] - near[:, None]), np.inf)
                out[idx] = g[idx, np.argmin(d, axis=1)]
        out, _, res = self._polish_many(flat, out, 2)
        return out.reshape(zs.shape)

    def caustics(self) -> list:
        """Real critical points of the characteristic map, as (z0, z) pairs."""
        if self.t == 0:
            return []
        crit = self.dzn * self.zd - self.zn * self.dzd
        if np.all(np.abs(crit.coef.imag) <= 1e-12 * np.max(np.abs(crit.coef))):
            crit = crit.__class__(crit.coef.real)
        atoms = self.initial.real_locations
        scale = 1 + max(np.max(np.abs(atoms)), self.t)
        out = []
        dcrit = crit.deriv()
        for r in crit.roots():
            if abs(r.imag) > 1e-6 * scale:
                continue
            x = float(r.real)
            for _ in range(4):
                d = dcrit(x)
                if d == 0:
                    break
                x = x - float(np.real(crit(x) / d))
            if np.min(np.abs(atoms - x)) < 1e-10 * scale or abs(self.zd(x)) < 1e-300:
                continue
            out.append((x, float(np.real(self.zn(x) / self.zd(x)))))
        return out


def _horner(coef, x):
    """Row-wise polynomial evaluation; ``coef[i]`` is low-to-high order for ``x[i]``."""
    out = np.zeros_like(x)
    for k in range(coef.shape[1] - 1, -1, -1):
        out = out * x + coef[:, k:k + 1]
    return out


def pastur_solve(initial: SpectralMeasure, spec: Ensemble, z, t: float) -> complex:
    """Resolvent at time ``t`` of a Hermitian flow started from ``initial``.

    Returns the Herglotz root ``G`` (``sign Im G = -sign Im z``) of the
    transported initial condition, e.g. ``G = G0(z - t R(G))`` for additive
    ensembles.
    """
    return HermitianSolver(initial, spec, t).solve(z)


def pastur_residual(initial: SpectralMeasure, spec: Ensemble, z, t: float, g) -> float:
    return HermitianSolver(initial, spec, t).residual(complex(z), complex(g))


def caustic_edges(initial: SpectralMeasure, spec: Ensemble, t: float) -> list:
    """Support edges: images of the real zeros of ``dz/dz0``, sorted ascending."""
    if t <= 0:
        raise ValueError("caustics need t > 0")
    pts = HermitianSolver(initial, spec, t).caustics()
    edges = sorted(z for _, z in pts)
    out = []
    for e in edges:
        if not out or abs(e - out[-1]) > 1e-12 * (1 + abs(e)):
            out.append(e)
    return out


# ---------------------------------------------------------- quaternionic


def _outside_branch(initial, spec, z, t):
    x, wts = initial.locations, initial.weights
    a0 = float(spec.generating(0.0))
    if spec.tau == 0:
        roots = np.array([z])
    else:
        den, num = initial.denominator_numerator()
        from numpy.polynomial import Polynomial

        poly = (Polynomial([-z, 1]) * den) + num * (spec.tau * t)
        roots = poly.roots()
    good = []
    for z0 in roots:
        d = np.abs(z0 - x) ** 2
        if np.any(d == 0):
            continue
        if t * a0 * np.sum(wts / d) <= 1 + 1e-12:
            good.append(complex(z0))
    if not good:
        return None
    z0 = min(good, key=lambda r: abs(r - z))
    return complex(initial.resolvent(z0))


def _inside_residual(v, initial, spec, z, t):
    x, wts = initial.locations, initial.weights
    z0 = complex(v[0], v[1])
    s = v[2]
    d = np.abs(z0 - x) ** 2 + s
    with np.errstate(divide="ignore", invalid="ignore"):
        pz = np.sum(wts * np.conj(z0 - x) / d)
        S = np.sum(wts / d)
        r1 = z0 + spec.tau * t * pz - z
        r2 = t * S * float(spec.generating(-s * S * S)) - 1.0
    return np.array([r1.real, r1.imag, r2]), pz, S


def _newton_inside(initial, spec, z, t, seed, max_iter=80):
    v = np.asarray(seed, dtype=float)
    f, _, _ = _inside_residual(v, initial, spec, z, t)
    norm = np.linalg.norm(f)
    for _ in range(max_iter):
        if norm < 1e-14:
            break
        jac = np.empty((3, 3))
        for k in range(3):
            h = 1e-7 * max(1.0, abs(v[k]))
            e = np.zeros(3)
            e[k] = h
            fp = _inside_residual(v + e, initial, spec, z, t)[0]
            fm = _inside_residual(v - e, initial, spec, z, t)[0]
            jac[:, k] = (fp - fm) / (2 * h)
        try:
            step = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        while lam > 1e-4:
            trial = v + lam * step
            trial[2] = max(trial[2], 0.0)
            ft = _inside_residual(trial, initial, spec, z, t)[0]
            nt = np.linalg.norm(ft)
            if nt < norm:
                break
            lam *= 0.5
        else:
            return None
        v, f, norm = trial, ft, nt
    if norm > 1e-11:
        return None
    return v


def quaternionic_field(initial: SpectralMeasure, spec: Ensemble, z, t: float) -> FieldSample:
    """Field ``(g, |p_w|^2)`` at ``(z, w=0)`` for Ginibre, elliptic or bi-unitary flows.

    Characteristics start at ``(z0, w0)`` with ``w0 >= 0`` real (gauge choice);
    momenta are constant, so the end point satisfies ``z = z0 + t dH/dp_z`` and
    ``0 = w0 + t dH/dp_w``.  A solution with ``w0^2 > 0`` means ``z`` lies in the
    spectral support.
    """
    if not isinstance(spec, QuaternionicEnsemble):
        raise UnsupportedVariant(f"{spec.variant} is not a quaternionic additive ensemble")
    if not t > 0:
        raise ValueError("t must be positive")
    z = as_complex(z, "z")
    seeds_z0 = [z]
    if 0 < abs(spec.tau) < 1:
        seeds_z0.append((z - spec.tau * z.conjugate()) / (1 - spec.tau ** 2))
    found = []
    for z0 in seeds_z0:
        for s0 in (0.0, t / 2, t):
            v = _newton_inside(initial, spec, z, t, (z0.real, z0.imag, s0))
            if v is None or v[2] <= 1e-12:
                continue
            _, pz, S = _inside_residual(v, initial, spec, z, t)
            g, pw_sq = complex(pz), float(v[2] * S * S)
            if not any(abs(g - b[0]) < 1e-8 and abs(pw_sq - b[1]) < 1e-8 for b in found):
                found.append((g, pw_sq))
    if found:
        g, pw_sq = found[0]
        return FieldSample(z, g, pw_sq, True, ambiguous=len(found) > 1, branches=tuple(found))
    g = _outside_branch(initial, spec, z, t)
    if g is None:
        raise NoConvergence(f"no characteristic reaches z={z!r} at t={t}")
    return FieldSample(z, g, 0.0, False)


# ---------------------------------------------------------------- RK4


def _rhs(spec, dim):
    def f(t, y):
        hv = spec.hamiltonian(y[..., :dim], y[..., dim:], t)
        return np.concatenate([hv.grad_p, -hv.grad_q], axis=-1)

    return f


def _rk4(f, t0, y0, h, n, keep):
    y = y0
    ys = [y0] if keep else None
    t = t0
    for i in range(n):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
        if keep:
            ys.append(y)
    return (np.stack(ys) if keep else y)


def integrate_hamilton(spec: Ensemble, state0, t_span, step: float,
                       error_estimate: bool = True) -> PhaseTrajectory:
    """Fixed-step classical RK4 for ``dq/dt = dH/dp, dp/dt = -dH/dq``.

    ``state0`` stacks coordinates then momenta on its last axis; leading axes
    are integrated independently.  The step is shrunk to divide the span
    evenly.  With ``error_estimate`` the run is repeated at half step and
    ``|y_h - y_{h/2}| / 15`` is recorded.
    """
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError("t_span must be increasing")
    if not step > 0 or step < 1e-12 * max(1.0, t1 - t0):
        raise StepUnderflow(f"step {step!r} too small for span {t1 - t0!r}")
    n = max(1, math.ceil((t1 - t0) / step - 1e-9))
    if n > 50_000_000:
        raise StepUnderflow(f"{n} steps requested")
    h = (t1 - t0) / n
    y0 = np.asarray(state0, dtype=complex)
    dim = spec.dim
    if y0.shape[-1] != 2 * dim:
        raise ValueError(f"{spec.variant} states have {2 * dim} components")
    f = _rhs(spec, dim)
    ys = _rk4(f, t0, y0, h, n, keep=True)
    err = float("nan")
    if error_estimate:
        fine = _rk4(f, t0, y0, h / 2, 2 * n, keep=False)
        err = float(np.max(np.abs(fine - ys[-1]))) / 15
    times = t0 + h * np.arange(n + 1)
    times[-1] = t1
    return PhaseTrajectory(times, ys, dim, err)


def evolve(spec: Ensemble, state0, t: float, step: float = 1e-3) -> np.ndarray:
    """State at time ``t`` (from 0): closed form when the ensemble has one, else RK4."""
    y0 = np.asarray(state0, dtype=complex)
    dim = spec.dim
    out = spec.flow(y0[..., :dim], y0[..., dim:], t)
    if out is not None:
        return np.concatenate(out, axis=-1)
    return integrate_hamilton(spec, y0, (0.0, t), step, error_estimate=False).final
