"""Named reproduction cases with pinned tolerances.

Each case returns a :class:`CaseResult` holding its checks and the data it
produced.  Cases are deterministic given their seed; wall-clock time is never
part of a result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .characteristics import (HermitianSolver, caustic_edges, integrate_hamilton,
                              pastur_residual)
from .ensembles import GUE, Elliptic, Ginibre, SingularValue, UnitaryZ, Wishart
from .hciz import (HCIZProblem, action_evaluate, bridge_fluid, bridge_solver, burgers_residual,
                   euler_match_velocity, euler_residual, interior_mask, slice_integrand,
                   velocity_sign_check)
from .measures import AngularMeasure, SpectralMeasure
from .montecarlo import (disk_radial_cdf, eigendecompose, ellipse_semi_axes, ks_distance,
                         largest_phase_gap, matrix_walk, overlap_stats, radial_overlap_profile,
                         replica_rng, run_replicas, sample_ensemble)
from .spectra import FieldGrid2D, density_1d, density_2d, ginibre_field, support_boundary
from .unitary import gap_closing_time, unitary_density, unitary_density_zplane


@dataclass(frozen=True)
class Check:
    label: str
    value: float
    limit: float
    relation: str = "<"

    @property
    def ok(self) -> bool:
        if self.relation == "<":
            return bool(self.value < self.limit)
        if self.relation == ">":
            return bool(self.value > self.limit)
        raise ValueError(self.relation)

    def as_dict(self) -> dict:
        return {"label": self.label, "value": float(self.value), "limit": float(self.limit),
                "relation": self.relation, "ok": self.ok}


@dataclass
class CaseResult:
    name: str
    checks: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def add(self, label, value, limit, relation="<"):
        self.checks.append(Check(label, float(value), float(limit), relation))

    def summary(self) -> dict:
        return {"case": self.name, "passed": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


# ------------------------------------------------------------------ cases


def case_semicircle(**_) -> CaseResult:
    """Free diffusion from a point mass: density and edges of the semicircle."""
    res = CaseResult("semicircle")
    eps = 1e-6
    xs, rhos, exact, ts = [], [], [], []
    for t in (0.25, 1.0, 4.0):
        r = 2 * math.sqrt(t)
        x = np.linspace(-3.0, 3.0, 601)
        dens = density_1d(HermitianSolver(SpectralMeasure.point(0.0), GUE(), t).solve, x, eps)
        ex = np.sqrt(np.maximum(r * r - x * x, 0.0)) / (2 * math.pi * t)
        # the eps-smoothing bias grows like eps / sqrt(distance to edge)
        interior = np.abs(np.abs(x) - r) > 0.1 * r
        res.add(f"density L_inf t={t}", np.max(np.abs(dens.rho - ex)[interior]), 1e-6)
        edges = caustic_edges(SpectralMeasure.point(0.0), GUE(), t)
        res.add(f"edges t={t}", max(abs(edges[0] + r), abs(edges[-1] - r)), 1e-8)
        xs.append(x), rhos.append(dens.rho), exact.append(ex), ts.append(np.full(x.size, t))
    res.tables["semicircle.csv"] = (["t", "x", "rho", "rho_exact"],
                                    [np.concatenate(c) for c in (ts, xs, rhos, exact)])
    return res


def _random_measure(rng, positive=False):
    k = int(rng.integers(2, 9))
    locs = rng.uniform(0.1, 3.0, k) if positive else rng.uniform(-2.0, 2.0, k)
    w = rng.uniform(0.2, 1.0, k)
    return SpectralMeasure(locs, w / w.sum())


def case_pastur(seed: int = 0, **_) -> CaseResult:
    """Residual and Herglotz sign of the implicit resolvent equation."""
    res = CaseResult("pastur-residual")
    specs = [("GUE", GUE(), False), ("Wishart r=0.5", Wishart(0.5), True),
             ("Wishart r=1", Wishart(1.0), True), ("Wishart r=2", Wishart(2.0), True)]
    rows = []
    for k, (label, spec, positive) in enumerate(specs):
        rng = replica_rng(seed, k)
        worst, herglotz = 0.0, 0
        for j in range(20):
            mu = _random_measure(rng, positive)
            t = float(rng.uniform(0.05, 2.0))
            z = rng.uniform(-4, 6, 10) + 1j * 10 ** rng.uniform(-3, 0.5, 10)
            g = HermitianSolver(mu, spec, t).solve_many(z)
            for zi, gi in zip(z, g):
                r = pastur_residual(mu, spec, zi, t, gi)
                worst = max(worst, r)
                herglotz += int(not gi.imag < 0)
                rows.append((k, t, zi.real, zi.imag, gi.real, gi.imag, r))
        res.add(f"{label} residual", worst, 1e-12)
        res.add(f"{label} Herglotz violations", herglotz, 0.5)
    res.tables["pastur.csv"] = (["ensemble", "t", "re_z", "im_z", "re_g", "im_g", "residual"],
                                [np.array(c) for c in zip(*rows)])
    return res


def case_ginibre_fields(**_) -> CaseResult:
    """Closed-form Ginibre field: density, overlap and support radius."""
    res = CaseResult("ginibre-fields")
    t = 1.0
    sampler = ginibre_field(t)
    errs = []
    for n in (201, 401):
        axis = np.linspace(-1.5, 1.5, n)
        fld = FieldGrid2D.from_sampler(sampler, axis, axis)
        rho = density_2d(fld)
        zi = rho.x[None, :] + 1j * rho.y[:, None]
        inner = np.abs(zi) < math.sqrt(t) - 2 * fld.hx
        errs.append(float(np.max(np.abs(rho.values[inner] - 1 / (math.pi * t)))))
        overlap = np.maximum(fld.pw_sq, 0) / math.pi
        exact = np.maximum(t - np.abs(fld.z) ** 2, 0) / (math.pi * t * t)
        errs.append(float(np.max(np.abs(overlap - exact))))
    res.add("density and overlap grid error", max(errs), 1e-6)
    pts = support_boundary(lambda z: sampler(z)[1], t)
    radii = np.abs(np.array(pts))
    res.add("boundary radius error", np.max(np.abs(radii - math.sqrt(t))), 1e-6)
    res.tables["ginibre_boundary.csv"] = (["x", "y"], [np.real(pts), np.imag(pts)])
    return res


def case_ginibre_radial(seed: int = 0, n: int = 512, seeds: int = 5, **_) -> CaseResult:
    """Monte-Carlo radial distribution of Ginibre eigenvalues."""
    res = CaseResult("ginibre-radial")
    t = 1.0
    eigs = run_replicas(lambda rng: eigendecompose(sample_ensemble(Ginibre(), n, t, rng)),
                        seed, seeds)
    ks = [ks_distance(np.abs(e), disk_radial_cdf(t)) for e in eigs]
    res.add("radial KS (worst seed)", max(ks), 0.04)
    res.tables["ginibre_eigs.csv"] = (["replica", "re", "im"], [
        np.repeat(np.arange(seeds), n), np.concatenate(eigs).real, np.concatenate(eigs).imag])
    return res


def case_ginibre_overlap(seed: int = 0, n: int = 256, seeds: int = 20, **_) -> CaseResult:
    """Monte-Carlo diagonal overlaps against ``(t - |z|^2) / (pi t^2)``."""
    res = CaseResult("ginibre-overlap")
    t = 1.0
    recs = run_replicas(lambda rng: overlap_stats(sample_ensemble(Ginibre(), n, t, rng)),
                        seed, seeds)
    edges = np.array([0.0, 0.5 * math.sqrt(t)])
    measured = radial_overlap_profile(recs, n, edges)[0]
    b = edges[1]
    theory = (2 / t ** 2) * (t * b * b / 2 - b ** 4 / 4) / (math.pi * b * b)
    res.add("overlap ratio deviation |z|<=0.5 sqrt(t)", abs(measured / theory - 1), 0.10)
    res.add("min O_ii", min(float(r.o_diag.min()) for r in recs), 1 - 1e-8, ">")
    lam = np.concatenate([r.eigenvalues for r in recs])
    o = np.concatenate([r.o_diag for r in recs])
    res.tables["ginibre_overlaps.csv"] = (["replica", "re", "im", "o_ii"], [
        np.repeat(np.arange(seeds), n), lam.real, lam.imag, o])
    return res


def _elliptic_constants(state, tau):
    pz, pw = state[..., 2], state[..., 3]
    spec = Elliptic(tau)
    h = spec.hamiltonian(state[..., :2], state[..., 2:]).value
    return np.stack([np.abs(pw) ** 2, tau / 2 * pz ** 2, tau / 2 * np.conj(pz) ** 2, h], -1)


def case_elliptic(seed: int = 0, n: int = 1024, seeds: int = 5, **_) -> CaseResult:
    """Elliptic law: Monte-Carlo semi-axes and constants of motion."""
    res = CaseResult("elliptic")
    tau, t = 0.5, 1.0
    axes = run_replicas(lambda rng: ellipse_semi_axes(
        eigendecompose(sample_ensemble(Elliptic(tau), n, t, rng))), seed, seeds)
    a, b = np.mean(axes, axis=0)
    res.add("major semi-axis rel. error", abs(a / (math.sqrt(t) * (1 + tau)) - 1), 0.02)
    res.add("minor semi-axis rel. error", abs(b / (math.sqrt(t) * (1 - tau)) - 1), 0.02)
    rng = replica_rng(seed, 10_000)
    state = (rng.standard_normal((100, 4)) + 1j * rng.standard_normal((100, 4))) * 0.5
    traj = integrate_hamilton(Elliptic(tau), state, (0.0, 1.0), 1e-3, error_estimate=False)
    c = _elliptic_constants(traj.states, tau)
    drift = np.max(np.abs(c - c[:1]), axis=(0, 1))
    for label, d in zip(("|p_w|^2", "tau p_z^2/2", "tau conj(p_z)^2/2", "H"), drift):
        res.add(f"drift {label}", d, 1e-8)
    res.tables["elliptic_axes.csv"] = (["replica", "a", "b"], [
        np.arange(seeds), np.array(axes)[:, 0], np.array(axes)[:, 1]])
    return res


def case_unitary(seed: int = 0, n: int = 256, seeds: int = 5, dt: float = 0.05, **_) -> CaseResult:
    """Free unitary diffusion from a point mass: mass, charts, gap closing."""
    res = CaseResult("unitary")
    mu0 = AngularMeasure.point(0.0)
    theta = np.linspace(-math.pi, math.pi, 4001)
    cols = []
    for t in (1.0, 2.0, 3.0, 5.0):
        ang = unitary_density(mu0, theta, t)
        zp = unitary_density_zplane(mu0, theta, t)
        res.add(f"mass deviation t={t}", abs(ang.mass() - 1), 5e-3)
        inner = ~ang.near_caustic
        res.add(f"chart agreement t={t}", np.max(np.abs(ang.rho - zp.rho)[inner]), 1e-6)
        cols.append((np.full(theta.size, t), theta, ang.rho, zp.rho))
    res.add("gap closing time error", abs(gap_closing_time(mu0) - 4.0), 0.01)
    threshold = 5 * 2 * math.pi / n
    gaps = {}
    for t in (3.0, 5.0):
        steps = int(round(t / dt))
        gaps[t] = run_replicas(lambda rng: largest_phase_gap(
            eigendecompose(matrix_walk(UnitaryZ(), n, steps, dt, rng))), seed + int(t), seeds)
    res.add("MC smallest largest-gap t=3", min(gaps[3.0]), threshold, ">")
    res.add("MC largest gap t=5", max(gaps[5.0]), threshold)
    res.tables["unitary_density.csv"] = (["t", "theta", "rho_angular", "rho_zplane"],
                                         [np.concatenate(c) for c in zip(*cols)])
    return res


def case_duality(seed: int = 0, **_) -> CaseResult:
    """Singular-value characteristics equal unitary ones at time ``-2t``."""
    res = CaseResult("duality")
    rng = replica_rng(seed, 0)
    q = (0.5 + rng.random(100)) * np.exp(2j * math.pi * rng.random(100))
    p = 0.3 * (rng.standard_normal(100) + 1j * rng.standard_normal(100)) / q
    t = 0.5
    state = np.stack([q, p], -1)
    sv = integrate_hamilton(SingularValue(), state, (0.0, t), 1e-3, error_estimate=False).final
    un = np.concatenate(UnitaryZ().flow(q[:, None], p[:, None], -2 * t), axis=-1)
    res.add("max |z_sv(t) - z_unit(-2t)|", np.max(np.abs(sv[:, 0] - un[:, 0])), 1e-8)
    res.add("max |p_sv(t) - p_unit(-2t)|", np.max(np.abs(sv[:, 1] - un[:, 1])), 1e-8)
    return res


def case_hciz(points: int = 400, **_) -> CaseResult:
    """Bridge between zero matrices: semicircle fluid, velocity and action."""
    res = CaseResult("hciz")
    prob = HCIZProblem(SpectralMeasure.point(0.0), SpectralMeasure.point(0.0))
    x = np.linspace(-1.1, 1.1, points)
    t = np.linspace(0.0025, 0.9975, points)
    fluid = euler_match_velocity(bridge_fluid(prob, x, t))
    s = t[:, None] * (1 - t[:, None])
    exact = np.sqrt(np.maximum(4 * s - x ** 2, 0)) / (2 * math.pi * s)
    res.add("density error vs semicircle", np.max(np.abs(fluid.rho - exact)), 1e-6)
    half = euler_match_velocity(bridge_fluid(prob, x, [0.5]))
    res.add("max |mu(x, 1/2)|", np.max(np.abs(half.mu)), 1e-10)
    mask = interior_mask(fluid)
    coef = np.abs(1 - 2 * t[:, None]) * np.abs(x) / (2 * s)
    res.add("|mu| coefficient error", np.max(np.abs(np.abs(fluid.mu) - coef)[mask]), 1e-3)
    res.add("h-Burgers residual", burgers_residual(fluid, mask), 1e-2)
    res.add("forced Euler residual", euler_residual(fluid, mask), 1e-2)
    signs = velocity_sign_check(fluid, mask)
    res.add("Burgers residual margin (-mu minus +mu)", signs["-"] - signs["+"], 0.0, ">")
    res.add("integrand at t=1/2 error", abs(slice_integrand(half)[0] - 0.5), 1e-3)
    act = action_evaluate(fluid, [0.005, 0.01, 0.02, 0.04])
    res.add("log coefficient error", abs(act.log_coefficient - 0.5), 0.02)
    tt, xx = np.meshgrid(t, x, indexing="ij")
    res.tables["hciz_fluid.csv"] = (["t", "x", "rho", "mu"], [tt, xx, fluid.rho, fluid.mu])
    res.tables["hciz_action.csv"] = (["delta", "action"], [np.array(c) for c in
                                                           zip(*act.s_of_delta)])
    return res


def case_bridge_endpoints(**_) -> CaseResult:
    """Bridge from atoms at +-1 to 0: endpoint limits and time reversal."""
    res = CaseResult("bridge-endpoints")
    a = SpectralMeasure.uniform([-1.0, 1.0])
    b = SpectralMeasure.point(0.0)
    prob = HCIZProblem(a, b)
    ang = 2 * math.pi * (np.arange(256) + 0.5) / 256
    contour = 2.0 * np.exp(1j * ang)
    for t, end, label in ((1e-6, a, "t=1e-6"), (1 - 1e-6, b, "t=1-1e-6")):
        g = bridge_solver(prob, t).solve_many(contour)
        res.add(f"contour error {label}", np.max(np.abs(g - end.resolvent(contour))), 1e-4)
    x = np.linspace(-1.6, 1.6, 321)
    worst = 0.0
    for t in (0.1, 0.3, 0.45):
        fwd = bridge_fluid(prob, x, [t]).rho
        rev = bridge_fluid(prob.swapped(), x, [1 - t]).rho
        worst = max(worst, float(np.max(np.abs(fwd - rev))))
    res.add("time-reversal density mismatch", worst, 1e-10)
    return res


CASES = {
    "semicircle": case_semicircle,
    "pastur-residual": case_pastur,
    "ginibre-fields": case_ginibre_fields,
    "ginibre-radial": case_ginibre_radial,
    "ginibre-overlap": case_ginibre_overlap,
    "elliptic": case_elliptic,
    "unitary": case_unitary,
    "duality": case_duality,
    "hciz": case_hciz,
    "bridge-endpoints": case_bridge_endpoints,
}


def run_case(name: str, **params) -> CaseResult:
    try:
        fn = CASES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; choose from {sorted(CASES)}") from None
    return fn(**{k: v for k, v in params.items() if v is not None})
