"""Property tests over randomly generated inputs."""
import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from eikonal import io
from eikonal.characteristics import HermitianSolver, integrate_hamilton
from eikonal.ensembles import GUE, SingularValue, UnitaryZ, Wishart
from eikonal.hciz import HCIZProblem
from eikonal.measures import AngularMeasure, SpectralMeasure
from eikonal.montecarlo import ks_distance, semicircle_cdf
from eikonal.unitary import unitary_density

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def measures(draw, lo=-2.0, hi=2.0, max_atoms=5):
    k = draw(st.integers(1, max_atoms))
    locs = draw(st.lists(st.floats(lo, hi, **finite), min_size=k, max_size=k, unique=True))
    w = draw(st.lists(st.floats(0.05, 1.0), min_size=k, max_size=k))
    return SpectralMeasure(locs, np.asarray(w) / np.sum(w))


upper = st.builds(complex, st.floats(-4, 4, **finite), st.floats(0.05, 4, **finite))


@settings(max_examples=40, deadline=None)
@given(measures(), upper, st.floats(0.05, 3.0))
def test_gue_resolvent_is_herglotz_root(mu, z, t):
    solver = HermitianSolver(mu, GUE(), t)
    g = solver.solve(z)
    assert g.imag < 0
    assert solver.residual(z, g) < 1e-12
    assert abs(solver.solve(z.conjugate()) - g.conjugate()) < 1e-10


@settings(max_examples=30, deadline=None)
@given(measures(lo=0.1, hi=3.0), upper, st.floats(0.05, 1.5), st.sampled_from([0.5, 1.0, 2.0]))
def test_wishart_resolvent_is_herglotz_root(mu, z, t, r):
    solver = HermitianSolver(mu, Wishart(r), t)
    g = solver.solve(z)
    assert g.imag <= 0
    assert solver.residual(z, g) < 1e-12


@settings(max_examples=30, deadline=None)
@given(measures(), upper, st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_free_diffusion_semigroup(mu, z, t1, t2):
    g_total = HermitianSolver(mu, GUE(), t1 + t2).solve(z)
    g_mid = HermitianSolver(mu, GUE(), t1).solve(z - t2 * g_total)
    assert abs(g_total - g_mid) < 1e-8


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(-math.pi, math.pi), st.floats(-0.5, 0.5),
       st.floats(-0.5, 0.5), st.floats(-1.0, 1.0))
def test_unitary_flow_conserves_zp_and_dualizes(r, phase, pr, pi, t):
    q = np.array([[r * complex(math.cos(phase), math.sin(phase))]])
    p = np.array([[complex(pr, pi)]]) / q
    zq, zp = UnitaryZ().flow(q, p, t)
    assert abs(zq[0, 0] * zp[0, 0] - q[0, 0] * p[0, 0]) < 1e-12
    assume(t > 0.05)
    sv = integrate_hamilton(SingularValue(), np.concatenate([q, p], -1), (0, t / 2), 1e-3,
                            error_estimate=False).final
    dz, dp = UnitaryZ().flow(q, p, -t)
    assert abs(sv[0, 0] - dz[0, 0]) < 1e-8 and abs(sv[0, 1] - dp[0, 0]) < 1e-8


@settings(max_examples=40, deadline=None)
@given(measures(max_atoms=4), measures(max_atoms=4))
def test_coupling_preserves_marginals(a, b):
    prob = HCIZProblem(a, b)
    xa, xb, w = prob.coupling()
    assert abs(w.sum() - 1) < 1e-12
    for meas, side in ((a, xa), (b, xb)):
        for loc, wt in zip(meas.real_locations, meas.weights):
            assert abs(w[side == loc].sum() - wt) < 1e-12
    # comonotone: both coordinates sorted together
    assert np.all(np.diff(xa) >= 0) and np.all(np.diff(xb) >= 0)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi, **finite), min_size=1, max_size=3, unique=True),
       st.floats(0.2, 3.0), st.floats(-math.pi, math.pi))
def test_unitary_density_is_rotation_covariant(phases, t, angle):
    mu = AngularMeasure.uniform(phases)
    theta = np.linspace(-math.pi, math.pi, 9)
    a = unitary_density(mu, theta, t, 1e-3).rho
    b = unitary_density(mu.rotated(angle), theta + angle, t, 1e-3).rho
    assert np.max(np.abs(a - b)) < 1e-8


@given(st.floats(**finite))
def test_float_format_round_trip(x):
    y = float(io.format_float(x))
    assert y == x or abs(y - x) <= 1e-12 * abs(x)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-3, 3, **finite), min_size=1, max_size=50))
def test_ks_distance_bounds(values):
    d = ks_distance(np.array(values), semicircle_cdf())
    assert 0 <= d <= 1
