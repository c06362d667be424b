import math

import numpy as np
import pytest

from eikonal.ensembles import GUE, BiUnitary, Ginibre, Wishart
from eikonal.errors import EmptySupport, GridTooSmall, NegativeDensity
from eikonal.measures import SpectralMeasure
from eikonal.montecarlo import eigendecompose, ks_distance, replica_rng, sample_ensemble
from eikonal.spectra import (FieldGrid2D, density_1d, density_2d, elliptic_field, ginibre_field,
                             hermitian_resolvent, numeric_field, overlap_correlator,
                             support_boundary)

ZERO = SpectralMeasure.point(0.0)


def test_semicircle_center_and_outside():
    res = hermitian_resolvent(ZERO, GUE(), 1.0)
    d = density_1d(res, [0.0, 3.0], 1e-6)
    assert abs(d.rho[0] - 1 / math.pi) < 1e-6
    assert d.rho[1] < 1e-3


def test_scalar_only_resolvent_is_accepted():
    calls = []

    def res(z):
        calls.append(z)
        return complex(ZERO.resolvent(complex(z)))

    d = density_1d(res, [0.5, 1.0], 0.1)
    assert d.rho.shape == (2,) and len(calls) >= 2


def test_density_converges_linearly_in_epsilon():
    res = hermitian_resolvent(ZERO, GUE(), 1.0)
    x = np.array([-1.2, 0.0, 0.7])
    exact = np.sqrt(4 - x ** 2) / (2 * math.pi)
    errs = [np.max(np.abs(density_1d(res, x, e).rho - exact)) for e in (1e-4, 1e-5, 1e-6)]
    for a, b in zip(errs, errs[1:]):
        assert 0.05 <= b / a <= 0.2


def test_marchenko_pastur_mass():
    # x = u^2 resolves the 1/sqrt(x) singularity at the hard edge
    u = np.linspace(0.0, 2.0, 8001)
    d = density_1d(hermitian_resolvent(ZERO, Wishart(1.0), 1.0), u ** 2, 1e-9)
    assert abs(d.mass() - 1) < 1e-3


def test_marchenko_pastur_matches_monte_carlo():
    grid = np.linspace(0.0, 2.0, 4001) ** 2
    rho = density_1d(hermitian_resolvent(ZERO, Wishart(1.0), 1.0), grid, 1e-9).rho
    cdf_vals = np.concatenate([[0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * np.diff(grid))])
    eigs = eigendecompose(sample_ensemble(Wishart(1.0), 400, 1.0, replica_rng(3, 0)))
    assert ks_distance(eigs, lambda v: np.interp(v, grid, cdf_vals)) < 0.05


def test_ginibre_density_interior_and_exterior():
    axis = np.linspace(-0.5, 0.5, 1001)  # h = 1e-3
    rho = density_2d(FieldGrid2D.from_sampler(ginibre_field(1.0), axis, axis))
    assert np.max(np.abs(rho.values - 1 / math.pi)) < 1e-6
    axis = np.linspace(1.2, 1.6, 401)  # h = 1e-3
    rho = density_2d(FieldGrid2D.from_sampler(ginibre_field(1.0), axis, axis))
    assert np.max(np.abs(rho.values)) < 1e-6


@pytest.mark.parametrize("sampler", [ginibre_field(1.0), elliptic_field(0.5, 1.0)],
                         ids=["ginibre", "elliptic"])
def test_total_mass(sampler):
    axis = np.linspace(-1.8, 1.8, 521)
    rho = density_2d(FieldGrid2D.from_sampler(sampler, axis, axis))
    assert abs(rho.integral() - 1) < 1e-3


def test_wrong_branch_is_detected():
    def wrong(z):
        g, pw = ginibre_field(1.0)(z)
        return np.where(pw > 0, -g, g), pw

    axis = np.linspace(-0.5, 0.5, 41)
    with pytest.raises(NegativeDensity):
        density_2d(FieldGrid2D.from_sampler(wrong, axis, axis))


def test_grid_too_small():
    axis = np.linspace(-1, 1, 2)
    with pytest.raises(GridTooSmall):
        density_2d(FieldGrid2D.from_sampler(ginibre_field(1.0), axis, axis))


def test_non_uniform_axis_rejected():
    with pytest.raises(ValueError):
        FieldGrid2D.from_sampler(ginibre_field(1.0), np.array([0, 0.1, 0.3]), np.arange(3.0))


def test_overlap_values_and_refinement():
    t = 1.5
    coarse = np.linspace(-1.5, 1.5, 61)
    fine = np.linspace(-1.5, 1.5, 121)
    oc = overlap_correlator(FieldGrid2D.from_sampler(ginibre_field(t), coarse, coarse))
    of = overlap_correlator(FieldGrid2D.from_sampler(ginibre_field(t), fine, fine))
    assert np.max(np.abs(oc.values - of.values[::2, ::2])) < 1e-8
    z = oc.x[None, :] + 1j * oc.y[:, None]
    exact = np.maximum(t - np.abs(z) ** 2, 0) / (math.pi * t * t)
    assert np.max(np.abs(oc.values - exact)) < 1e-14
    g, pw = ginibre_field(1.0)(np.array([0.0, 1.0]))
    np.testing.assert_allclose(np.maximum(pw, 0) / math.pi, [1 / math.pi, 0.0], atol=1e-15)


def test_support_boundaries():
    for t in (0.5, 2.0):
        pts = support_boundary(lambda z: ginibre_field(t)(z)[1], t)
        assert np.max(np.abs(np.abs(pts) - math.sqrt(t))) < 1e-6
    pts = np.array(support_boundary(lambda z: elliptic_field(0.5, 1.0)(z)[1], 1.0, rays=64))
    assert abs(np.max(pts.real) - 1.5) < 1e-6 and abs(np.max(pts.imag) - 0.5) < 1e-6
    with pytest.raises(EmptySupport):
        support_boundary(lambda z: ginibre_field(1.0)(z)[1], 1.0, center=3.0)


def test_biunitary_unit_sequence_boundary_is_ginibre_circle():
    sampler = numeric_field(ZERO, BiUnitary((1.0,)), 0.8)
    pts = support_boundary(lambda z: sampler(z)[1], 0.8, rays=8, precision=1e-9)
    assert np.max(np.abs(np.abs(pts) - math.sqrt(0.8))) < 1e-6


def test_biunitary_fields_are_rotationally_symmetric():
    sampler = numeric_field(ZERO, BiUnitary((1.0, 0.5)), 1.0)
    for r in (0.2, 0.5):
        z = r * np.exp(1j * np.linspace(0, 2 * math.pi, 7, endpoint=False))
        g, pw = sampler(z)
        assert np.ptp(pw) < 1e-8
        gz = g * z  # radial field: g = conj(z) h(|z|^2)
        assert np.max(np.abs(gz.imag)) < 1e-8 and np.ptp(gz.real) < 1e-8
