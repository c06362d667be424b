import math

import numpy as np
import pytest

from eikonal.measures import AngularMeasure
from eikonal.unitary import (angular_characteristics, cot_resolvent, gap_closing_time,
                             spectral_gap, unitary_density, unitary_density_zplane,
                             zplane_characteristics)

POINT = AngularMeasure.point(0.0)
TWO = AngularMeasure([0.0, 2.0], [0.3, 0.7])


def arc_width(t):
    """Closed-form support width for a point mass at times t < 4."""
    return math.sqrt(t * (4 - t)) + 2 * math.acos(1 - t / 2)


def test_cot_resolvent_examples():
    assert cot_resolvent(POINT, math.pi / 2) == pytest.approx(0.5)
    assert abs(cot_resolvent(POINT, 40j) + 0.5j) < 1e-15
    two = AngularMeasure([0.0, math.pi], [0.5, 0.5])
    # (cot(x/2) - tan(x/2)) / 2 = cot(x)
    assert cot_resolvent(two, 0.7) == pytest.approx(0.5 / math.tan(0.7), rel=1e-13)


def test_haar_like_measure():
    haar = AngularMeasure.uniform(np.linspace(0, 2 * math.pi, 512, endpoint=False))
    J = cot_resolvent(haar, np.array([0.3 + 0.5j, 1.0 + 0.2j]))
    assert np.max(np.abs(J.real)) < 1e-12
    np.testing.assert_allclose(-J.imag / math.pi, 1 / (2 * math.pi), atol=1e-12)


def test_large_time_is_uniform():
    theta = np.linspace(-math.pi, math.pi, 201)
    f = unitary_density(POINT, theta, 20.0)
    assert np.max(np.abs(f.rho - 1 / (2 * math.pi))) < 5e-5


@pytest.mark.parametrize("t", [0.01, 0.05, 0.5, 2.0, 3.5])
def test_point_mass_arc(t):
    assert spectral_gap(POINT, t) == pytest.approx(2 * math.pi - arc_width(t), abs=1e-9)
    theta = np.linspace(-math.pi, math.pi, 20001)
    f = unitary_density(POINT, theta, t)
    inside = theta[f.rho > 1e-3]
    assert np.ptp(inside) == pytest.approx(arc_width(t), abs=2e-3)
    assert f.mass() == pytest.approx(1.0, abs=5e-3)


def test_small_time_width_scales_like_sqrt_t():
    assert arc_width(1e-4) / (4 * math.sqrt(1e-4)) == pytest.approx(1.0, abs=1e-4)
    assert 2 * math.pi - spectral_gap(POINT, 1e-4) == pytest.approx(0.04, rel=1e-4)


def test_parity():
    theta = np.linspace(0.1, 3.0, 30)
    f = unitary_density(POINT, theta, 1.3)
    g = unitary_density(POINT, -theta, 1.3)
    np.testing.assert_allclose(f.rho, g.rho, atol=1e-12)
    np.testing.assert_allclose(f.J.real, -g.J.real, atol=1e-12)


def test_gap_closing_times():
    assert gap_closing_time(POINT) == pytest.approx(4.0, abs=1e-9)
    assert gap_closing_time(POINT.rotated(1.0)) == pytest.approx(4.0, abs=1e-9)
    opposite = AngularMeasure([0.0, math.pi], [0.5, 0.5])
    assert gap_closing_time(opposite) == pytest.approx(2.0, abs=1e-9)
    assert spectral_gap(POINT, 4.01) == 0.0


def test_gap_matches_density_scan():
    t = 0.4
    theta = np.linspace(-math.pi, math.pi, 40001)
    empty = unitary_density(TWO, theta, t, 1e-9).rho < 1e-3
    doubled = np.concatenate([empty, empty]).astype(int)
    runs = np.diff(np.concatenate([[0], doubled, [0]]))
    starts, ends = np.nonzero(runs == 1)[0], np.nonzero(runs == -1)[0]
    widest = np.max(ends - starts) * (theta[1] - theta[0])
    assert spectral_gap(TWO, t) == pytest.approx(widest, abs=1e-3)


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0, 5.0])
def test_charts_agree(t):
    theta = np.linspace(-math.pi, math.pi, 801)
    a = unitary_density(TWO, theta, t, 1e-6)
    b = unitary_density_zplane(TWO, theta, t, 1e-6)
    assert np.max(np.abs(a.rho - b.rho)) < 1e-5


def test_characteristic_guards():
    with pytest.raises(ValueError):
        angular_characteristics(POINT, np.array([0.3 - 0.1j]), 1.0)
    with pytest.raises(ValueError):
        zplane_characteristics(POINT, np.array([0.5]), 1.0)
    with pytest.raises(ValueError):
        unitary_density(POINT, [0.0], -1.0)
    with pytest.raises(ValueError):
        spectral_gap(POINT, 0.0)


def test_zero_time_is_initial_kernel():
    theta = np.linspace(-3, 3, 7)
    f = unitary_density(TWO, theta, 0.0, 1e-3)
    np.testing.assert_allclose(f.J, TWO.cot_kernel(theta + 1e-3j))
