import math

import numpy as np
import pytest

from eikonal.errors import AtomCollision
from eikonal.measures import AngularMeasure, SpectralMeasure, wrap_phase


def test_weights_must_be_normalized():
    with pytest.raises(ValueError):
        SpectralMeasure([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        SpectralMeasure([0.0], [-1.0])


def test_resolvent_and_moments():
    mu = SpectralMeasure.uniform([-1.0, 1.0])
    z = 2j
    assert abs(mu.resolvent(z) - 0.5 * (1 / (z + 1) + 1 / (z - 1))) < 1e-16
    assert mu.moment(2) == 1
    den, num = mu.denominator_numerator()
    assert abs(num(z) / den(z) - mu.resolvent(z)) < 1e-15


def test_pairs_round_trip():
    mu = SpectralMeasure.from_pairs([[0.5, 0.25], [[1.0, -2.0], 0.75]])
    again = SpectralMeasure.from_pairs(mu.to_pairs())
    np.testing.assert_array_equal(again.locations, mu.locations)
    np.testing.assert_array_equal(again.weights, mu.weights)
    assert not mu.is_real


def test_cot_kernel_single_atom():
    mu = AngularMeasure.point(0.0)
    th = np.array([0.3, 1.0, 2.5]) + 0.1j
    np.testing.assert_allclose(mu.cot_kernel(th), 0.5 / np.tan(th / 2), rtol=1e-14)


def test_cot_kernel_far_from_axis_does_not_overflow():
    mu = AngularMeasure.point(0.0)
    assert abs(mu.cot_kernel(1.0 + 800j) + 0.5j) < 1e-15
    assert abs(mu.cot_kernel(1.0 - 800j) - 0.5j) < 1e-15


def test_cot_kernel_collision():
    with pytest.raises(AtomCollision):
        AngularMeasure.point(0.0).cot_kernel(0.0)


def test_wrap_phase_range():
    th = wrap_phase(np.array([-math.pi, math.pi, 3 * math.pi, 0.1 - 4 * math.pi]))
    assert np.all(th > -math.pi) and np.all(th <= math.pi)
    np.testing.assert_allclose(th, [math.pi, math.pi, math.pi, 0.1], atol=1e-14)
