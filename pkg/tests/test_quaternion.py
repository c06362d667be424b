from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eikonal.errors import SingularQuaternion
from eikonal.quaternion import Quaternion, QuaternionPair, quat_inverse, quat_mul

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


def test_identity_is_neutral():
    q = Quaternion(0.3 - 1j, 2 + 0.5j)
    assert quat_mul(Quaternion(1, 0), q) == q


def test_pure_w_squares_to_minus_one():
    assert quat_mul(Quaternion(0, 1), Quaternion(0, 1)) == Quaternion(-1, 0)


def test_product_matches_matrix_product(rng):
    for _ in range(50):
        a = Quaternion(*(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
        b = Quaternion(*(rng.standard_normal(2) + 1j * rng.standard_normal(2)))
        np.testing.assert_allclose(quat_mul(a, b).matrix(), a.matrix() @ b.matrix(),
                                   rtol=0, atol=1e-15 * 8)


def test_inverse_examples():
    assert quat_inverse(Quaternion(1, 0)) == Quaternion(1, 0)
    w = 0.6 - 0.8j
    inv = quat_inverse(Quaternion(0, 3 * w))
    assert inv.z == 0
    assert abs(inv.w - (-3 * w / 9)) < 1e-16
    q = Quaternion(2j, 1)
    prod = quat_mul(q, quat_inverse(q))
    assert abs(prod.z - 1) < 1e-15 and abs(prod.w) < 1e-15


def test_singular_inverse_raises():
    with pytest.raises(SingularQuaternion):
        quat_inverse(Quaternion(0, 0))


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        Quaternion(float("nan"), 0)
    with pytest.raises(ValueError):
        Quaternion(0, complex(0, float("inf")))


def test_matrix_round_trip():
    q = Quaternion(1 - 2j, 0.5 + 3j)
    assert Quaternion.from_matrix(q.matrix()) == q
    with pytest.raises(ValueError):
        Quaternion.from_matrix(np.eye(2) * 1j)


def test_pair_accessors_read_transposed_momentum():
    pair = QuaternionPair(Quaternion(1, 2), Quaternion(0.5 + 1j, -0.25j))
    g = pair.p.matrix().T
    assert pair.p_z == g[0, 0] and pair.p_w == g[0, 1]
    assert pair.p_w == -np.conj(pair.p.w)


@given(cplx, cplx)
def test_inverse_round_trip_property(z, w):
    q = Quaternion(z, w)
    if q.det < 1e-6:
        return
    prod = quat_mul(q, quat_inverse(q))
    assert abs(prod.z - 1) < 1e-13 and abs(prod.w) < 1e-13


@given(*(st.integers(-50, 50) for _ in range(4)))
def test_determinant_exact_on_integers(a, b, c, d):
    q = Quaternion(complex(a, b), complex(c, d))
    exact = Fraction(a) ** 2 + Fraction(b) ** 2 + Fraction(c) ** 2 + Fraction(d) ** 2
    assert Fraction(q.det) == exact
    m = q.matrix()
    assert Fraction((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real) == exact
