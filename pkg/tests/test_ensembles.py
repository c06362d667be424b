import numpy as np
import pytest

from eikonal.ensembles import (GUE, VARIANTS, BiUnitary, Bridge, Elliptic, FreeRotor, Ginibre,
                               Jacobi, KempHall, OrnsteinUhlenbeck, SingularValue, UnitaryZ,
                               Wishart, ensemble_from_json, from_radial_chart, hamiltonian_eval,
                               hamiltonian_from_r_transform, r_transform_eval, to_radial_chart)
from eikonal.errors import BridgeTimeOverflow, KempHallAxis, UnsupportedVariant
from eikonal.quaternion import Quaternion

ALL_SPECS = [GUE(), OrnsteinUhlenbeck(0.7), Wishart(0.5), Wishart(2.0), Jacobi(1.3, 0.4),
             UnitaryZ(), SingularValue(), FreeRotor(), Ginibre(), Elliptic(0.5), Elliptic(-0.3),
             BiUnitary((1.0, 0.4, -0.2)), KempHall(), Bridge(1.5)]


def _wirtinger_fd(f, x, k, h=1e-5):
    """Central-difference Wirtinger derivative ``(d_re - i d_im) / 2`` in slot ``k``."""
    e = np.zeros_like(x)
    e[..., k] = h
    d_re = (f(x + e) - f(x - e)) / (2 * h)
    d_im = (f(x + 1j * e) - f(x - 1j * e)) / (2 * h)
    return 0.5 * (d_re - 1j * d_im)


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: f"{s.variant}{s.params()}")
def test_gradients_match_finite_differences(spec, rng):
    dim = spec.dim
    q = 0.5 + rng.standard_normal((100, dim)) + 1j * rng.standard_normal((100, dim))
    p = 0.5 * (rng.standard_normal((100, dim)) + 1j * rng.standard_normal((100, dim)))
    if spec.kind == "radial":
        q[:, 1] = 0.5 + rng.random(100)  # r > 0
        p[:, 1] = rng.standard_normal(100)
    t = 0.3
    hv = spec.hamiltonian(q, p, t)
    for k in range(dim):
        fd_p = _wirtinger_fd(lambda pp: spec.hamiltonian(q, pp, t).value, p, k)
        fd_q = _wirtinger_fd(lambda qq: spec.hamiltonian(qq, p, t).value, q, k)
        for an, fd in ((hv.grad_p[:, k], fd_p), (hv.grad_q[:, k], fd_q)):
            scale = np.maximum(1.0, np.abs(an))
            assert np.max(np.abs(an - fd) / scale) < 1e-6


def test_catalog_values():
    assert hamiltonian_eval(GUE(), np.array([1 + 0j]), np.array([0j])).value == 0.5
    hv = Elliptic(1.0).hamiltonian(np.zeros(2), np.array([1j, 0]))
    assert abs(hv.value - (-1.0)) < 1e-15  # tau/2 (p_z^2 + conj(p_z)^2) at p_z = i
    hv = hamiltonian_eval(Wishart(1.0), np.array([1 + 0j]), np.array([2 + 0j]))
    assert hv.value == 2


def test_r_transforms():
    assert r_transform_eval(GUE(), 0.5 + 0.1j) == 0.5 + 0.1j
    q = Quaternion(0.3 - 0.2j, 0.7 + 0.1j)
    assert r_transform_eval(Ginibre(), q) == Quaternion(0, q.w)
    assert r_transform_eval(Elliptic(0.0), q) == r_transform_eval(Ginibre(), q)
    with pytest.raises(UnsupportedVariant):
        r_transform_eval(UnitaryZ(), 0.5)


@pytest.mark.parametrize("spec", [GUE(), Ginibre(), Elliptic(0.5), Elliptic(-1.0),
                                  BiUnitary((1.0, 0.5, 0.25))], ids=lambda s: s.variant)
def test_hamiltonian_is_integral_of_r_transform(spec, rng):
    # trapezoid is exact for linear R; higher cumulants need one Richardson step
    def quad(p):
        if spec.variant == "BiUnitary":
            return (4 * hamiltonian_from_r_transform(spec, p, 20_000)
                    - hamiltonian_from_r_transform(spec, p)) / 3
        return hamiltonian_from_r_transform(spec, p)

    for _ in range(5):
        if spec.kind == "quaternionic":
            pz, pw = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            p = Quaternion(pz, -np.conj(pw))  # stored so that G_12 = p_w
            h = spec.hamiltonian(np.zeros(2), np.array([pz, pw])).value
        else:
            p = complex(rng.standard_normal() + 1j * rng.standard_normal())
            h = spec.hamiltonian(np.zeros(1), np.array([p])).value
        assert abs(quad(p) - h) < 1e-10


def test_biunitary_unit_sequence_is_ginibre(rng):
    q = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
    p = rng.standard_normal((20, 2)) + 1j * rng.standard_normal((20, 2))
    a, b = BiUnitary((1.0,)).hamiltonian(q, p), Ginibre().hamiltonian(q, p)
    for x, y in ((a.value, b.value), (a.grad_p, b.grad_p), (a.grad_q, b.grad_q)):
        np.testing.assert_array_equal(x, y)
    fa, fb = BiUnitary((1.0,)).flow(q, p, 0.7), Ginibre().flow(q, p, 0.7)
    np.testing.assert_array_equal(fa[0], fb[0])


@pytest.mark.parametrize("spec", [s for s in ALL_SPECS if s.flow(np.ones((1, s.dim)),
                                                                  np.ones((1, s.dim)), 0.1)
                                  is not None], ids=lambda s: s.variant)
def test_closed_form_flows_agree_with_rk4(spec, rng):
    from eikonal.characteristics import integrate_hamilton

    dim = spec.dim
    q = 1.0 + 0.3 * (rng.standard_normal((30, dim)) + 1j * rng.standard_normal((30, dim)))
    p = 0.3 * (rng.standard_normal((30, dim)) + 1j * rng.standard_normal((30, dim)))
    t = 0.4
    traj = integrate_hamilton(spec, np.concatenate([q, p], -1), (0, t), 1e-3)
    qt, pt = spec.flow(q, p, t)
    assert np.max(np.abs(traj.final - np.concatenate([qt, pt], -1))) < 1e-8


def test_json_round_trip_and_aliases():
    for spec in ALL_SPECS:
        assert ensemble_from_json(spec.to_json()) == spec
    assert ensemble_from_json("gue") == GUE()
    assert ensemble_from_json({"variant": "ou", "params": {"a": 0.2}}) == OrnsteinUhlenbeck(0.2)
    assert ensemble_from_json({"variant": "Jacobi", "params": {"theta": 2, "lambda": 0.3}}) \
        == Jacobi(2, 0.3)
    with pytest.raises(UnsupportedVariant):
        ensemble_from_json("nope")
    assert set(VARIANTS) >= {"GUE", "Wishart", "Elliptic", "KempHall", "Bridge"}


def test_parameter_validation():
    with pytest.raises(ValueError):
        Elliptic(1.5)
    with pytest.raises(ValueError):
        Wishart(0.0)
    with pytest.raises(ValueError):
        Bridge(0.0)
    with pytest.raises(ValueError):
        BiUnitary(())


def test_bridge_time_overflow():
    with pytest.raises(BridgeTimeOverflow):
        Bridge(1.0).hamiltonian(np.zeros(2), np.zeros(2), t=1.0)
    with pytest.raises(BridgeTimeOverflow):
        Bridge(1.0).flow(np.zeros(2), np.zeros(2), 1.2)


def test_radial_chart():
    z, r, p, pr = to_radial_chart(0.3, 0.6 + 0.8j, 1j, 0.5)
    assert r == pytest.approx(1.0)
    assert pr == pytest.approx(2 * (0.5 * (0.6 + 0.8j)).real)
    with pytest.raises(KempHallAxis):
        to_radial_chart(0.3, 0, 1, 1)
    with pytest.raises(KempHallAxis):
        KempHall().hamiltonian(np.array([1, 0]), np.array([1, 1]))
    zz, w, _, pw = from_radial_chart(z, r, p, pr, np.angle(0.6 + 0.8j))
    assert abs(w - (0.6 + 0.8j)) < 1e-15
