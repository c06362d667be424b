"""Singular-value characteristics equal unitary ones run backward at twice the speed."""
import numpy as np

from eikonal import SingularValue, UnitaryZ, integrate_hamilton

rng = np.random.default_rng(0)
q = (0.5 + rng.random(8)) * np.exp(2j * np.pi * rng.random(8))
p = 0.3 * (rng.normal(size=8) + 1j * rng.normal(size=8)) / q
t = 0.5
sv = integrate_hamilton(SingularValue(), np.stack([q, p], -1), (0, t), 1e-3).final
zu, pu = UnitaryZ().flow(q[:, None], p[:, None], -2 * t)
print("max |z_sv(t) - z_unit(-2t)|:", np.max(np.abs(sv[:, 0] - zu[:, 0])))
print("max |p_sv(t) - p_unit(-2t)|:", np.max(np.abs(sv[:, 1] - pu[:, 0])))
