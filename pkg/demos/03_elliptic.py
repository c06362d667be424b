"""Elliptic ensemble: ellipse support and conserved quantities along characteristics."""
import numpy as np

from eikonal import Elliptic, integrate_hamilton, sample_ensemble
from eikonal.montecarlo import eigendecompose, ellipse_semi_axes

tau = 0.5
eigs = eigendecompose(sample_ensemble(Elliptic(tau), 1024, 1.0, seed=0))
print("MC semi-axes:", ellipse_semi_axes(eigs), "theory", (1 + tau, 1 - tau))

rng = np.random.default_rng(1)
q = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
p = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
spec = Elliptic(tau)
traj = integrate_hamilton(spec, np.concatenate([q, p], -1), (0.0, 1.0), 1e-3)
h0 = spec.hamiltonian(q, p).value
h1 = spec.hamiltonian(traj.final[:, :2], traj.final[:, 2:], 1.0).value
print("energy drift:", np.max(np.abs(h1 - h0)), "RK4 error estimate:", traj.error_estimate)
