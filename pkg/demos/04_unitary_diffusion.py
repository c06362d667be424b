"""Free unitary diffusion from the identity: the arc widens and closes at t = 4."""
import math

import numpy as np

from eikonal import AngularMeasure, UnitaryZ, gap_closing_time, matrix_walk, spectral_gap
from eikonal import unitary_density, unitary_density_zplane
from eikonal.montecarlo import eigendecompose, largest_phase_gap

start = AngularMeasure.point(0.0)
theta = np.linspace(-math.pi, math.pi, 1001)
print("gap closes at t =", gap_closing_time(start))
for t in (1.0, 3.0, 5.0):
    a = unitary_density(start, theta, t)
    b = unitary_density_zplane(start, theta, t)
    print(f"t={t}: mass {a.mass():.4f}, chart mismatch {np.max(np.abs(a.rho - b.rho)):.1e}, "
          f"gap {spectral_gap(start, t):.4f}")

n, dt = 128, 0.05
for t in (3.0, 5.0):
    u = matrix_walk(UnitaryZ(), n, int(round(t / dt)), dt, seed=0)
    gap = largest_phase_gap(eigendecompose(u))
    print(f"MC n={n}, t={t}: largest phase gap {gap:.3f} (mean spacing {2 * math.pi / n:.3f})")
