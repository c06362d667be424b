"""Ginibre: uniform disk density, eigenvector overlaps and a Monte-Carlo check."""
import math

import numpy as np

from eikonal import (FieldGrid2D, Ginibre, density_2d, ginibre_field, overlap_correlator,
                     overlap_stats, sample_ensemble, support_boundary)
from eikonal.montecarlo import radial_overlap_profile, run_replicas

t = 1.0
axis = np.linspace(-1.5, 1.5, 121)
grid = FieldGrid2D.from_sampler(ginibre_field(t), axis, axis)
rho = density_2d(grid)
o = overlap_correlator(grid)
print("density at 0:", rho.values[60, 60], "theory", 1 / (math.pi * t))
print("overlap at 0:", o.values[60, 60], "theory", 1 / (math.pi * t))
pts = support_boundary(lambda z: ginibre_field(t)(z)[1], t, rays=32)
print("boundary radius range:", np.min(np.abs(pts)), np.max(np.abs(pts)))

n, seeds = 256, 10
records = run_replicas(lambda rng: overlap_stats(sample_ensemble(Ginibre(), n, t, rng)), 0, seeds)
edges = np.array([0.0, 0.3, 0.6, 0.9])
mc = radial_overlap_profile(records, n, edges)
lo, hi = edges[:-1], edges[1:]
theory = (t - (hi ** 4 - lo ** 4) / (2 * (hi ** 2 - lo ** 2))) / (math.pi * t * t)  # annulus average
for a, b, m, th in zip(lo, hi, mc, theory):
    print(f"|z| in [{a},{b}): overlap density MC {m:.3f}, theory {th:.3f}")
