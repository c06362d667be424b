"""Hermitian flows: semicircle, Marchenko-Pastur and a two-blob merger.

The resolvent at time t is the Herglotz root of the transported initial
condition; its boundary imaginary part is the density.
"""
import math

import numpy as np

from eikonal import GUE, SpectralMeasure, Wishart, caustic_edges, density_1d, hermitian_resolvent

zero = SpectralMeasure.point(0.0)
x = np.array([-2.5, -1.8, -1.0, 0.0, 0.6, 1.5, 3.0])  # away from the edges
rho = density_1d(hermitian_resolvent(zero, GUE(), 1.0), x, 1e-6).rho
exact = np.sqrt(np.maximum(4 - x ** 2, 0)) / (2 * math.pi)
print("semicircle t=1, max error:", np.max(np.abs(rho - exact)))
print("edges:", caustic_edges(zero, GUE(), 1.0))

u = np.linspace(0, 2, 4001)
mp = density_1d(hermitian_resolvent(zero, Wishart(1.0), 1.0), u ** 2, 1e-9)
print("Marchenko-Pastur r=1 mass:", mp.mass())

pair = SpectralMeasure([-1.0, 1.0], [0.5, 0.5])
for t in (0.01, 0.5, 1.0, 2.0):
    print(f"atoms +-1, t={t}: edges", np.round(caustic_edges(pair, GUE(), t), 4))
