"""HCIZ asymptotics: bridge fluid, matching velocity and the divergent action."""
import numpy as np

from eikonal import (HCIZProblem, SpectralMeasure, action_evaluate, bridge_fluid,
                     burgers_residual, euler_match_velocity)

zero = SpectralMeasure.point(0.0)
prob = HCIZProblem(zero, zero)
x = np.linspace(-1.1, 1.1, 400)
t = np.linspace(0.0025, 0.9975, 400)
fluid = euler_match_velocity(bridge_fluid(prob, x, t))
print("mass range:", fluid.masses().min(), fluid.masses().max())
print("Burgers residual (interior):", burgers_residual(fluid))
res = action_evaluate(fluid, [0.04, 0.02, 0.01, 0.005])
print("S(delta):", res.s_of_delta)
print("log coefficient:", res.log_coefficient, "(expected 1/2)")

split = HCIZProblem(SpectralMeasure([-1.0, 1.0], [0.5, 0.5]), zero)
f = bridge_fluid(split, np.linspace(-1.6, 1.6, 9), [0.1, 0.5, 0.9])
print("A={+-1} -> B={0}, rho rows at t=0.1, 0.5, 0.9:")
print(np.round(f.rho, 3))
