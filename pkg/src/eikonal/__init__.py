"""Hamilton-Jacobi characteristics for random-matrix spectra.

Resolvents, densities, eigenvector overlaps and HCIZ hydrodynamics are
obtained by solving Hamilton's equations for the log-potential, with
finite-N Monte-Carlo samplers as independent oracles.
"""
from .characteristics import (FieldSample, HermitianSolver, PhaseTrajectory, caustic_edges,
                              evolve, integrate_hamilton, pastur_residual, pastur_solve,
                              quaternionic_field)
from .ensembles import (GUE, VARIANTS, BiUnitary, Bridge, Elliptic, Ensemble, FreeRotor, Ginibre,
                        HamiltonianValue, Jacobi, KempHall, OrnsteinUhlenbeck, SingularValue,
                        UnitaryZ, Wishart, ensemble_from_json, hamiltonian_eval,
                        hamiltonian_from_r_transform, r_transform_eval)
from .errors import *  # noqa: F401,F403
from .hciz import (ActionResult, FluidField, HCIZProblem, action_evaluate, bridge_characteristic_map,
                   bridge_fluid, bridge_resolvent, burgers_residual, euler_match_velocity,
                   euler_residual)
from .measures import AngularMeasure, SpectralMeasure, wrap_phase
from .montecarlo import (EmpiricalDensity, MatrixSample, OverlapRecord, ks_distance, matrix_walk,
                         overlap_stats, replica_rng, sample_ensemble, spectral_stats)
from .quaternion import Quaternion, QuaternionPair
from .spectra import (DensityGrid1D, FieldGrid2D, ScalarGrid2D, density_1d, density_2d,
                      elliptic_field, ginibre_field, hermitian_resolvent, overlap_correlator,
                      support_boundary)
from .unitary import (AngularField, angular_characteristics, gap_closing_time, spectral_gap,
                      unitary_density, unitary_density_zplane)

__version__ = "0.1.0"
