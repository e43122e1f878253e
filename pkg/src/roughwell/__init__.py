"""roughwell: spectral Schrodinger simulation with a constant-profile well
under rough time-dependent translation, boost and dilation, plus the norm
machinery (Besov/BV path classes, Lorentz space norms, Duhamel kernel
bounds, bound-state modulation) needed to check the dispersive estimates
numerically."""

__version__ = "0.1.0"

from .grid import (ComplexField, FrameParams, Grid, apply_frame,
                   apply_free_propagator, sample_moving_potential,
                   spectral_transform)
from .paths import (ParamPath, besov_norm, gamma_norm_estimate,
                    gammaprime_norm_estimate, gen_brownian_path,
                    gen_bv_step_path, gen_h12_path, h12_norm_fourier)
from .potentials import PotentialProfile
from .spectral import (BoundStateBasis, check_exponential_decay, lorentz_norm,
                       project_continuous, project_point, solve_bound_states)
from .evolve import (EvolveConfig, InitialState, SourceSpec, TrajectoryBundle,
                     comoving_view, evolve, nls_evolve, step_strang)
from .duhamel import (DuhamelKernel, PiPath, duhamel_T_apply,
                      operator_norm_estimate)
from .modulation import (GeneratorMatrices, ModulationState, compute_A,
                         compute_B_series, compute_P, evolve_modulation_integral,
                         generator_matrices)
from .diagnostics import (energy, ionization_metrics, strichartz_accumulate,
                          wave_operator_estimate)
