__version__ = "0.1.0"

from bosonstar.spectral_core import (BosonStarError, ConfigError, DegenerateFieldError,
    GridMismatchError, NonFiniteError, RadialField, RadialGrid, SpectralField,
    forward_transform, inverse_transform, norm, quadrature_3d, read_field, write_field)
from bosonstar.operators import (DispersionParams, apply_multiplier, hardy_kato_check,
    hartree_term, newton_potential, poisson_kernel_realspace)  # needs spectral_core
from bosonstar.energetics import (EnergyBreakdown, RescaleParams, energy_breakdown,
    equation_residual, kato_lower_bound, rescale_to_canonical, virial_report)
from bosonstar.solver import (GroundStateReport, SolverConfig, nonexistence_probe,
    refine_check, solve_ground_state)  # needs energetics and data_collection
from bosonstar.linearization import (SectorOperator, assemble_Lminus, assemble_Lplus,
    kernel_element_decay, kernel_scan)
from bosonstar.analysis import (AnalyticityCertificate, DecayFitReport, abel_identity,
    certify_analyticity, fit_far_field, fit_fourier_decay, moment_growth_table)
from bosonstar.dynamics import WaveField, evolve, mass_and_energy
from bosonstar.data_collection import Trace
from bosonstar.miscellaneous import Record, seeded
