"""Gyro-averaged Fokker-Planck model on the two-dimensional torus.

Spectral in the gyro-centre ``x``, finite-volume in the Larmor radius ``u``,
with a four-dimensional phase-space harness for the gyro-limit.
"""

from .bessel import BesselDomainError, j0, j0_prime, j1
from .config import RunConfig, load_config, parse_config
from .diagnostics import DiagnosticsRecord, MonitorReport, check_apriori, compute_record
from .fields import TORUS_AREA, GyroDistribution, SpectralField2D
from .grid import VelocityGrid, WeightKind, integrate_u
from .harness import Gyro4DState, angular_average, epsilon_sweep, radial_equivalence, step_4d
from .io import read_series, read_snapshot, write_series, write_snapshot
from .runner import RunResult, run, stability_experiment
from .solver import (
    CFLViolationError,
    ConfigurationError,
    PhysicalParams,
    SolverState,
    UOperator,
    advection_rhs,
    build_u_operator,
    cfl_dt,
    step,
)
from .spectral import MultiplierTable, compute_density, drift_velocity, gyroaverage, ht_hat, solve_potential

__version__ = "0.1.0"

__all__ = [
    "BesselDomainError",
    "j0",
    "j0_prime",
    "j1",
    "RunConfig",
    "load_config",
    "parse_config",
    "DiagnosticsRecord",
    "MonitorReport",
    "check_apriori",
    "compute_record",
    "TORUS_AREA",
    "GyroDistribution",
    "SpectralField2D",
    "VelocityGrid",
    "WeightKind",
    "integrate_u",
    "Gyro4DState",
    "angular_average",
    "epsilon_sweep",
    "radial_equivalence",
    "step_4d",
    "read_series",
    "read_snapshot",
    "write_series",
    "write_snapshot",
    "RunResult",
    "run",
    "stability_experiment",
    "CFLViolationError",
    "ConfigurationError",
    "PhysicalParams",
    "SolverState",
    "UOperator",
    "advection_rhs",
    "build_u_operator",
    "cfl_dt",
    "step",
    "MultiplierTable",
    "compute_density",
    "drift_velocity",
    "gyroaverage",
    "ht_hat",
    "solve_potential",
]
