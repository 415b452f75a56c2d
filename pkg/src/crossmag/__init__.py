"""Finite-difference micromagnetics of spin-torque switching in a
cross-shaped free layer.

The package integrates the Landau-Lifshitz-Gilbert equation with a
Slonczewski spin-transfer torque on a regular grid, with exchange and
demagnetization fields, and layers experiment protocols (pulse runs,
current sweeps, phase diagrams) plus a CLI on top.
"""

from .config import (PhaseOptions, RunConfig, SweepOptions, TwoPulseOptions,
                     dump_config, load_config, parse_config)
from .constants import GAMMA_LL, MU0
from .demag import (DemagKernel, build_demag_kernel, demag_field,
                    demag_field_direct, demag_tensor_table)
from .dynamics import (IntegratorConfig, PulseSegment, Simulation,
                       TorqueParams, Trajectory, llg_rhs, stt_beta,
                       stt_epsilon)
from .errors import (ConfigError, CrossmagError, IndeterminateError,
                     InvalidArgumentError, NonConvergenceError, NotFoundError,
                     NumericError, PreparationError, StiffnessError)
from .experiments import (Geometry, PhaseDiagram, PhaseRecord, StateId,
                          classify_state, default_sweep_grid, phase_diagram,
                          prepare_state, seed_state, sweep_current,
                          switching_time, two_pulse_protocol)
from .fields import (effective_field, energy_terms, exchange_field,
                     kernel_for, normalize_state, uniform_state)
from .io import (read_phase_records, read_snapshot, read_timeseries,
                 write_phase_records, write_snapshot, write_timeseries)
from .macrospin import (MacrospinParams, critical_current_density,
                        critical_current_density_si, macrospin_trajectory)
from .materials import (Material, builtin_names, exchange_length,
                        get_material, register_material)
from .mesh import CrossSpec, Mesh, Region, arm_regions, build_mesh, cross_mask
from .version import __version__

__all__ = [
    "CrossSpec", "ConfigError", "CrossmagError", "DemagKernel", "GAMMA_LL",
    "Geometry", "IndeterminateError", "IntegratorConfig",
    "InvalidArgumentError", "MU0", "MacrospinParams", "Material", "Mesh",
    "NonConvergenceError", "NotFoundError", "NumericError", "PhaseDiagram",
    "PhaseOptions", "PhaseRecord", "PreparationError", "PulseSegment",
    "Region", "RunConfig", "Simulation", "StateId", "StiffnessError",
    "SweepOptions", "TorqueParams", "Trajectory", "TwoPulseOptions",
    "__version__", "arm_regions", "build_demag_kernel", "build_mesh",
    "builtin_names", "classify_state", "critical_current_density",
    "critical_current_density_si", "cross_mask", "default_sweep_grid",
    "demag_field", "demag_field_direct", "demag_tensor_table", "dump_config",
    "effective_field", "energy_terms", "exchange_field", "exchange_length",
    "get_material", "kernel_for", "llg_rhs", "load_config",
    "macrospin_trajectory", "normalize_state", "parse_config",
    "phase_diagram", "prepare_state", "read_phase_records", "read_snapshot",
    "read_timeseries", "register_material", "seed_state", "stt_beta",
    "stt_epsilon", "sweep_current", "switching_time", "two_pulse_protocol",
    "uniform_state", "write_phase_records", "write_snapshot",
    "write_timeseries",
]
