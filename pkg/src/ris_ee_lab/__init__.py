"""Energy-efficiency optimization for a 1-bit RIS-assisted MU-MISO downlink.

Public surface: scenario config, channel synthesis, power allocation, the two
RIS optimizers, baselines with exhaustive oracles, and the AO driver. The CLI
lives in ris_ee_lab.cli.
"""
from .ao import AO_METHODS, AoOptions, run_ao
from .baselines import (
    OracleResult,
    all_off_ris,
    brute_force_ee,
    brute_force_g,
    random_ris,
    successive_update,
)
from .channel import AngleDraw, draw_channel, path_gain, steering_vector
from .config import SystemConfig
from .errors import (
    AllInfeasible,
    CapExceeded,
    Infeasible,
    NoFeasibleRounding,
    NoFeasibleStart,
    RelaxationInfeasible,
    RisEeError,
    SingularChannel,
    SolverFailure,
)
from .model import (
    ChannelRealization,
    EEReport,
    PowerAllocation,
    RisConfig,
    TracePoint,
    effective_channel,
    metrics,
    t_coefficients,
    zf_precoder,
)
from .power_alloc import AllocProblem, alloc_problem, dinkelbach, inner_solution, solve_zeta
from .ris_gradient import (
    GradSearchParams,
    feasible_start,
    gradient_g,
    objective_g,
    search_max_gradient,
)
from .ris_sdp import SdpProblem, SdpSolution, assemble, lift, round_solution, solve_relaxation

__version__ = "0.1.0"

__all__ = [
    "SystemConfig",
    "AngleDraw",
    "steering_vector",
    "path_gain",
    "draw_channel",
    "ChannelRealization",
    "RisConfig",
    "PowerAllocation",
    "TracePoint",
    "EEReport",
    "effective_channel",
    "t_coefficients",
    "zf_precoder",
    "metrics",
    "AllocProblem",
    "alloc_problem",
    "solve_zeta",
    "inner_solution",
    "dinkelbach",
    "GradSearchParams",
    "objective_g",
    "gradient_g",
    "feasible_start",
    "search_max_gradient",
    "SdpProblem",
    "SdpSolution",
    "assemble",
    "lift",
    "solve_relaxation",
    "round_solution",
    "AO_METHODS",
    "AoOptions",
    "run_ao",
    "OracleResult",
    "random_ris",
    "all_off_ris",
    "successive_update",
    "brute_force_g",
    "brute_force_ee",
    "RisEeError",
    "SingularChannel",
    "Infeasible",
    "NoFeasibleStart",
    "CapExceeded",
    "AllInfeasible",
    "SolverFailure",
    "RelaxationInfeasible",
    "NoFeasibleRounding",
    "__version__",
]
