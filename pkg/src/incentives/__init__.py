"""Budget-constrained personalized incentives for social welfare.

Pipeline: a population instance (utilities and social indicators per
alternative) is reduced per individual to its efficient frontier, the hull
steps are sorted by social gain per euro, and a greedy walk allocates the
budget with a certified bound on the gap to the optimum.  Exact
small-instance solvers, a welfare-curve API, and a sequential-proposal
simulator for noisy utilities round out the toolkit.
"""

__version__ = "0.1.0"

from .concavize import (CROSS_TOL, ExtremeEntry, ExtremeProfile, ProfileSet,
                        concavize_all, lp_extremes, write_profiles_csv)
from .errors import ConfigError, IncentivesError, InstanceError, ResourceCapError
from .generator import DistanceSpec, GeneratorConfig, ModeSpec, synthesize_population
from .greedy import (Allocation, GreedyResult, Step, StepQueue, WelfareCurve,
                     build_step_queue, certify, curve, resume, solve,
                     stop_anytime)
from .imperfect import (ProposalEvent, SimulationReport, StochasticInstance,
                        WeightTable, expected_weights, gumbel_incentive,
                        profiles_from_weight_tables, simulate_sequential)
from .model import (Alternative, DefaultChoice, IncentiveWeight, Individual,
                    Instance, default_alternative, incentive_weights,
                    load_instance, save_instance)
from .oracle import (ENUMERATION_CAP, OracleConfig, exact_dp, exact_enumerate,
                     exact_solve, exact_welfare_per_unit)

__all__ = [
    "__version__",
    # model
    "Alternative", "Individual", "Instance", "DefaultChoice", "IncentiveWeight",
    "default_alternative", "incentive_weights", "load_instance", "save_instance",
    # generator
    "ModeSpec", "DistanceSpec", "GeneratorConfig", "synthesize_population",
    # concavize
    "CROSS_TOL", "ExtremeEntry", "ExtremeProfile", "ProfileSet",
    "lp_extremes", "concavize_all", "write_profiles_csv",
    # greedy
    "Step", "StepQueue", "Allocation", "WelfareCurve", "GreedyResult",
    "build_step_queue", "solve", "curve", "resume", "stop_anytime", "certify",
    # oracle
    "OracleConfig", "ENUMERATION_CAP", "exact_enumerate", "exact_dp",
    "exact_solve", "exact_welfare_per_unit",
    # imperfect information
    "gumbel_incentive", "StochasticInstance", "WeightTable", "expected_weights",
    "profiles_from_weight_tables", "ProposalEvent", "SimulationReport",
    "simulate_sequential",
    # errors
    "IncentivesError", "InstanceError", "ConfigError", "ResourceCapError",
]
