"""Solver lab for the 0-1 incremental knapsack problem."""

from .core import (
    AlgorithmPreconditionFailed, BudgetExceeded, IKPError, IndexOutOfRange, InfeasibleSchedule,
    Instance, InvalidInstance, LengthMismatch, NonMonotoneCapacities, NonPositiveEntry,
    NotTwoPeriods, NotWeightConstrained, ParameterOutOfRange, RatioReport, Schedule, evaluate,
    is_feasible, make_instance, period_values, period_weights, profit_contribution,
    schedule_value,
)
from .kp import KpInstance, KpSolution, kp_exact, kp_fptas, kp_split
from .lp import (
    FractionalSolution, PartitionTree, ResidualInstance, lp_relax_baseline, lp_relax_fast,
    lp_relax_residual, residual_from_instance, round_down,
)
from .oracle import OracleResult, solve_exact, solve_residual_exact
from .algorithms import (
    ALGORITHMS, AlgoOutput, alg_a, alg_a_prime, compute_theta, h1, h2, h2_backward,
    h2_guarantee, ht2, ht2_guarantee, ht2_subsets, ptas_approx,
)
from .worstcase import (
    CertificateViolation, check_certificate, gen_backward_counterexample, gen_tight_astar,
    gen_tight_h1, gen_tight_h2, gen_tight_ht2, random_instance, ratio_sweep,
    verify_duality_astar, verify_duality_ht2,
)
from .files import InstanceFile, ParseError, read_instance, write_instance

__version__ = "0.1.0"
