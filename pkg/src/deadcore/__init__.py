"""Dead-core barriers and Liouville thresholds for beta-normalized
infinity-Laplacian equations with Hamiltonian and absorption terms."""

from .balance import (
    BalancePair,
    BarrierProfile,
    DominantTerm,
    absorption_exponents,
    gradient_exponents,
    select_pair,
    select_profile,
    thickness,
)
from .barrier import (
    RadialBarrier,
    eval_barrier,
    eval_profile,
    ode_residual,
    plateau_test,
    supersolution_check,
)
from .errors import DeadcoreError
from .grid import DiscGrid, GridSolution, SolverOptions, scheme_value, solve
from .liouville import (
    Classification,
    LiouvilleVerdict,
    classify,
    deadcore_consistency,
    exp_counterexample_residual,
    growth_ratio,
    osc_criterion,
    threshold,
)
from .model import (
    HamiltonianKind,
    ModelSpec,
    NonlinearityKind,
    eval_hamiltonian,
    eval_nonlinearity,
    spec_from_json,
    spec_to_json,
    validate_admissible,
)
from .radial import RadialSolution, integrate_ivp, measure_deadcore, shoot_bvp

__version__ = "0.1.0"
