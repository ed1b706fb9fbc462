"""Choquet integration for non-additive capacities, Kantorovich-Choquet
operators, and verification suites for the associated inequalities."""

from .capacity import (
    DiscreteCapacity,
    Distortion,
    IntervalCapacity,
    VectorCapacity,
    check_submodular,
    check_submodular_distortion,
    estimate_c,
    null_complement_check,
    parse_distortion,
)
from .choquet import (
    QuadratureConfig,
    SampledFunction,
    choquet_discrete,
    choquet_discrete_oracle,
    choquet_integral,
    choquet_oracle,
    run_integral_properties,
    vector_choquet,
)
from .errors import (
    ChoquetKitError,
    DomainError,
    GridSnapWarning,
    PreconditionError,
    WindowError,
)
from .expr import EvalError, ParseError, evaluate, evaluator, parse, sample, to_text
from .inequalities import (
    cbs_comonotone_check,
    holder_check,
    holder_p1_qinf_check,
    is_comonotone,
    run_inequality_properties,
    t_covariance,
    t_variance,
    variance_nonneg_check,
)
from .korovkin import (
    ConvergenceTable,
    KorovkinReport,
    convergence_table,
    korovkin_bound_report,
    modulus_of_continuity,
    smoothing_radicand,
    smoothing_radius,
)
from .operators import (
    OperatorSpec,
    Truncation,
    baskakov_kc,
    bernstein_kc,
    cell_mean,
    eval_grid,
    szasz_kc,
)

__version__ = "0.1.0"
