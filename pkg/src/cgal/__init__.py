"""Conditional-gradient augmented-Lagrangian solver.

A projection-free first-order method for convex problems
    min f(x)  s.t.  g(x) <= 0,  x in C,
where C is touched only through a linear minimization oracle.  A single
loop interleaves a Frank-Wolfe step on the augmented Lagrangian with a
safeguarded multiplier update under increasing penalty and diminishing
dual stepsizes.
"""

from .model import (
    ConstraintBlock,
    FeasibleSetOracle,
    ProblemInstance,
    SmoothConvexFn,
    validate_instance,
)
from .solver import (
    DualStepSchedule,
    OpenLoop,
    PenaltySchedule,
    ScheduleSet,
    Short,
    SolverConfig,
    TraceRecord,
    run,
    warmstart_prefactor,
)
from .problems import gen_ball_qp, gen_qcqp, oracle_optimum_2d
from .analysis import RateCertificate, SequenceSpec, fit_rate, metrics
from .harness import ExperimentConfig, read_trace, run_experiment, write_trace

__version__ = "0.1.0"

__all__ = [
    "ConstraintBlock",
    "FeasibleSetOracle",
    "ProblemInstance",
    "SmoothConvexFn",
    "validate_instance",
    "DualStepSchedule",
    "OpenLoop",
    "PenaltySchedule",
    "ScheduleSet",
    "Short",
    "SolverConfig",
    "TraceRecord",
    "run",
    "warmstart_prefactor",
    "gen_ball_qp",
    "gen_qcqp",
    "oracle_optimum_2d",
    "RateCertificate",
    "SequenceSpec",
    "fit_rate",
    "metrics",
    "ExperimentConfig",
    "read_trace",
    "run_experiment",
    "write_trace",
    "__version__",
]
