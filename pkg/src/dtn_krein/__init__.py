"""Discrete Dirichlet-to-Neumann maps and Krein resolvent formulas.

The package builds finite models of uniformly elliptic operators (a
Hermitian matrix with interior/boundary/exterior node sets), computes their
gamma fields and Q-functions, and measures how well the generalized
Q-function identities, the Krein resolvent formula and its trace version,
and the transmission-coupling analogues hold.
"""
from .errors import (
    ConfigError,
    FluxMismatch,
    LayoutError,
    NearSingularShift,
    NoExteriorPartition,
    NotElliptic,
    NotHermitian,
    SingularBoundaryBlock,
    SingularQ,
)
from .numerics import HermitianEigen, ShiftedSolver, heig, solve, svd_values
from .boundary_model import (
    GammaField,
    Partition,
    PartitionedHermitian,
    QFunction,
    StieltjesData,
    characterization_report,
    dirichlet_op,
    gamma_adjoint_flux,
    gamma_at,
    gamma_update,
    nevanlinna_check,
    neumann_op,
    path3_model,
    q_at,
    q_derivative,
    q_identity_residual,
    q_representation_residual,
    random_model,
    simplicity_rank,
    stieltjes,
    toy_model,
)
from .elliptic_assembly import (
    CoefficientField,
    GridSpec,
    assemble,
    conormal_trace,
    ellipticity_check,
    green_identity_residual,
)
from .krein_verify import (
    KreinReport,
    krein_residual,
    resolvent_difference,
    schatten_report,
    trace_formula,
)
from .coupling import (
    coupled_krein_residual,
    coupled_q,
    coupled_trace_formula,
    orthogonal_sum_op,
    transmission_op,
)
from .rng import SplitMix64

__version__ = "0.1.0"
