"""Exact nearest-point projection onto the cross {(x, y) : <x, y> = 0}.

The package has four layers: dense vector primitives (:mod:`.linalg`),
the closed-form projection with its case classification and set-valued
degenerate family (:mod:`.projection`), independent verification oracles
(:mod:`.oracle`), and projection-splitting feasibility solvers for
complementarity-style constraints (:mod:`.solvers`).  A CLI front end
lives in :mod:`.cli` (console script ``crossproj``).
"""

__version__ = "0.1.0"

from .errors import (
    CaseError,
    DimensionMismatch,
    DivergenceError,
    DomainError,
    NotUnitNorm,
    SingularSystem,
)
from .linalg import (
    Pair,
    SphericalCoords,
    as_pair,
    as_vector,
    block_solve,
    complement_project,
    inner,
    norm,
    rank1_project,
    reflect,
    sphere_point,
)
from .projection import (
    DEFAULT_TOLS,
    CaseTag,
    FamilyProjection,
    LambdaPair,
    ProjectionResult,
    SingletonProjection,
    Tolerances,
    candidate,
    classify,
    degenerate_family,
    distance_sq,
    family_enumerate,
    family_samples,
    membership,
    membership_residual,
    objective,
    project,
    project_1d,
    solve_lambda,
)
from .oracle import (
    CheckReport,
    OracleReport,
    check,
    lagrangian_oracle,
    subspace_oracle,
)
from .solvers import (
    AffinePairConstraint,
    BoxPairConstraint,
    FeasibilityProblem,
    OrthantPairConstraint,
    SolverTrace,
    alternating_projections,
    default_start,
    douglas_rachford,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    project_orthant_pair,
)

__all__ = [
    "__version__",
    # errors
    "CaseError",
    "DimensionMismatch",
    "DivergenceError",
    "DomainError",
    "NotUnitNorm",
    "SingularSystem",
    # linalg
    "Pair",
    "SphericalCoords",
    "as_pair",
    "as_vector",
    "block_solve",
    "complement_project",
    "inner",
    "norm",
    "rank1_project",
    "reflect",
    "sphere_point",
    # projection
    "DEFAULT_TOLS",
    "CaseTag",
    "FamilyProjection",
    "LambdaPair",
    "ProjectionResult",
    "SingletonProjection",
    "Tolerances",
    "candidate",
    "classify",
    "degenerate_family",
    "distance_sq",
    "family_enumerate",
    "family_samples",
    "membership",
    "membership_residual",
    "objective",
    "project",
    "project_1d",
    "solve_lambda",
    # oracle
    "CheckReport",
    "OracleReport",
    "check",
    "lagrangian_oracle",
    "subspace_oracle",
    # solvers
    "AffinePairConstraint",
    "BoxPairConstraint",
    "FeasibilityProblem",
    "OrthantPairConstraint",
    "SolverTrace",
    "alternating_projections",
    "default_start",
    "douglas_rachford",
    "generate_instance",
    "instance_from_dict",
    "instance_to_dict",
    "project_orthant_pair",
]
