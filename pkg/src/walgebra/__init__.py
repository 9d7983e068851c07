"""Exact Poisson lambda-bracket workbench for classical affine W-algebras
of sl(N) and sl(N1|N2) attached to even nilpotents."""

from .liestruct import (
    AlgebraCtx,
    CentralizerData,
    GenIndex,
    PartitionSpec,
    SuperMatrix,
    build_algebra,
    centralizer_basis,
    centralizer_oracle,
    dual_bases,
    sharp_project,
)
from .errors import (
    MissingTableEntry,
    NoSolution,
    NormalizationImpossible,
    ScheduleInapplicable,
    SingularPairing,
    SuperEqualParts,
    UnknownGenerator,
    WAlgebraError,
)
from .coeffs import Coeff
from .pvacore import (
    BracketTable,
    DiffPoly,
    LambdaPoly,
    apply_partial,
    check_jacobi,
    check_skew,
    extend_bracket,
    linear_term,
    nth_product,
    poly_normalize,
    weight_of,
)
from .wbracket import (
    Chain,
    ChainIndex,
    SignConvention,
    SIGN_CONVENTIONS,
    bracket_table,
    conformal_check,
    conformal_vector,
    enumerate_chains,
    master_bracket,
)
from .dsreduction import (
    ReconcileReport,
    ReductionCtx,
    reconcile,
    reduced_bracket,
    solve_all,
)
from .weakgen import (
    ClosureCaps,
    ClosureReport,
    DerivationReport,
    GenericityReport,
    closure_search,
    coefficient_genericity,
    default_caps,
    reduced_rectangular_seeds,
    scripted_verify,
    weak_set,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraCtx",
    "BracketTable",
    "CentralizerData",
    "Chain",
    "ChainIndex",
    "ClosureCaps",
    "ClosureReport",
    "Coeff",
    "DerivationReport",
    "DiffPoly",
    "GenIndex",
    "GenericityReport",
    "LambdaPoly",
    "MissingTableEntry",
    "NoSolution",
    "NormalizationImpossible",
    "PartitionSpec",
    "ReconcileReport",
    "ReductionCtx",
    "ScheduleInapplicable",
    "SignConvention",
    "SIGN_CONVENTIONS",
    "SingularPairing",
    "SuperEqualParts",
    "SuperMatrix",
    "UnknownGenerator",
    "WAlgebraError",
    "apply_partial",
    "bracket_table",
    "build_algebra",
    "centralizer_basis",
    "centralizer_oracle",
    "check_jacobi",
    "check_skew",
    "closure_search",
    "coefficient_genericity",
    "conformal_check",
    "conformal_vector",
    "default_caps",
    "dual_bases",
    "enumerate_chains",
    "extend_bracket",
    "linear_term",
    "master_bracket",
    "nth_product",
    "poly_normalize",
    "reconcile",
    "reduced_bracket",
    "reduced_rectangular_seeds",
    "scripted_verify",
    "sharp_project",
    "solve_all",
    "weak_set",
    "weight_of",
]
