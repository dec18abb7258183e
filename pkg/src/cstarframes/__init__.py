"""Continuous frames in Hilbert C*-modules over block matrix algebras.

The algebra is ``A = M_{n_1}(C) + ... + M_{n_K}(C)``, the module is
``A^d`` and frames are indexed by finite weighted measure spaces.  The
package provides the frame apparatus (synthesis, analysis and frame
operators, bounds, duals, Riesz-type detection) and constructive checks of
the perturbation results for such frames.
"""

from .algebra import (
    AlgebraDescriptor,
    AlgebraElement,
    abs_squared,
    adjoint,
    alg_norm,
    invert,
    is_central,
    is_hermitian,
    is_positive,
    is_unitary,
    order_leq,
)
from .errors import (
    CStarFramesError,
    ConclusionFailed,
    DescriptorMismatch,
    DimensionMismatch,
    HypothesisUnreachable,
    HypothesisViolated,
    NotAFrame,
    NotInvertible,
    SingularElement,
    SingularOperator,
    SmallnessViolated,
    SpaceMismatch,
    TooManyAtoms,
    UnknownTheorem,
    UnsatisfiableRequest,
)
from .frames import (
    FrameBounds,
    FrameMap,
    L2Element,
    MeasureSpace,
    analysis_apply,
    analysis_operator,
    canonical_dual,
    frame_operator,
    is_dual_pair,
    is_frame,
    is_mu_complete,
    is_riesz_type,
    l2_inner,
    l2_norm,
    norm_bounds_check,
    norm_bounds_estimate,
    order_bounds,
    riesz_basis_check,
    scale_frame,
    synthesis_apply,
    synthesis_operator,
)
from .module import (
    AdjointableOperator,
    ModuleElement,
    adjoint_op,
    apply,
    flatten_op,
    flatten_vec,
    inner,
    invert_op,
    is_bounded_below,
    is_surjective,
    min_singular,
    module_norm,
    op_norm,
)
from .perturbation import (
    THEOREM_IDS,
    PerturbationConstants,
    TheoremReport,
    build_K,
    build_R,
    check_R_invertible,
    check_R_surjective,
    predict_sum_bounds,
    pw_conclusion_bounds,
    pw_hypothesis_check,
    verify_bessel_difference,
    verify_dual_perturbation,
    verify_kernel_corollary,
    verify_pw_theorem,
    verify_riesz_preservation,
    verify_RS_theorem,
    verify_sum_theorem,
)
from .generate import gen_central, gen_frame, gen_perturbation, gen_unitary
from .scenario import Scenario
from .campaign import falsify

__version__ = "0.1.0"

__all__ = [
    "AlgebraDescriptor",
    "AlgebraElement",
    "abs_squared",
    "adjoint",
    "alg_norm",
    "invert",
    "is_central",
    "is_hermitian",
    "is_positive",
    "is_unitary",
    "order_leq",
    "CStarFramesError",
    "ConclusionFailed",
    "DescriptorMismatch",
    "DimensionMismatch",
    "HypothesisUnreachable",
    "HypothesisViolated",
    "NotAFrame",
    "NotInvertible",
    "SingularElement",
    "SingularOperator",
    "SmallnessViolated",
    "SpaceMismatch",
    "TooManyAtoms",
    "UnknownTheorem",
    "UnsatisfiableRequest",
    "FrameBounds",
    "FrameMap",
    "L2Element",
    "MeasureSpace",
    "analysis_apply",
    "analysis_operator",
    "canonical_dual",
    "frame_operator",
    "is_dual_pair",
    "is_frame",
    "is_mu_complete",
    "is_riesz_type",
    "l2_inner",
    "l2_norm",
    "norm_bounds_check",
    "norm_bounds_estimate",
    "order_bounds",
    "riesz_basis_check",
    "scale_frame",
    "synthesis_apply",
    "synthesis_operator",
    "AdjointableOperator",
    "ModuleElement",
    "adjoint_op",
    "apply",
    "flatten_op",
    "flatten_vec",
    "inner",
    "invert_op",
    "is_bounded_below",
    "is_surjective",
    "min_singular",
    "module_norm",
    "op_norm",
    "THEOREM_IDS",
    "PerturbationConstants",
    "TheoremReport",
    "build_K",
    "build_R",
    "check_R_invertible",
    "check_R_surjective",
    "predict_sum_bounds",
    "pw_conclusion_bounds",
    "pw_hypothesis_check",
    "verify_bessel_difference",
    "verify_dual_perturbation",
    "verify_kernel_corollary",
    "verify_pw_theorem",
    "verify_riesz_preservation",
    "verify_RS_theorem",
    "verify_sum_theorem",
    "gen_central",
    "gen_frame",
    "gen_perturbation",
    "gen_unitary",
    "Scenario",
    "falsify",
    "__version__",
]
