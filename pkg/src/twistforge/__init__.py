"""twistforge: exact construction and verification of chains of extended
Jordanian twists for classical Lie algebras.

Everything is computed over Gaussian rationals (optionally extended by a
first-order nilpotent parameter), so every verification is a zero-residual
matrix identity, never an approximation.
"""

from .algebras import (
    ClassicalAlgebra,
    SolvableCarrier,
    build_adjoint,
    build_L_alpha_beta,
    root_label,
)
from .chains import (
    ChainConstructionError,
    ChainSpec,
    InvalidSpecError,
    Level,
    build_chain,
    build_improper_sp,
    build_level_twist,
    build_sp_counterexample,
    chain_carriers,
    classical_r,
    constituent_pairs,
    default_spec,
    initial_roots,
    spec_with_etas,
    structure_check,
    wedge_terms,
)
from .expr import (
    ONE,
    coproduct_leg,
    counit_leg,
    counit_scalar,
    eprod,
    esum,
    eval_expr,
    exp_nil,
    gen,
    log1p,
    permute_legs,
    pow_rat,
    smul,
    tens,
)
from .matrices import (
    ExactMatrix,
    NotNilpotentError,
    SingularMatrixError,
    commutator,
    kron,
    mat_exp_nilpotent,
    mat_inverse,
    mat_log1p_nilpotent,
    mat_mul,
    mat_pow_rational,
    nilpotency_index,
)
from .reps import Representation
from .scalars import EPS, I_UNIT, Scalar, parse_scalar
from .tensors import TensorPoly, TwistElement
from .verify import (
    VerificationReport,
    check_antipode_axiom,
    check_chain_invariance,
    check_counit,
    check_cybe,
    check_factorizable,
    check_L_costructure,
    check_primitivity,
    check_qybe,
    check_triangular,
    check_twist_equation,
    matreshka_report,
    predicate_suite,
    r_matrix,
    semiclassical_match,
    solvable_twist,
    twisted_antipode_element,
    twisted_coproduct,
)

__version__ = "0.1.0"
