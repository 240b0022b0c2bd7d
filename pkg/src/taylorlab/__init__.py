"""Finite idempotent algebras: Maltsev conditions, loop lemmas and term synthesis."""

from .algebra import (
    FiniteAlgebra,
    NotTaylor,
    OperationTable,
    Relation,
    TaylorReport,
    absorbs,
    check_shape,
    compatible,
    eval_term,
    is_taylor_operation,
    nu_from_semiabsorbing,
    produces_enough_absorption,
    satisfies,
    semiabsorbing_ii_prime,
)
from .closure import (
    WitnessedClosure,
    equal_blocks,
    extract_witness,
    generate_closure,
    term_clone_slice,
)
from .conditions import (
    DOUBLE_LOOP_COLUMNS,
    NotTaylorShape,
    ProjectionAssignment,
    TaylorSystem,
    builtin_system,
    check_trivial,
    is_taylor_shape,
    normalize_two_equation,
    single_nontrivial_equation,
    taylor_to_pair_system,
)
from .digraphs import (
    check_loop_conjecture,
    find_polymorphism,
    graph_class,
)
from .errors import (
    ArityError,
    BudgetExceeded,
    ParseError,
    PreconditionError,
    ShapeError,
    TaylorLabError,
)
from .forge import (
    SynthesisResult,
    double_loop_from_taylor,
    explicit_weak3cube_recipe,
    q_and_c_from_strong_double_loop,
    run_pipeline,
    siggers_from_nu,
    strong_double_loop_from_double_loop,
    terminator_from_q,
    verify_idempotency_claim,
    weak_3cube_from_strong_double_loop,
)
from .loops import (
    LoopCertificate,
    brute_loop,
    compose_power,
    find_loop,
    find_loop_constructive,
    find_odd_cycle,
    validate_preconditions,
)
from .prover import (
    Countermodel,
    ProofSession,
    cc_prove,
    find_countermodel,
    verify_derivation_suite,
)
from .terms import (
    App,
    Equation,
    EquationSystem,
    Signature,
    Term,
    TermFunction,
    Var,
    parse_equation,
    parse_term,
    star_compose,
    to_sexpr,
)

__all__ = [
    "FiniteAlgebra",
    "NotTaylor",
    "OperationTable",
    "Relation",
    "TaylorReport",
    "absorbs",
    "check_shape",
    "compatible",
    "eval_term",
    "is_taylor_operation",
    "nu_from_semiabsorbing",
    "produces_enough_absorption",
    "satisfies",
    "semiabsorbing_ii_prime",
    "WitnessedClosure",
    "equal_blocks",
    "extract_witness",
    "generate_closure",
    "term_clone_slice",
    "DOUBLE_LOOP_COLUMNS",
    "NotTaylorShape",
    "ProjectionAssignment",
    "TaylorSystem",
    "builtin_system",
    "check_trivial",
    "is_taylor_shape",
    "normalize_two_equation",
    "single_nontrivial_equation",
    "taylor_to_pair_system",
    "check_loop_conjecture",
    "find_polymorphism",
    "graph_class",
    "ArityError",
    "BudgetExceeded",
    "ParseError",
    "PreconditionError",
    "ShapeError",
    "TaylorLabError",
    "SynthesisResult",
    "double_loop_from_taylor",
    "explicit_weak3cube_recipe",
    "q_and_c_from_strong_double_loop",
    "run_pipeline",
    "siggers_from_nu",
    "strong_double_loop_from_double_loop",
    "terminator_from_q",
    "verify_idempotency_claim",
    "weak_3cube_from_strong_double_loop",
    "LoopCertificate",
    "brute_loop",
    "compose_power",
    "find_loop",
    "find_loop_constructive",
    "find_odd_cycle",
    "validate_preconditions",
    "Countermodel",
    "ProofSession",
    "cc_prove",
    "find_countermodel",
    "verify_derivation_suite",
    "App",
    "Equation",
    "EquationSystem",
    "Signature",
    "Term",
    "TermFunction",
    "Var",
    "parse_equation",
    "parse_term",
    "star_compose",
    "to_sexpr",
]
