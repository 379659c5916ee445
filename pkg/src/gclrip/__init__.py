"""Mutation analysis for Dijkstra-style guarded-command programs.

The package computes reachability, infection, and propagation conditions for
original/mutant program pairs through a weakest-precondition transformer and
a reachability-condition generator, and cross-validates the results against a
bounded-exhaustive killing oracle.
"""

from .ast import (
    Abort,
    Add,
    And,
    ArrayLength,
    ArrayRead,
    Assign,
    BoolLiteral,
    Cmp,
    Diagnostic,
    Div,
    Do,
    Expr,
    Floor,
    free_vars,
    GuardedCommand,
    If,
    Implies,
    IntLiteral,
    list_to_seq,
    LoopAnnotation,
    Marker,
    MARKER_ANY,
    Mul,
    Neg,
    Not,
    Null,
    Or,
    Pred,
    Program,
    Return,
    Seq,
    seq_to_list,
    Skip,
    Span,
    Stmt,
    Sub,
    validate,
    Var,
)
from .errors import (
    DivisionByZeroError,
    DomainError,
    DomainTooLargeError,
    GclError,
    GclSyntaxError,
    IndexOutOfBoundsError,
    MarkerNotGroundError,
    MissingAnnotationError,
    MultipleDifferencesError,
    NoDifferenceError,
    NondeterministicChoiceError,
    ShapeMismatchError,
    UnboundVariableError,
)
from .mutation import (
    classify,
    locate_mutation,
    ModificationClass,
    ModificationTemplate,
    reassemble,
)
from .oracle import execute, KillReport, kill_analysis, Outcome
from .parser import (
    format_expr,
    format_pred,
    format_stmt,
    parse_expression,
    parse_predicate,
    parse_program,
    pretty_print,
)
from .predicate import (
    ArraySpec,
    bounded_compare,
    ComparisonResult,
    DomainSpec,
    eval_expr,
    eval_pred,
    marker_image,
    simplify,
    State,
    substitute,
    substitute_parallel,
)
from .rc import rc, rc_loop, RcResult
from .rip import (
    full_test_spec,
    infection,
    InfectionResult,
    propagation,
    PropagationResult,
    reachability,
    RipReport,
)
from .wp import check_lwdc, LwdcResult, wp, WpResult

__version__ = "0.1.0"
