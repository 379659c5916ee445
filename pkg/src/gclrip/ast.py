"""Abstract syntax for guarded-command programs, expressions, and predicates.

All nodes are frozen dataclasses: structural equality and hashing come from
the node fields, while source spans are excluded from comparison so that two
parses of the same text are equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Union

#: Distinguished member of a free-variable set marking that a Marker node may
#: mention any identifier beyond those syntactically visible.
MARKER_ANY = "*"


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Node:
    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Expr(Node):
    pass


@dataclass(frozen=True)
class IntLiteral(Expr):
    value: int


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class ArrayRead(Expr):
    array: str
    index: Expr


@dataclass(frozen=True)
class ArrayLength(Expr):
    array: str


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    """Exact rational division; no truncation happens here."""

    left: Expr
    right: Expr


@dataclass(frozen=True)
class Floor(Expr):
    """Floor of a rational subterm; the only integer-producing coercion."""

    operand: Expr


# ---------------------------------------------------------------------------
# Predicates
# ---------------------------------------------------------------------------

CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Pred(Node):
    pass


@dataclass(frozen=True)
class BoolLiteral(Pred):
    value: bool


@dataclass(frozen=True)
class Cmp(Pred):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self) -> None:
        if self.op not in CMP_OPS:
            raise ValueError(f"unknown comparison operator {self.op!r}")


@dataclass(frozen=True)
class Not(Pred):
    operand: Pred


@dataclass(frozen=True)
class And(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Or(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Implies(Pred):
    left: Pred
    right: Pred


@dataclass(frozen=True)
class Marker(Pred):
    """Opaque postcondition symbol carrying pending substitutions.

    The pending list is ordered: the leftmost pair is applied first when the
    symbol is eventually interpreted, so ``Marker("A", (("m", b), ("m", a)))``
    reads "A with m replaced by b, then m replaced by a in the result".
    """

    tag: str
    substitutions: tuple[tuple[str, Expr], ...] = ()


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Stmt(Node):
    pass


@dataclass(frozen=True)
class Assign(Stmt):
    targets: tuple[str, ...]
    values: tuple[Expr, ...]


@dataclass(frozen=True)
class Skip(Stmt):
    pass


@dataclass(frozen=True)
class Null(Stmt):
    pass


@dataclass(frozen=True)
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Abort(Stmt):
    pass


@dataclass(frozen=True)
class Seq(Stmt):
    first: Stmt
    second: Stmt


@dataclass(frozen=True)
class LoopAnnotation(Node):
    invariant: Pred
    variant: Expr
    modified: tuple[str, ...]


@dataclass(frozen=True)
class GuardedCommand(Node):
    guard: Pred
    body: Stmt


@dataclass(frozen=True)
class If(Stmt):
    commands: tuple[GuardedCommand, ...]


@dataclass(frozen=True)
class Do(Stmt):
    commands: tuple[GuardedCommand, ...]
    annotation: Optional[LoopAnnotation] = None


@dataclass(frozen=True)
class Program(Node):
    """A named program; the name doubles as the result pseudo-variable."""

    name: str
    params: tuple[str, ...]
    body: Stmt


# ---------------------------------------------------------------------------
# Sequence helpers
# ---------------------------------------------------------------------------


def seq_to_list(stmt: Stmt) -> list[Stmt]:
    """Flatten nested sequential composition into a statement list."""
    if isinstance(stmt, Seq):
        return seq_to_list(stmt.first) + seq_to_list(stmt.second)
    return [stmt]


def list_to_seq(stmts: list[Stmt]) -> Stmt:
    """Right-nested sequential composition of a statement list.

    The empty list denotes the program with no statements.
    """
    if not stmts:
        return Null()
    result = stmts[-1]
    for st in reversed(stmts[:-1]):
        result = Seq(st, result)
    return result


def strip_trailing_nulls(stmts: list[Stmt]) -> list[Stmt]:
    """Drop trailing `null` padding; a list of only nulls keeps one."""
    out = list(stmts)
    while len(out) > 1 and isinstance(out[-1], Null):
        out.pop()
    return out


# ---------------------------------------------------------------------------
# Free variables
# ---------------------------------------------------------------------------


def free_vars(node: Union[Expr, Pred, Stmt, GuardedCommand, Program]) -> frozenset[str]:
    """Identifiers read by a node.

    Marker nodes contribute the free variables of their pending substitution
    expressions plus MARKER_ANY, since the symbol itself may mention anything.
    """
    acc: set[str] = set()
    _free_vars(node, acc)
    return frozenset(acc)


def _free_vars(node, acc: set[str]) -> None:
    if isinstance(node, IntLiteral):
        return
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, ArrayRead):
        acc.add(node.array)
        _free_vars(node.index, acc)
    elif isinstance(node, ArrayLength):
        acc.add(node.array)
    elif isinstance(node, (Neg, Floor, Not)):
        _free_vars(node.operand, acc)
    elif isinstance(node, (Add, Sub, Mul, Div, And, Or, Implies)):
        _free_vars(node.left, acc)
        _free_vars(node.right, acc)
    elif isinstance(node, Cmp):
        _free_vars(node.left, acc)
        _free_vars(node.right, acc)
    elif isinstance(node, BoolLiteral):
        return
    elif isinstance(node, Marker):
        acc.add(MARKER_ANY)
        for _, expr in node.substitutions:
            _free_vars(expr, acc)
    elif isinstance(node, Assign):
        for value in node.values:
            _free_vars(value, acc)
    elif isinstance(node, (Skip, Null, Abort)):
        return
    elif isinstance(node, Return):
        if node.value is not None:
            _free_vars(node.value, acc)
    elif isinstance(node, Seq):
        _free_vars(node.first, acc)
        _free_vars(node.second, acc)
    elif isinstance(node, GuardedCommand):
        _free_vars(node.guard, acc)
        _free_vars(node.body, acc)
    elif isinstance(node, (If, Do)):
        for gc in node.commands:
            _free_vars(gc, acc)
        if isinstance(node, Do) and node.annotation is not None:
            _free_vars(node.annotation.invariant, acc)
            _free_vars(node.annotation.variant, acc)
    elif isinstance(node, Program):
        _free_vars(node.body, acc)
    else:
        raise TypeError(f"free_vars: unexpected node {node!r}")


def assigned_vars(stmt: Stmt) -> frozenset[str]:
    """Variables written by any assignment reachable in the statement."""
    acc: set[str] = set()

    def walk(st: Stmt) -> None:
        if isinstance(st, Assign):
            acc.update(st.targets)
        elif isinstance(st, Seq):
            walk(st.first)
            walk(st.second)
        elif isinstance(st, (If, Do)):
            for gc in st.commands:
                walk(gc.body)

    walk(stmt)
    return frozenset(acc)


def contains_marker(pred: Pred) -> bool:
    if isinstance(pred, Marker):
        return True
    if isinstance(pred, Not):
        return contains_marker(pred.operand)
    if isinstance(pred, (And, Or, Implies)):
        return contains_marker(pred.left) or contains_marker(pred.right)
    return False


def iter_statements(stmt: Stmt) -> Iterator[Stmt]:
    """Yield every statement node, outermost first."""
    yield stmt
    if isinstance(stmt, Seq):
        yield from iter_statements(stmt.first)
        yield from iter_statements(stmt.second)
    elif isinstance(stmt, (If, Do)):
        for gc in stmt.commands:
            yield from iter_statements(gc.body)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: Optional[Span] = None

    def __str__(self) -> str:
        where = f" at {self.span}" if self.span else ""
        return f"{self.severity}{where}: {self.message}"


def validate(program: Program) -> list[Diagnostic]:
    """Check the structural invariants of a program.

    Returns an empty list iff the program is well formed.  Use-before-assign
    findings are conservative and reported as warnings; everything else is an
    error.
    """
    diags: list[Diagnostic] = []

    def error(msg: str, span: Optional[Span]) -> None:
        diags.append(Diagnostic("error", msg, span))

    def warning(msg: str, span: Optional[Span]) -> None:
        diags.append(Diagnostic("warning", msg, span))

    assigned = assigned_vars(program.body)
    if program.name in program.params:
        error(f"program name {program.name!r} collides with a parameter", program.span)
    if program.name in assigned:
        error(f"program name {program.name!r} collides with an assigned variable", program.span)

    def check_stmt(st: Stmt) -> None:
        if isinstance(st, Assign):
            if len(st.targets) != len(st.values):
                error(
                    f"assignment has {len(st.targets)} targets but {len(st.values)} values",
                    st.span,
                )
            seen: set[str] = set()
            for t in st.targets:
                if t in seen:
                    error(f"duplicate assignment target {t!r}", st.span)
                seen.add(t)
        elif isinstance(st, Seq):
            check_stmt(st.first)
            check_stmt(st.second)
        elif isinstance(st, (If, Do)):
            if not st.commands:
                kind = "do" if isinstance(st, Do) else "if"
                error(f"{kind} construct has no guarded commands", st.span)
            for gc in st.commands:
                if contains_marker(gc.guard):
                    error("guard contains a postcondition marker", gc.span)
                check_stmt(gc.body)
            if isinstance(st, Do) and st.annotation is not None:
                body_assigns = frozenset().union(
                    *(assigned_vars(gc.body) for gc in st.commands)
                ) if st.commands else frozenset()
                if body_assigns and not st.annotation.modified:
                    error("loop assigns variables but annotation lists none as modified", st.span)

    check_stmt(program.body)
    _check_reads(program, warning)
    return diags


def _check_reads(program: Program, warning) -> None:
    # Conservative use-before-assign walk: a variable counts as defined only
    # if it is assigned on every syntactic path before the read.
    def reads_of(node) -> set[str]:
        return {v for v in free_vars(node) if v != MARKER_ANY}

    def walk(st: Stmt, defined: frozenset[str]) -> frozenset[str]:
        if isinstance(st, Assign):
            for value in st.values:
                report_undefined(reads_of(value), defined, st.span)
            return defined | set(st.targets)
        if isinstance(st, Return):
            if st.value is not None:
                report_undefined(reads_of(st.value), defined, st.span)
            return defined
        if isinstance(st, Seq):
            defined = walk(st.first, defined)
            return walk(st.second, defined)
        if isinstance(st, (If, Do)):
            for gc in st.commands:
                report_undefined(reads_of(gc.guard), defined, gc.span)
            if isinstance(st, Do) and st.annotation is not None:
                report_undefined(reads_of(st.annotation.invariant), defined, st.span)
                report_undefined(reads_of(st.annotation.variant), defined, st.span)
            outcomes = [walk(gc.body, defined) for gc in st.commands]
            if isinstance(st, If) and outcomes:
                return frozenset.intersection(*outcomes)
            # A loop may run zero times, so only the incoming set survives.
            return defined
        return defined

    reported: set[str] = set()

    def report_undefined(read: set[str], defined: frozenset[str], span) -> None:
        for name in sorted(read - defined - reported):
            reported.add(name)
            warning(f"variable {name!r} may be read before assignment", span)

    walk(program.body, frozenset(program.params))
