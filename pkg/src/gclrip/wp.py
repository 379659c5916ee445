"""Weakest preconditions for all statement forms, with bounded loop unrolling
and loop well-definedness checking.

The transformer is computed against two postconditions internally: one for
normal fall-through and one for termination via ``return``.  A return
substitutes the program name in the *return* postcondition and discards the
continuation accumulated so far, which matches the interpreter: statements
after a return never execute.  The public entry point starts both
postconditions at the caller's predicate.

A ``do`` loop is unrolled through the guard-augmented alternative construct
(the loop's guarded commands plus an explicit "exit" branch), and the result
is the disjunction of the termination predicates for 0..k iterations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    And,
    Assign,
    Abort,
    BoolLiteral,
    Cmp,
    Do,
    Expr,
    free_vars,
    GuardedCommand,
    If,
    Implies,
    IntLiteral,
    iter_statements,
    MARKER_ANY,
    Not,
    Null,
    Or,
    Pred,
    Return,
    Seq,
    Skip,
    Stmt,
    Var,
)
from .errors import DomainError, MissingAnnotationError
from .predicate import (
    DEFAULT_MAX_STATES,
    DomainSpec,
    State,
    eval_pred,
    simplify,
    substitute,
    substitute_parallel,
)


@dataclass(frozen=True)
class DerivationStep:
    rule: str
    before: Pred
    after: Pred


@dataclass(frozen=True)
class WpResult:
    predicate: Pred
    derivation: tuple[DerivationStep, ...]


def _or_fold(preds: list[Pred]) -> Pred:
    result = preds[0]
    for p in preds[1:]:
        result = Or(result, p)
    return result


def _and_fold(preds: list[Pred]) -> Pred:
    result = preds[0]
    for p in preds[1:]:
        result = And(result, p)
    return result


class _WpEngine:
    def __init__(self, unroll_bound: int, program_name: str):
        self.unroll_bound = unroll_bound
        self.program_name = program_name
        self.steps: list[DerivationStep] = []

    def record(self, rule: str, before: Pred, after: Pred) -> Pred:
        self.steps.append(DerivationStep(rule, before, after))
        return after

    def transform(self, stmt: Stmt, normal: Pred, at_return: Pred) -> Pred:
        if isinstance(stmt, Assign):
            mapping = dict(zip(stmt.targets, stmt.values))
            return self.record("assignment", normal, substitute_parallel(normal, mapping))
        if isinstance(stmt, Skip):
            return self.record("skip", normal, normal)
        if isinstance(stmt, Null):
            return self.record("null", normal, normal)
        if isinstance(stmt, Abort):
            return self.record("abort", normal, BoolLiteral(False))
        if isinstance(stmt, Return):
            if stmt.value is None:
                return self.record("return", at_return, at_return)
            result = substitute(at_return, self.program_name, stmt.value)
            return self.record("return", at_return, result)
        if isinstance(stmt, Seq):
            rest = self.transform(stmt.second, normal, at_return)
            return self.transform(stmt.first, rest, at_return)
        if isinstance(stmt, If):
            return self.record(
                "alternative", normal, self._alternative(stmt.commands, normal, at_return)
            )
        if isinstance(stmt, Do):
            return self.record(
                f"loop-unroll(bound={self.unroll_bound})",
                normal,
                self._loop(stmt, normal, at_return),
            )
        raise TypeError(f"wp: unexpected statement {stmt!r}")

    def _alternative(
        self, commands: tuple[GuardedCommand, ...], normal: Pred, at_return: Pred
    ) -> Pred:
        some_guard = _or_fold([gc.guard for gc in commands])
        branches = [
            Implies(gc.guard, self.transform(gc.body, normal, at_return))
            for gc in commands
        ]
        return _and_fold([some_guard] + branches)

    def _loop(self, loop: Do, normal: Pred, at_return: Pred) -> Pred:
        guard = _or_fold([gc.guard for gc in loop.commands])
        augmented = loop.commands + (GuardedCommand(Not(guard), Skip()),)
        h = And(normal, Not(guard))
        parts = [h]
        for _ in range(self.unroll_bound):
            h = self._alternative(augmented, h, at_return)
            parts.append(h)
        return _or_fold(parts)


def wp(
    stmt: Stmt,
    post: Pred,
    unroll_bound: int = 1,
    program_name: str = "PR",
) -> WpResult:
    """Weakest precondition of a statement against a postcondition.

    ``post`` may contain opaque postcondition symbols; loop termination is
    approximated by unrolling up to ``unroll_bound`` iterations.
    """
    if unroll_bound < 0:
        raise ValueError("unroll_bound must be nonnegative")
    engine = _WpEngine(unroll_bound, program_name)
    raw = engine.transform(stmt, post, post)
    result = simplify(raw)
    engine.record("simplify", raw, result)
    return WpResult(result, tuple(engine.steps))


def format_derivation(steps: tuple[DerivationStep, ...]) -> str:
    from .parser import format_pred

    lines = []
    for i, step in enumerate(steps):
        lines.append(f"{i + 1:>3}. [{step.rule}]")
        lines.append(f"     post: {format_pred(step.before)}")
        lines.append(f"     wp:   {format_pred(step.after)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Loop well-definedness
# ---------------------------------------------------------------------------

OBLIGATIONS = ("invariant_preserved", "variant_decreases", "variant_positive")


@dataclass(frozen=True)
class LwdcResult:
    holds_on_domain: bool
    failing_obligation: str  # one of OBLIGATIONS or "none"
    counterexample: Optional[State]


def _fresh_variant_var(loop: Do) -> str:
    used = set()
    for st in iter_statements(loop):
        used |= free_vars(st)
    n = 0
    while f"x${n}" in used:
        n += 1
    return f"x${n}"


def check_lwdc(
    loop: Do,
    domain: DomainSpec,
    unroll_bound: int = 1,
    max_states: int = DEFAULT_MAX_STATES,
) -> LwdcResult:
    """Check the three loop obligations by exhaustive enumeration.

    For every state drawn from the domain over the loop's variables: the
    invariant is preserved by each guarded body, the variant strictly
    decreases, and the variant is positive while some guard holds.  A body
    that exits via ``return`` ends the loop, so it discharges the preservation
    and decrease obligations trivially (its wp is taken against ``true``).
    The first failing state is reported.
    """
    if loop.annotation is None:
        raise MissingAnnotationError("loop carries no invariant/variant annotation")
    ann = loop.annotation
    invariant, variant = ann.invariant, ann.variant
    guard = _or_fold([gc.guard for gc in loop.commands])
    fresh = _fresh_variant_var(loop)

    def obligation_wp(body: Stmt, post: Pred) -> Pred:
        engine = _WpEngine(unroll_bound, "PR")
        return simplify(engine.transform(body, post, BoolLiteral(True)))

    per_branch: list[tuple[Pred, Pred, Pred]] = []
    for gc in loop.commands:
        entered = And(invariant, gc.guard)
        preserves = obligation_wp(gc.body, invariant)
        decrease_body = Seq(Assign((fresh,), (variant,)), gc.body)
        decreases = obligation_wp(decrease_body, Cmp("<", variant, Var(fresh)))
        per_branch.append((entered, preserves, decreases))
    positive_pre = And(invariant, guard)
    positive = Cmp(">", variant, IntLiteral(0))

    names: set[str] = set(ann.modified)
    for node in (invariant, variant, guard):
        names |= free_vars(node)
    names.discard(MARKER_ANY)
    missing = sorted(names - set(domain.names()))
    if missing:
        raise DomainError(f"domain does not cover: {', '.join(missing)}")
    domain.check_size(max_states, names=sorted(names))

    for state in domain.states(sorted(names)):
        for entered, preserves, _ in per_branch:
            if eval_pred(entered, state) and not eval_pred(preserves, state):
                return LwdcResult(False, "invariant_preserved", state)
        for entered, _, decreases in per_branch:
            if eval_pred(entered, state) and not eval_pred(decreases, state):
                return LwdcResult(False, "variant_decreases", state)
        if eval_pred(positive_pre, state) and not eval_pred(positive, state):
            return LwdcResult(False, "variant_positive", state)
    return LwdcResult(True, "none", None)
