"""Reachability-condition generator.

``rc`` answers: what condition does executing a statement impose on reaching
whatever follows it?  Assignments, skip, and null impose nothing; return and
abort make the successor unreachable; sequencing conjoins; an alternative
construct contributes the disjunction of each guard conjoined with its body's
condition.

Loops are truncated at one iteration.  The exit disjunct is the negated guard
disjunction; the one-iteration disjunct conjoins the condition generated by
the loop's body (as an alternative construct) with the negated guard pushed
through one body execution.  When every body is built purely from
assignments, skip, and null, neither iteration count adds a condition and the
result collapses to ``true``; the policy that fired is recorded so reports
stay explicit about the approximation.  A loop whose well-definedness check
is known to have failed generates ``false``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import (
    Abort,
    And,
    Assign,
    BoolLiteral,
    Do,
    If,
    Not,
    Null,
    Or,
    Pred,
    Return,
    Seq,
    Skip,
    Stmt,
)
from .predicate import simplify
from .wp import DerivationStep, _WpEngine, _and_fold, _or_fold

POLICY_ORDER = ("none", "k0", "k1", "declared_false")


@dataclass(frozen=True)
class RcResult:
    predicate: Pred
    loop_policy_used: str  # "none" | "k0" | "k1" | "declared_false"
    derivation: tuple[DerivationStep, ...]


def _is_plain_composition(stmt: Stmt) -> bool:
    if isinstance(stmt, (Assign, Skip, Null)):
        return True
    if isinstance(stmt, Seq):
        return _is_plain_composition(stmt.first) and _is_plain_composition(stmt.second)
    return False


class _RcEngine:
    def __init__(self, lwdc_failed: bool = False):
        self.steps: list[DerivationStep] = []
        self.policies: set[str] = set()
        self.lwdc_failed = lwdc_failed

    def record(self, rule: str, before: Pred, after: Pred) -> Pred:
        self.steps.append(DerivationStep(rule, before, after))
        return after

    def condition(self, stmt: Stmt) -> Pred:
        true = BoolLiteral(True)
        if isinstance(stmt, (Assign, Skip, Null)):
            return self.record("no-condition", true, true)
        if isinstance(stmt, (Return, Abort)):
            return self.record("unreachable-after", true, BoolLiteral(False))
        if isinstance(stmt, Seq):
            left = self.condition(stmt.first)
            right = self.condition(stmt.second)
            return self.record("sequence", true, And(left, right))
        if isinstance(stmt, If):
            disjuncts = [And(gc.guard, self.condition(gc.body)) for gc in stmt.commands]
            return self.record("alternative", true, _or_fold(disjuncts))
        if isinstance(stmt, Do):
            return self.loop_condition(stmt)
        raise TypeError(f"rc: unexpected statement {stmt!r}")

    def loop_condition(self, loop: Do) -> Pred:
        true = BoolLiteral(True)
        if self.lwdc_failed:
            self.policies.add("declared_false")
            return self.record("loop-lwdc-failed", true, BoolLiteral(False))
        guard = _or_fold([gc.guard for gc in loop.commands])
        exit_now = Not(guard)
        if all(_is_plain_composition(gc.body) for gc in loop.commands):
            # Plain bodies generate no conditions in either the exit or the
            # one-iteration case, so nothing constrains reaching the successor.
            self.policies.add("k1")
            return self.record("loop-plain-body", true, BoolLiteral(True))
        body_condition = _or_fold(
            [And(gc.guard, self.condition(gc.body)) for gc in loop.commands]
        )
        after_one = _WpEngine(0, "PR").transform(
            If(loop.commands), exit_now, BoolLiteral(True)
        )
        one_iteration = simplify(And(body_condition, after_one))
        if one_iteration == BoolLiteral(False):
            self.policies.add("k0")
            return self.record("loop-exit-only", true, exit_now)
        self.policies.add("k1")
        return self.record("loop-one-iteration", true, Or(exit_now, one_iteration))

    def policy(self) -> str:
        if not self.policies:
            return "none"
        return max(self.policies, key=POLICY_ORDER.index)


def rc(stmt: Stmt) -> RcResult:
    """Reachability condition generated by a statement, simplified."""
    engine = _RcEngine()
    raw = engine.condition(stmt)
    result = simplify(raw)
    engine.record("simplify", raw, result)
    return RcResult(result, engine.policy(), tuple(engine.steps))


def rc_loop(loop: Do, lwdc_failed: bool = False) -> RcResult:
    """Reachability condition generated by one loop statement."""
    engine = _RcEngine(lwdc_failed=lwdc_failed)
    raw = engine.loop_condition(loop)
    result = simplify(raw)
    engine.record("simplify", raw, result)
    return RcResult(result, engine.policy(), tuple(engine.steps))
