"""Concrete interpreter for guarded-command programs and the
bounded-exhaustive kill oracle.

Execution is deterministic small-step interpretation: alternative and
repetitive constructs require exactly one true guard (none aborts an ``if``,
exits a ``do``; more than one is reported as a nondeterministic choice rather
than silently resolved).  A watch location, given as a structural path, makes
the interpreter record the store immediately before and after every visit to
the watched statement.

A location path is a tuple of ``("stmt", i)`` / ``("branch", j)`` steps: the
index into the flattened statement list at each level, and the guarded-command
branch taken to descend into an ``if``/``do``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .ast import (
    Abort,
    Assign,
    Do,
    If,
    Null,
    Program,
    Return,
    Seq,
    seq_to_list,
    Skip,
    Stmt,
)
from .errors import (
    DomainError,
    EvalError,
    NondeterministicChoiceError,
    UnboundVariableError,
)
from .predicate import DomainSpec, State, Value, eval_expr, eval_pred, value_to_json

DEFAULT_FUEL = 10_000

RETURNED = "returned"
ABORTED = "aborted"
FUEL_EXHAUSTED = "fuel_exhausted"
NONDETERMINISTIC = "nondeterministic_choice"

LocationPath = tuple[tuple[str, int], ...]

#: Post-visit record: ("ok"|"return", store) or ("abort", None).
AfterState = tuple[str, Optional[State]]


@dataclass(frozen=True)
class Outcome:
    kind: str
    value: Optional[Value]
    reason: Optional[str]
    trace_len: int
    l_states: tuple[State, ...]
    l_states_after: tuple[AfterState, ...]
    final_state: Optional[State]

    @property
    def l_state(self) -> Optional[State]:
        return self.l_states[0] if self.l_states else None

    def output(self) -> tuple:
        """Comparable observable output; abort reasons are not observable."""
        if self.kind == RETURNED:
            return (RETURNED, self.value)
        return (self.kind,)

    def to_json(self):
        obj = {"kind": self.kind}
        if self.kind == RETURNED:
            obj["value"] = value_to_json(self.value)
        if self.reason is not None:
            obj["reason"] = self.reason
        return obj


class _ReturnSignal(Exception):
    def __init__(self, value: Value):
        self.value = value


class _AbortSignal(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class _NondetSignal(Exception):
    pass


class _FuelSignal(Exception):
    pass


class _Runner:
    def __init__(self, program_name: str, fuel: int, watch: Optional[LocationPath]):
        self.name = program_name
        self.fuel = fuel
        self.steps = 0
        self.watch = watch
        self.pre: list[State] = []
        self.post: list[AfterState] = []
        self.store: dict[str, Value] = {}
        self.arrays: dict[str, tuple[int, ...]] = {}

    def snapshot(self) -> State:
        return State(self.store, self.arrays)

    def _tick(self) -> None:
        self.steps += 1
        self.fuel -= 1
        if self.fuel < 0:
            raise _FuelSignal()

    def run_list(self, stmts: Sequence[Stmt], path: LocationPath) -> None:
        for idx, st in enumerate(stmts):
            here = path + (("stmt", idx),)
            watched = here == self.watch
            if watched:
                self.pre.append(self.snapshot())
            try:
                self.run_stmt(st, here)
            except _ReturnSignal as sig:
                if watched:
                    state = self.snapshot().with_scalar(self.name, sig.value)
                    self.post.append(("return", state))
                raise
            except _AbortSignal:
                if watched:
                    self.post.append(("abort", None))
                raise
            else:
                if watched:
                    self.post.append(("ok", self.snapshot()))

    def run_stmt(self, st: Stmt, path: LocationPath) -> None:
        if isinstance(st, Assign):
            self._tick()
            state = self.snapshot()
            try:
                values = [eval_expr(v, state) for v in st.values]
            except EvalError as err:
                raise _AbortSignal(str(err)) from None
            if len(values) != len(st.targets):
                raise _AbortSignal("assignment arity mismatch")
            for target, value in zip(st.targets, values):
                self.store[target] = value
            return
        if isinstance(st, (Skip, Null)):
            self._tick()
            return
        if isinstance(st, Abort):
            self._tick()
            raise _AbortSignal("abort statement")
        if isinstance(st, Return):
            self._tick()
            if st.value is None:
                if self.name not in self.store:
                    raise _AbortSignal("return without a result value")
                raise _ReturnSignal(self.store[self.name])
            try:
                value = eval_expr(st.value, self.snapshot())
            except EvalError as err:
                raise _AbortSignal(str(err)) from None
            raise _ReturnSignal(value)
        if isinstance(st, Seq):
            # run_list flattens sequences, so a Seq can only appear here for a
            # hand-built AST; flattening it under the same path keeps location
            # bookkeeping consistent with the mutation differ.
            raise AssertionError("sequences are flattened before execution")
        if isinstance(st, If):
            self._tick()
            branch = self._choose(st)
            if branch is None:
                raise _AbortSignal("no guard of the alternative construct held")
            self.run_list(
                seq_to_list(st.commands[branch].body), path + (("branch", branch),)
            )
            return
        if isinstance(st, Do):
            while True:
                self._tick()
                branch = self._choose(st)
                if branch is None:
                    return
                self.run_list(
                    seq_to_list(st.commands[branch].body), path + (("branch", branch),)
                )
            return
        raise TypeError(f"execute: unexpected statement {st!r}")

    def _choose(self, construct) -> Optional[int]:
        state = self.snapshot()
        chosen: Optional[int] = None
        for i, gc in enumerate(construct.commands):
            try:
                if eval_pred(gc.guard, state):
                    if chosen is not None:
                        raise _NondetSignal()
                    chosen = i
            except EvalError as err:
                raise _AbortSignal(str(err)) from None
        return chosen


def _finish(runner: _Runner, kind: str, value=None, reason=None, final=None) -> Outcome:
    return Outcome(
        kind=kind,
        value=value,
        reason=reason,
        trace_len=runner.steps,
        l_states=tuple(runner.pre),
        l_states_after=tuple(runner.post),
        final_state=final,
    )


def execute(
    program: Program,
    input_state: State,
    fuel: int = DEFAULT_FUEL,
    watch: Optional[LocationPath] = None,
) -> Outcome:
    """Run a program on one input; pure in (program, input, fuel, watch)."""
    missing = [
        p
        for p in program.params
        if p not in input_state.scalars and p not in input_state.arrays
    ]
    if missing:
        raise UnboundVariableError(f"input does not bind parameters: {', '.join(missing)}")
    return execute_stmts(
        seq_to_list(program.body), input_state, program.name, fuel=fuel, watch=watch
    )


def execute_stmts(
    stmts: Sequence[Stmt],
    input_state: State,
    program_name: str,
    fuel: int = DEFAULT_FUEL,
    watch: Optional[LocationPath] = None,
) -> Outcome:
    """Run a bare statement list from a given store (continuation execution)."""
    runner = _Runner(program_name, fuel, watch)
    runner.store = dict(input_state.scalars)
    runner.arrays = dict(input_state.arrays)
    try:
        runner.run_list(list(stmts), ())
    except _ReturnSignal as sig:
        final = runner.snapshot().with_scalar(program_name, sig.value)
        return _finish(runner, RETURNED, value=sig.value, final=final)
    except _AbortSignal as sig:
        return _finish(runner, ABORTED, reason=sig.reason)
    except _NondetSignal:
        return _finish(runner, NONDETERMINISTIC, reason="more than one guard held")
    except _FuelSignal:
        return _finish(runner, FUEL_EXHAUSTED, reason="fuel exhausted")
    if program_name in runner.store:
        value = runner.store[program_name]
        return _finish(runner, RETURNED, value=value, final=runner.snapshot())
    return _finish(runner, ABORTED, reason="program ended without a result")


def run_fragment(
    stmts: Sequence[Stmt],
    input_state: State,
    program_name: str,
    fuel: int = DEFAULT_FUEL,
) -> AfterState:
    """Run a statement fragment and report how it left the store.

    Unlike a whole program, falling off the end of a fragment is normal:
    the result is ``("ok", store)``, ``("return", store-with-result)``, or
    ``("abort", None)``.
    """
    runner = _Runner(program_name, fuel, None)
    runner.store = dict(input_state.scalars)
    runner.arrays = dict(input_state.arrays)
    try:
        runner.run_list(list(stmts), ())
    except _ReturnSignal as sig:
        return ("return", runner.snapshot().with_scalar(program_name, sig.value))
    except _AbortSignal:
        return ("abort", None)
    except _NondetSignal:
        raise NondeterministicChoiceError("more than one guard held") from None
    except _FuelSignal:
        return ("fuel", None)
    return ("ok", runner.snapshot())


# ---------------------------------------------------------------------------
# Kill analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KillReport:
    strong_kill: tuple[State, ...]
    weak_kill: tuple[State, ...]
    reached: tuple[State, ...]
    total_enumerated: int
    fuel_exhausted: int

    def to_json(self):
        return {
            "strong_kill": [s.to_json() for s in self.strong_kill],
            "weak_kill": [s.to_json() for s in self.weak_kill],
            "reached": [s.to_json() for s in self.reached],
            "total_enumerated": self.total_enumerated,
            "fuel_exhausted": self.fuel_exhausted,
        }


def enumerate_inputs(program: Program, domain: DomainSpec, max_states: int) -> list[State]:
    missing = sorted(set(program.params) - set(domain.names()))
    if missing:
        raise DomainError(f"domain does not cover parameters: {', '.join(missing)}")
    domain.check_size(max_states, names=program.params)
    return list(domain.states(program.params))


def kill_analysis(
    original: Program,
    mutant: Program,
    location: LocationPath,
    domain: DomainSpec,
    fuel: int = DEFAULT_FUEL,
    max_states: int = 10_000_000,
) -> KillReport:
    """Exhaustively classify every input of the domain.

    Strong kill: observable outputs differ (an abort is an output distinct
    from every returned value).  Weak kill: both traces visit the watched
    location along the same prefix and the stores immediately after it
    differ.  Fuel exhaustion on either side excludes the input from all sets.
    """
    strong: list[State] = []
    weak: list[State] = []
    reached: list[State] = []
    timeouts = 0
    inputs = enumerate_inputs(original, domain, max_states)
    for inp in inputs:
        out_o = execute(original, inp, fuel=fuel, watch=location)
        out_m = execute(mutant, inp, fuel=fuel, watch=location)
        if FUEL_EXHAUSTED in (out_o.kind, out_m.kind):
            timeouts += 1
            continue
        if NONDETERMINISTIC in (out_o.kind, out_m.kind):
            raise NondeterministicChoiceError(
                "a construct had more than one true guard; kill sets would be unreliable"
            )
        if out_o.l_states:
            reached.append(inp)
        if out_o.output() != out_m.output():
            strong.append(inp)
        if _weakly_killed(out_o, out_m):
            weak.append(inp)
    key = lambda s: s.key()
    return KillReport(
        strong_kill=tuple(sorted(strong, key=key)),
        weak_kill=tuple(sorted(weak, key=key)),
        reached=tuple(sorted(reached, key=key)),
        total_enumerated=len(inputs),
        fuel_exhausted=timeouts,
    )


def _weakly_killed(out_o: Outcome, out_m: Outcome) -> bool:
    for pre_o, pre_m, post_o, post_m in zip(
        out_o.l_states, out_m.l_states, out_o.l_states_after, out_m.l_states_after
    ):
        if pre_o != pre_m:
            # The traces diverged before this visit; later visits are not
            # comparable "along the same prefix".
            return False
        if post_o != post_m:
            return True
    return False
