"""Reachability, Infection, Propagation, and full-test-specification analysis
for a modification template.

Each condition has a symbolic side (predicates built from the reachability
generator and the weakest-precondition transformer) and a semantic side
(exhaustive execution over a finite input domain).  The semantic sides are
computed independently of the kill oracle so the two can cross-validate each
other.

"L-state" means the full variable store immediately before executing the
mutated statement along the original program's trace; an input whose trace
visits L several times contributes one L-state per visit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    And,
    Assign,
    Cmp,
    Do,
    If,
    iter_statements,
    list_to_seq,
    Marker,
    Not,
    Or,
    Pred,
    Program,
    seq_to_list,
    Stmt,
    Var,
)
from .errors import NondeterministicChoiceError
from .mutation import GUARDED_COMMAND, ModificationTemplate, STATEMENT
from .oracle import (
    DEFAULT_FUEL,
    FUEL_EXHAUSTED,
    KillReport,
    LocationPath,
    NONDETERMINISTIC,
    enumerate_inputs,
    execute,
    execute_stmts,
    kill_analysis,
    run_fragment,
)
from .predicate import DEFAULT_MAX_STATES, DomainSpec, State, eval_pred, simplify
from .rc import rc
from .wp import wp

POSTCONDITION_TAG = "A"


@dataclass(frozen=True)
class InfectionResult:
    symbolic: Optional[Pred]
    semantic_witnesses: tuple[State, ...]
    symbolic_agrees: Optional[bool]


@dataclass(frozen=True)
class PropagationResult:
    wp_u: Pred
    wp_m: Pred
    semantic: tuple[State, ...]


@dataclass(frozen=True)
class RipReport:
    reachability: Pred
    infection: InfectionResult
    propagation: PropagationResult
    full_spec_bounded: tuple[State, ...]
    classification: str
    domain: DomainSpec
    unroll_bound: int
    kill_report: KillReport
    notes: tuple[str, ...]

    def to_json(self):
        from .parser import format_pred

        return {
            "reachability": format_pred(self.reachability),
            "infection": {
                "symbolic": (
                    format_pred(self.infection.symbolic)
                    if self.infection.symbolic is not None
                    else None
                ),
                "witnesses": [s.to_json() for s in self.infection.semantic_witnesses],
            },
            "propagation": {
                "wp_u": format_pred(self.propagation.wp_u),
                "wp_m": format_pred(self.propagation.wp_m),
                "witnesses": [s.to_json() for s in self.propagation.semantic],
            },
            "full_spec": [s.to_json() for s in self.full_spec_bounded],
            "classification": self.classification,
            "domain": self.domain.to_json(),
            "unroll_bound": self.unroll_bound,
            "oracle": self.kill_report.to_json(),
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# Reachability
# ---------------------------------------------------------------------------


def reachability(template: ModificationTemplate) -> Pred:
    """Condition for execution to reach the mutated statement."""
    before = rc(template.prog_b).predicate
    if template.kind == STATEMENT:
        return simplify(before)
    result: Pred = before
    for guard in template.guards:
        result = And(result, guard)
    result = And(result, rc(template.prog_jb).predicate)
    return simplify(result)


# ---------------------------------------------------------------------------
# Tracing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Trace:
    input_state: State
    visits: tuple[State, ...]


def _trace_inputs(
    template: ModificationTemplate,
    domain: DomainSpec,
    fuel: int,
    max_states: int,
) -> list[_Trace]:
    traces: list[_Trace] = []
    for inp in enumerate_inputs(template.original, domain, max_states):
        outcome = execute(template.original, inp, fuel=fuel, watch=template.location)
        if outcome.kind == FUEL_EXHAUSTED:
            continue
        if outcome.kind == NONDETERMINISTIC:
            raise NondeterministicChoiceError(
                "original program hit a nondeterministic choice"
            )
        traces.append(_Trace(inp, outcome.l_states))
    return traces


def _continuation(program: Program, location: LocationPath) -> list[Stmt]:
    """Statements that remain to execute starting at the watched location.

    Walking back out of the enclosing constructs, a repetitive construct is
    re-entered after its branch remainder, since the loop re-checks its
    guards once the body completes.
    """
    frames: list[tuple[list[Stmt], int]] = []
    stmts = seq_to_list(program.body)
    k = 0
    while k < len(location):
        kind, index = location[k]
        assert kind == "stmt"
        frames.append((stmts, index))
        k += 1
        if k < len(location):
            kind, branch = location[k]
            assert kind == "branch"
            construct = stmts[index]
            assert isinstance(construct, (If, Do))
            stmts = seq_to_list(construct.commands[branch].body)
            k += 1
    inner_list, inner_index = frames[-1]
    tail: list[Stmt] = [inner_list[inner_index]] + inner_list[inner_index + 1 :]
    for outer_list, outer_index in reversed(frames[:-1]):
        construct = outer_list[outer_index]
        if isinstance(construct, Do):
            tail = tail + [construct]
        tail = tail + outer_list[outer_index + 1 :]
    return tail


# ---------------------------------------------------------------------------
# Infection
# ---------------------------------------------------------------------------


def _symbolic_infection(st_u: Stmt, st_m: Stmt) -> Optional[Pred]:
    if isinstance(st_u, Assign) and isinstance(st_m, Assign):
        if len(st_u.targets) == 1 and len(st_m.targets) == 1:
            if st_u.targets == st_m.targets and st_u.values != st_m.values:
                return simplify(Cmp("!=", st_u.values[0], st_m.values[0]))
            if st_u.values == st_m.values and st_u.targets != st_m.targets:
                value = st_u.values[0]
                return simplify(
                    Or(
                        Cmp("!=", Var(st_u.targets[0]), value),
                        Cmp("!=", Var(st_m.targets[0]), value),
                    )
                )
        return None
    if isinstance(st_u, (If, Do)) and type(st_u) is type(st_m):
        assert isinstance(st_m, (If, Do))
        if len(st_u.commands) != len(st_m.commands):
            return None
        for gc_u, gc_m in zip(st_u.commands, st_m.commands):
            if gc_u.guard != gc_m.guard:
                g, gm = gc_u.guard, gc_m.guard
                return simplify(Or(And(g, Not(gm)), And(Not(g), gm)))
    return None


def _post_states_differ(
    st_u: Stmt, st_m: Stmt, state: State, name: str, fuel: int
) -> bool:
    post_u = run_fragment([st_u], state, name, fuel=fuel)
    post_m = run_fragment([st_m], state, name, fuel=fuel)
    if "fuel" in (post_u[0], post_m[0]):
        return False
    return post_u != post_m


def infection(
    template: ModificationTemplate,
    domain: DomainSpec,
    fuel: int = DEFAULT_FUEL,
    max_states: int = DEFAULT_MAX_STATES,
) -> InfectionResult:
    """States at the mutated location whose post-states differ.

    The semantic side realises weak killing: it executes the original and the
    mutated statement from every reachable L-state and compares the stores
    immediately after, the result variable included.
    """
    traces = _trace_inputs(template, domain, fuel, max_states)
    return _infection_from_traces(template, traces, fuel)


def _infection_from_traces(
    template: ModificationTemplate, traces: list[_Trace], fuel: int
) -> InfectionResult:
    st_u, st_m = template.mutated_pair
    symbolic = _symbolic_infection(st_u, st_m)
    name = template.original.name
    reachable: dict[State, bool] = {}
    for trace in traces:
        for state in trace.visits:
            if state not in reachable:
                reachable[state] = _post_states_differ(st_u, st_m, state, name, fuel)
    witnesses = tuple(
        sorted((s for s, infected in reachable.items() if infected), key=State.key)
    )
    agrees: Optional[bool] = None
    if symbolic is not None:
        try:
            symbolic_set = {s for s in reachable if eval_pred(symbolic, s)}
            agrees = symbolic_set == set(witnesses)
        except Exception:
            agrees = None
    return InfectionResult(symbolic, witnesses, agrees)


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------


def _suffix_statements(template: ModificationTemplate, mutated: bool) -> list[Stmt]:
    """The statement list whose wp expresses propagation for one side."""
    if template.kind == STATEMENT:
        head = template.st_m if mutated else template.st_u
        return [head] + list(template.top_after)
    innermost = template.guard_path[-1].construct_kind
    if innermost == "if":
        head = template.st_jm if mutated else template.st_ju
        assert head is not None
        return [head] + seq_to_list(template.prog_ja) + list(template.top_after)
    # Innermost construct is a loop: propagation starts from the whole loop.
    head = template.st_m if mutated else template.st_u
    return [head] + list(template.top_after)


def propagation(
    template: ModificationTemplate,
    domain: DomainSpec,
    unroll_bound: int = 1,
    fuel: int = DEFAULT_FUEL,
    max_states: int = DEFAULT_MAX_STATES,
) -> PropagationResult:
    """Which infected L-states produce different program outputs."""
    traces = _trace_inputs(template, domain, fuel, max_states)
    inf = _infection_from_traces(template, traces, fuel)
    return _propagation_from_traces(template, inf, unroll_bound, fuel)


def _propagation_from_traces(
    template: ModificationTemplate,
    inf: InfectionResult,
    unroll_bound: int,
    fuel: int,
) -> PropagationResult:
    name = template.original.name
    post = Marker(POSTCONDITION_TAG)
    wp_u = wp(
        list_to_seq(_suffix_statements(template, mutated=False)),
        post,
        unroll_bound,
        name,
    ).predicate
    wp_m = wp(
        list_to_seq(_suffix_statements(template, mutated=True)),
        post,
        unroll_bound,
        name,
    ).predicate
    cont_u = _continuation(template.original, template.location)
    cont_m = _continuation(template.mutant, template.location)
    semantic: list[State] = []
    for state in inf.semantic_witnesses:
        out_u = execute_stmts(cont_u, state, name, fuel=fuel)
        out_m = execute_stmts(cont_m, state, name, fuel=fuel)
        if FUEL_EXHAUSTED in (out_u.kind, out_m.kind):
            continue
        if NONDETERMINISTIC in (out_u.kind, out_m.kind):
            raise NondeterministicChoiceError(
                "suffix execution hit a nondeterministic choice"
            )
        if out_u.output() != out_m.output():
            semantic.append(state)
    return PropagationResult(wp_u, wp_m, tuple(sorted(semantic, key=State.key)))


# ---------------------------------------------------------------------------
# Full test specification
# ---------------------------------------------------------------------------


def full_test_spec(
    template: ModificationTemplate,
    domain: DomainSpec,
    unroll_bound: int = 1,
    fuel: int = DEFAULT_FUEL,
    max_states: int = DEFAULT_MAX_STATES,
) -> RipReport:
    """Conjunction of the three conditions, realised on the semantic side.

    An input belongs to the full test specification when its trace reaches
    the mutated location with some L-state that is both infected and
    propagating.  The report also carries the kill oracle's independently
    computed strong/weak sets for cross-checking.
    """
    reach = reachability(template)
    traces = _trace_inputs(template, domain, fuel, max_states)
    inf = _infection_from_traces(template, traces, fuel)
    prop = _propagation_from_traces(template, inf, unroll_bound, fuel)
    propagating = set(prop.semantic)
    full = [
        trace.input_state
        for trace in traces
        if any(state in propagating for state in trace.visits)
    ]
    if full:
        classification = "strongly_killable"
    elif inf.semantic_witnesses:
        classification = "weakly_killable_only"
    else:
        classification = "no_kill_found_on_domain"
    kill = kill_analysis(
        template.original,
        template.mutant,
        template.location,
        domain,
        fuel=fuel,
        max_states=max_states,
    )
    notes: list[str] = []
    if any(
        isinstance(st, Do)
        for side in (False, True)
        for stmt in _suffix_statements(template, side)
        for st in iter_statements(stmt)
    ):
        notes.append(
            f"symbolic propagation unrolls loops up to {unroll_bound} iteration(s); "
            "the semantic side executes them exhaustively"
        )
    return RipReport(
        reachability=reach,
        infection=inf,
        propagation=prop,
        full_spec_bounded=tuple(sorted(full, key=State.key)),
        classification=classification,
        domain=domain,
        unroll_bound=unroll_bound,
        kill_report=kill,
        notes=tuple(notes),
    )
