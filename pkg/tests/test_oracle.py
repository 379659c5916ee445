import random

import pytest

import gclrip as g
from gclrip.errors import NondeterministicChoiceError
from gclrip.oracle import ABORTED, FUEL_EXHAUSTED, RETURNED, run_fragment

from conftest import CORPUS_PAIRS


def run(program, **scalars):
    arrays = scalars.pop("arrays", None)
    return g.execute(program, g.State(scalars, arrays or {}))


@pytest.mark.parametrize(
    "name, inputs, expected",
    [
        ("chkdig", {"a": 15, "b": 6}, 3),
        ("chkdig_m1", {"a": 15, "b": 6}, 2),
        ("chkdig", {"a": 15, "b": 4}, 2),
        ("chkdig_m1", {"a": 15, "b": 4}, 2),
        ("chkdig", {"a": 0, "b": 5}, 3),
        ("chkdig", {"a": 7, "b": 12}, 1),
        ("min", {"a": 3, "b": -1}, -1),
        ("min_m1", {"a": 3, "b": -1}, -1),
        ("iseven", {"a": -4}, 1),
        ("iseven", {"a": -3}, 0),
    ],
)
def test_execute_returns_expected_value(corpus, name, inputs, expected):
    outcome = run(corpus[name], **inputs)
    assert outcome.kind == RETURNED
    assert outcome.value == expected


def test_search_instance(corpus):
    original = run(corpus["search"], x=2, arrays={"b": [5]})
    mutant = run(corpus["search_m"], x=2, arrays={"b": [5]})
    assert (original.kind, original.value) == (RETURNED, 0)
    assert (mutant.kind, mutant.value) == (RETURNED, 1)


def test_no_true_guard_aborts():
    program = g.parse_program("program P() { if false -> skip fi }")
    outcome = g.execute(program, g.State())
    assert outcome.kind == ABORTED


def test_multiple_true_guards_is_nondeterministic():
    program = g.parse_program("program P() { if true -> skip [] true -> skip fi }")
    outcome = g.execute(program, g.State())
    assert outcome.kind == "nondeterministic_choice"


def test_division_by_zero_aborts_with_reason():
    program = g.parse_program("program P(a) { x := 1 / a; return (x) }")
    outcome = run(program, a=0)
    assert outcome.kind == ABORTED
    assert "zero" in outcome.reason


def test_fall_through_uses_result_variable_if_set():
    # the result pseudo-variable cannot be assigned in a valid program, so
    # bind it through the input instead
    program = g.parse_program("program P(a) { x := a }")
    outcome = g.execute(program, g.State({"a": 1, "P": 9}))
    assert (outcome.kind, outcome.value) == (RETURNED, 9)
    nothing = g.execute(program, g.State({"a": 1}))
    assert nothing.kind == ABORTED


def test_bare_return_uses_result_variable_if_set():
    program = g.parse_program("program P(a) { return }")
    assert g.execute(program, g.State({"a": 1, "P": 4})).value == 4
    assert g.execute(program, g.State({"a": 1})).kind == ABORTED


def test_multiple_assignment_is_simultaneous():
    program = g.parse_program("program P(a, b) { a, b := b, a; return (a - b) }")
    outcome = run(program, a=10, b=3)
    assert outcome.value == -7


def test_fuel_exhaustion_on_diverging_loop():
    program = g.parse_program("program P() { do true -> skip od; return (1) }")
    outcome = g.execute(program, g.State(), fuel=50)
    assert outcome.kind == FUEL_EXHAUSTED


def test_fuel_monotonicity(corpus):
    state = g.State({"a": 15, "b": 6})
    base = g.execute(corpus["chkdig"], state)
    needed = base.trace_len
    for fuel in (needed, needed + 1, needed + 100):
        again = g.execute(corpus["chkdig"], state, fuel=fuel)
        assert (again.kind, again.value) == (base.kind, base.value)
    starved = g.execute(corpus["chkdig"], state, fuel=needed - 1)
    assert starved.kind == FUEL_EXHAUSTED


def test_execute_is_deterministic(corpus):
    state = g.State({"a": 23, "b": 7})
    a = g.execute(corpus["chkdig"], state)
    b = g.execute(corpus["chkdig"], state)
    assert (a.kind, a.value, a.trace_len) == (b.kind, b.value, b.trace_len)


def test_watch_records_visits_per_iteration(corpus):
    template = g.locate_mutation(corpus["chkdig"], corpus["chkdig_m1"])
    outcome = g.execute(
        corpus["chkdig"], g.State({"a": 15, "b": 6}), watch=template.location
    )
    assert len(outcome.l_states) == 2  # two loop iterations reach the site
    assert outcome.l_state == outcome.l_states[0]
    first = outcome.l_states[0]
    assert (first.scalars["t"], first.scalars["r"], first.scalars["d"]) == (15, 1, 0)


def test_run_fragment_reports_store():
    stmt = g.parse_program("program P(a) { x := a + 1 }").body
    tag, state = run_fragment([stmt], g.State({"a": 1}), "P")
    assert tag == "ok"
    assert state.scalars["x"] == 2
    ret = g.parse_program("program P(a) { return (a) }").body
    tag, state = run_fragment([ret], g.State({"a": 1}), "P")
    assert tag == "return"
    assert state.scalars["P"] == 1


# -- kill analysis ------------------------------------------------------------


def kill(corpus, orig, mut, domain, **kw):
    template = g.locate_mutation(corpus[orig], corpus[mut])
    return g.kill_analysis(corpus[orig], corpus[mut], template.location, domain, **kw)


def test_min_mutant1_kill_sets(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    report = kill(corpus, "min", "min_m1", dom)
    strong = {(s.scalars["a"], s.scalars["b"]) for s in report.strong_kill}
    weak = {(s.scalars["a"], s.scalars["b"]) for s in report.weak_kill}
    grid = [(a, b) for a in range(-3, 4) for b in range(-3, 4)]
    assert strong == {(a, b) for a, b in grid if b > a}
    assert weak == {(a, b) for a, b in grid if a != b}
    assert len(report.reached) == 49
    assert report.total_enumerated == 49
    assert report.fuel_exhausted == 0


def test_min_mutant2_never_killed(corpus):
    dom = g.DomainSpec.make({"a": (-5, 5), "b": (-5, 5)})
    report = kill(corpus, "min", "min_m2", dom)
    assert report.strong_kill == ()
    assert report.weak_kill == ()
    assert len(report.reached) == 121


def test_iseven_kill_sets(corpus):
    dom = g.DomainSpec.make({"a": (-6, 6)})
    report = kill(corpus, "iseven", "iseven_m", dom)
    strong = sorted(s.scalars["a"] for s in report.strong_kill)
    weak = sorted(s.scalars["a"] for s in report.weak_kill)
    assert strong == [-5, -3, -1]
    assert weak == [-6, -5, -4, -3, -2, -1]


def test_search_kill_set_property(corpus):
    dom = g.DomainSpec.make({"x": (0, 5)}, {"b": g.ArraySpec(1, 2, 0, 5)})
    report = kill(corpus, "search", "search_m", dom)
    for state in report.strong_kill:
        xs, arr = state.scalars["x"], state.arrays["b"]
        assert xs not in arr and any(xs < v for v in arr)
    strong = {(s.arrays["b"], s.scalars["x"]) for s in report.strong_kill}
    assert ((5,), 2) in strong


def test_kill_chain_inclusion_on_every_pair(corpus):
    for orig, mut, dom in CORPUS_PAIRS:
        report = kill(corpus, orig, mut, dom)
        strong = set(report.strong_kill)
        weak = set(report.weak_kill)
        reached = set(report.reached)
        assert strong <= weak <= reached, (orig, mut)


def test_fuel_exhausted_inputs_are_excluded_and_counted(corpus):
    dom = g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})
    template = g.locate_mutation(corpus["chkdig"], corpus["chkdig_m1"])
    report = g.kill_analysis(
        corpus["chkdig"], corpus["chkdig_m1"], template.location, dom, fuel=12
    )
    assert report.fuel_exhausted > 0
    full = g.kill_analysis(
        corpus["chkdig"], corpus["chkdig_m1"], template.location, dom
    )
    assert len(report.strong_kill) < len(full.strong_kill)


def test_nondeterminism_fails_kill_analysis():
    original = g.parse_program(
        "program P(a) { if a >= 0 -> x := 1 [] a <= 0 -> x := 2 fi; return (x) }"
    )
    mutant = g.parse_program(
        "program P(a) { if a >= 0 -> x := 9 [] a <= 0 -> x := 2 fi; return (x) }"
    )
    template = g.locate_mutation(original, mutant)
    with pytest.raises(NondeterministicChoiceError):
        g.kill_analysis(
            original, mutant, template.location, g.DomainSpec.make({"a": (-1, 1)})
        )
