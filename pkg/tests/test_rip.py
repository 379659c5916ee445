import itertools

import gclrip as g
from gclrip.rip import _continuation

from conftest import CORPUS_PAIRS


def template(corpus, orig, mut):
    return g.locate_mutation(corpus[orig], corpus[mut])


# -- reachability ---------------------------------------------------------------


def test_reachability_min_mutant1(corpus):
    assert g.reachability(template(corpus, "min", "min_m1")) == g.BoolLiteral(True)


def test_reachability_iseven(corpus):
    assert g.reachability(template(corpus, "iseven", "iseven_m")) == g.parse_predicate(
        "a < 0"
    )


def test_reachability_chkdig_mutant1(corpus):
    result = g.reachability(template(corpus, "chkdig", "chkdig_m1"))
    assert result == g.simplify(
        g.parse_predicate("(b > 1 && b <= 10 && a >= 0) && (r > 0 && d < b)")
    )


def test_reachability_chkdig_mutant2(corpus):
    # The prefix ends with a plain-bodied loop, which the one-iteration
    # policy resolves to true, so only the entry filter remains (the loop's
    # exit condition is not conjoined; the policy flag records why).
    result = g.reachability(template(corpus, "chkdig", "chkdig_m2"))
    assert result == g.parse_predicate("b > 1 && b <= 10 && a >= 0")
    assert g.rc(template(corpus, "chkdig", "chkdig_m2").prog_b).loop_policy_used == "k1"


def test_reachability_search(corpus):
    assert g.reachability(template(corpus, "search", "search_m")) == g.parse_predicate(
        "i < l"
    )


# -- infection --------------------------------------------------------------------


def test_infection_min_mutant1(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    result = g.infection(template(corpus, "min", "min_m1"), dom)
    assert result.symbolic == g.parse_predicate("a != b")
    witnesses = {(s.scalars["a"], s.scalars["b"]) for s in result.semantic_witnesses}
    assert witnesses == {
        (a, b) for a in range(-3, 4) for b in range(-3, 4) if a != b
    }
    assert result.symbolic_agrees is True


def test_infection_min_mutant2_empty(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    result = g.infection(template(corpus, "min", "min_m2"), dom)
    xor = g.parse_predicate("(b < a && b >= m) || (b >= a && b < m)")
    assert result.symbolic == g.simplify(xor)
    assert result.semantic_witnesses == ()
    assert result.symbolic_agrees is True


def test_infection_iseven(corpus):
    dom = g.DomainSpec.make({"a": (-6, 6)})
    result = g.infection(template(corpus, "iseven", "iseven_m"), dom)
    assert result.symbolic == g.parse_predicate("0 - a != 0")
    values = sorted(s.scalars["a"] for s in result.semantic_witnesses)
    assert values == [-6, -5, -4, -3, -2, -1]


def test_infection_chkdig_mutant1(corpus):
    dom = g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})
    result = g.infection(template(corpus, "chkdig", "chkdig_m1"), dom)
    assert result.symbolic == g.parse_predicate("t - r * 10 != t + r * 10")
    # on reachable loop states the difference amounts to r > 0
    assert all(s.scalars["r"] > 0 for s in result.semantic_witnesses)
    assert result.symbolic_agrees is True


def test_infection_symbolic_matches_semantic_on_all_pairs(corpus):
    for orig, mut, dom in CORPUS_PAIRS:
        result = g.infection(template(corpus, orig, mut), dom)
        if result.symbolic is not None:
            assert result.symbolic_agrees is True, (orig, mut)


# -- propagation --------------------------------------------------------------------


def test_propagation_min_mutant1(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    tpl = template(corpus, "min", "min_m1")
    inf = g.infection(tpl, dom)
    prop = g.propagation(tpl, dom)
    infected = {(s.scalars["a"], s.scalars["b"]) for s in inf.semantic_witnesses}
    propagated = {(s.scalars["a"], s.scalars["b"]) for s in prop.semantic}
    assert propagated == {(a, b) for a, b in infected if b >= a}
    assert set(prop.semantic) <= set(inf.semantic_witnesses)


def test_propagation_iseven_odd_after_negation(corpus):
    dom = g.DomainSpec.make({"a": (-6, 6)})
    prop = g.propagation(template(corpus, "iseven", "iseven_m"), dom)
    values = sorted(s.scalars["a"] for s in prop.semantic)
    assert values == [-5, -3, -1]  # infected and odd after negation


def test_propagation_chkdig_mutant2_is_total_on_infected(corpus):
    dom = g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})
    tpl = template(corpus, "chkdig", "chkdig_m2")
    inf = g.infection(tpl, dom)
    prop = g.propagation(tpl, dom)
    assert set(prop.semantic) == set(inf.semantic_witnesses)
    assert prop.semantic != ()


def test_propagation_search_means_absent(corpus):
    dom = g.DomainSpec.make({"x": (0, 3)}, {"b": g.ArraySpec(1, 2, 0, 3)})
    prop = g.propagation(template(corpus, "search", "search_m"), dom)
    for state in prop.semantic:
        xs, arr, i = state.scalars["x"], state.arrays["b"], state.scalars["i"]
        assert xs not in arr[i:]


def test_propagation_wp_sides_follow_loop_rule(corpus):
    # the innermost enclosing construct for the search mutation is a loop,
    # so the symbolic suffix starts at the whole loop on both sides
    tpl = template(corpus, "search", "search_m")
    dom = g.DomainSpec.make({"x": (0, 3)}, {"b": g.ArraySpec(1, 2, 0, 3)})
    prop = g.propagation(tpl, dom)
    assert g.free_vars(tpl.st_u) <= g.free_vars(prop.wp_u) | {g.MARKER_ANY}
    assert prop.wp_u != prop.wp_m


def test_continuation_includes_loop_reentry(corpus):
    tpl = template(corpus, "chkdig", "chkdig_m1")
    cont = _continuation(tpl.original, tpl.location)
    assert cont[0] == tpl.st_ju
    assert any(isinstance(st, g.Do) for st in cont)
    assert isinstance(cont[-1], g.Return)


# -- full test specification -----------------------------------------------------


def test_full_spec_min_mutant1(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    report = g.full_test_spec(template(corpus, "min", "min_m1"), dom)
    inputs = {(s.scalars["a"], s.scalars["b"]) for s in report.full_spec_bounded}
    assert inputs == {(a, b) for a in range(-3, 4) for b in range(-3, 4) if b > a}
    assert report.classification == "strongly_killable"


def test_full_spec_min_mutant2(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    report = g.full_test_spec(template(corpus, "min", "min_m2"), dom)
    assert report.full_spec_bounded == ()
    assert report.classification == "no_kill_found_on_domain"
    assert report.infection.semantic_witnesses == ()


def test_full_spec_iseven(corpus):
    dom = g.DomainSpec.make({"a": (-6, 6)})
    report = g.full_test_spec(template(corpus, "iseven", "iseven_m"), dom)
    values = sorted(s.scalars["a"] for s in report.full_spec_bounded)
    assert values == [-5, -3, -1]


def test_full_spec_chkdig_mutant1_digit_predicate(corpus):
    dom = g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})
    report = g.full_test_spec(template(corpus, "chkdig", "chkdig_m1"), dom)
    inputs = {(s.scalars["a"], s.scalars["b"]) for s in report.full_spec_bounded}
    expected = {
        (a, b)
        for a in range(25)
        for b in range(12)
        if 1 < b <= 10 and a >= 10 and all(int(d) < b for d in str(a))
    }
    assert inputs == expected


def test_weakly_killable_only_classification():
    # infected but never propagated: the clobbered variable is overwritten
    original = g.parse_program("program P(a) { x := a; x := 0; return (x) }")
    mutant = g.parse_program("program P(a) { x := a + 1; x := 0; return (x) }")
    tpl = g.locate_mutation(original, mutant)
    report = g.full_test_spec(tpl, g.DomainSpec.make({"a": (0, 3)}))
    assert report.classification == "weakly_killable_only"
    assert report.full_spec_bounded == ()
    assert report.infection.semantic_witnesses != ()
    assert report.kill_report.strong_kill == ()
    assert report.kill_report.weak_kill != ()


def test_conjunction_law_on_all_pairs(corpus):
    """full_spec equals reach-and-infect-and-propagate computed independently."""
    for orig, mut, dom in CORPUS_PAIRS:
        tpl = template(corpus, orig, mut)
        report = g.full_test_spec(tpl, dom)
        infected = set(report.infection.semantic_witnesses)
        propagated = set(report.propagation.semantic)
        assert propagated <= infected, (orig, mut)
        recomputed = set()
        for inp in dom.states(tpl.original.params):
            outcome = g.execute(tpl.original, inp, watch=tpl.location)
            visits = set(outcome.l_states)
            if visits and (visits & infected) and (visits & propagated):
                recomputed.add(inp)
        assert recomputed == set(report.full_spec_bounded), (orig, mut)


def test_oracle_agreement_on_all_pairs(corpus):
    """Headline cross-validation: full_spec equals the oracle strong-kill set."""
    for orig, mut, dom in CORPUS_PAIRS:
        report = g.full_test_spec(template(corpus, orig, mut), dom)
        assert set(report.full_spec_bounded) == set(report.kill_report.strong_kill), (
            orig,
            mut,
        )


def test_strong_subset_weak_on_all_pairs(corpus):
    for orig, mut, dom in CORPUS_PAIRS:
        report = g.full_test_spec(template(corpus, orig, mut), dom)
        assert set(report.kill_report.strong_kill) <= set(report.kill_report.weak_kill)


def test_reachability_consistency_without_truncation(corpus):
    """Inputs contributing an L-state satisfy the reachability predicate when
    no loop policy fired in its computation."""
    for orig, mut, dom in CORPUS_PAIRS:
        tpl = template(corpus, orig, mut)
        rc_result = g.rc(tpl.prog_b)
        if rc_result.loop_policy_used != "none":
            continue
        reach = g.reachability(tpl)
        for inp in dom.states(tpl.original.params):
            outcome = g.execute(tpl.original, inp, watch=tpl.location)
            for l_state in outcome.l_states:
                state = g.State(
                    {**inp.scalars, **l_state.scalars},
                    {**inp.arrays, **l_state.arrays},
                )
                assert g.eval_pred(reach, state) is True, (orig, mut, inp)


def test_report_notes_flag_loop_truncation(corpus):
    dom = g.DomainSpec.make({"a": (0, 12), "b": (0, 6)})
    report = g.full_test_spec(template(corpus, "chkdig", "chkdig_m1"), dom)
    assert report.notes


def test_report_json_shape(corpus):
    dom = g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})
    report = g.full_test_spec(template(corpus, "min", "min_m1"), dom)
    obj = report.to_json()
    assert set(obj) == {
        "reachability",
        "infection",
        "propagation",
        "full_spec",
        "classification",
        "domain",
        "unroll_bound",
        "oracle",
        "notes",
    }
    assert obj["reachability"] == "true"
    assert obj["infection"]["symbolic"] == "a != b"
    assert len(obj["full_spec"]) == 21
    assert obj["classification"] == "strongly_killable"
