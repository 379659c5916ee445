import gclrip as g


def test_rc_assignment_is_true():
    result = g.rc(g.parse_program("program P(a) { m := a }").body)
    assert result.predicate == g.BoolLiteral(True)
    assert result.loop_policy_used == "none"


def test_rc_skip_null_are_true():
    assert g.rc(g.Skip()).predicate == g.BoolLiteral(True)
    assert g.rc(g.Null()).predicate == g.BoolLiteral(True)


def test_rc_return_and_abort_are_false():
    assert g.rc(g.Return(g.Var("s"))).predicate == g.BoolLiteral(False)
    assert g.rc(g.Abort()).predicate == g.BoolLiteral(False)


def test_rc_seq_is_conjunction():
    s1 = g.parse_program("program P(a) { if a < 0 -> skip [] a >= 0 -> abort fi }").body
    s2 = g.parse_program("program P(a) { if a > 2 -> skip [] a <= 2 -> abort fi }").body
    combined = g.rc(g.Seq(s1, s2)).predicate
    law = g.simplify(g.And(g.rc(s1).predicate, g.rc(s2).predicate))
    assert combined == law


def test_rc_chkdig_prefix_before_loop(corpus):
    stmts = g.seq_to_list(corpus["chkdig"].body)
    prefix = g.list_to_seq(stmts[:5])
    result = g.rc(prefix)
    assert result.predicate == g.parse_predicate("b > 1 && b <= 10 && a >= 0")
    assert result.loop_policy_used == "none"


def test_rc_chkdig_prefix_with_loop(corpus):
    # The loop body is assignments only, so it contributes true under the
    # one-iteration policy and the policy flag records the truncation.
    stmts = g.seq_to_list(corpus["chkdig"].body)
    prefix = g.list_to_seq(stmts[:6])
    result = g.rc(prefix)
    assert result.predicate == g.parse_predicate("b > 1 && b <= 10 && a >= 0")
    assert result.loop_policy_used == "k1"


def test_rc_loop_free_without_exits_is_true():
    program = g.parse_program(
        "program P(a) { m := a; if m < 0 -> m := 0 - m [] m >= 0 -> skip fi; x := m }"
    )
    assert g.rc(program.body).predicate == g.BoolLiteral(True)


def test_rc_loop_plain_body_is_true_with_policy():
    loop = g.parse_program("program P() { do true -> skip od }").body
    result = g.rc_loop(loop)
    assert result.predicate == g.BoolLiteral(True)
    assert result.loop_policy_used == "k1"


def test_rc_loop_returning_body_leaves_exit_condition():
    loop = g.parse_program("program P(gv) { do gv > 0 -> return (1) od }").body
    result = g.rc_loop(loop)
    assert result.predicate == g.parse_predicate("gv <= 0")
    assert result.loop_policy_used == "k0"


def test_rc_loop_guarded_body_uses_one_iteration(corpus):
    loop = next(s for s in g.seq_to_list(corpus["search"].body) if isinstance(s, g.Do))
    result = g.rc_loop(loop)
    assert result.loop_policy_used == "k1"
    assert isinstance(result.predicate, g.Or)
    # the zero-iteration branch is the negated guard
    assert result.predicate.left == g.parse_predicate("i >= l")


def test_rc_loop_lwdc_failed_is_false(corpus):
    loop = next(s for s in g.seq_to_list(corpus["search"].body) if isinstance(s, g.Do))
    result = g.rc_loop(loop, lwdc_failed=True)
    assert result.predicate == g.BoolLiteral(False)
    assert result.loop_policy_used == "declared_false"


def test_rc_derivation_ends_at_result(corpus):
    result = g.rc(corpus["chkdig"].body)
    assert result.derivation[-1].rule == "simplify"
    assert result.derivation[-1].after == result.predicate


def test_rc_unreachable_after_whole_corpus_programs(corpus):
    # every corpus program ends in a return, so nothing after it is reachable
    for name, program in corpus.items():
        assert g.rc(program.body).predicate == g.BoolLiteral(False), name


def test_rc_soundness_on_loop_free_prefix(corpus):
    """Where rc is false and no loop policy fired, execution never falls
    through the prefix."""
    stmts = g.seq_to_list(corpus["min"].body)
    prefix_with_return = g.list_to_seq(stmts)  # ends in return
    result = g.rc(prefix_with_return)
    assert result.loop_policy_used == "none"
    assert result.predicate == g.BoolLiteral(False)
    for a in range(-3, 4):
        for b in range(-3, 4):
            outcome = g.execute(corpus["min"], g.State({"a": a, "b": b}))
            assert outcome.kind == "returned"  # never falls off the end
