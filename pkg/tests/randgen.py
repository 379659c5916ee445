"""Deterministic random generators for the property suites."""

from __future__ import annotations

import random

import gclrip as g

VARS = ("x", "y", "z")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


def random_expr(rng: random.Random, depth: int = 2, division: bool = False) -> g.Expr:
    if depth == 0 or rng.random() < 0.4:
        if rng.random() < 0.5:
            return g.IntLiteral(rng.randint(-4, 4))
        return g.Var(rng.choice(VARS))
    kinds = ["add", "sub", "mul", "neg", "floor"]
    if division:
        kinds.append("div")
    kind = rng.choice(kinds)
    if kind == "neg":
        return g.Neg(random_expr(rng, depth - 1, division))
    if kind == "floor":
        return g.Floor(random_expr(rng, depth - 1, division))
    cls = {"add": g.Add, "sub": g.Sub, "mul": g.Mul, "div": g.Div}[kind]
    return cls(random_expr(rng, depth - 1, division), random_expr(rng, depth - 1, division))


def random_pred(rng: random.Random, depth: int = 2) -> g.Pred:
    if depth == 0 or rng.random() < 0.4:
        return g.Cmp(rng.choice(CMP_OPS), random_expr(rng, 1), random_expr(rng, 1))
    kind = rng.choice(("and", "or", "not", "implies"))
    if kind == "not":
        return g.Not(random_pred(rng, depth - 1))
    cls = {"and": g.And, "or": g.Or, "implies": g.Implies}[kind]
    return cls(random_pred(rng, depth - 1), random_pred(rng, depth - 1))


def random_stmt(rng: random.Random, depth: int) -> g.Stmt:
    roll = rng.random()
    if depth > 0 and roll < 0.25:
        guard = random_pred(rng, 1)
        then = [random_stmt(rng, depth - 1) for _ in range(rng.randint(1, 2))]
        other = [random_stmt(rng, depth - 1) for _ in range(rng.randint(1, 2))]
        return g.If(
            (
                g.GuardedCommand(guard, g.list_to_seq(then)),
                g.GuardedCommand(g.Not(guard), g.list_to_seq(other)),
            )
        )
    if roll < 0.35:
        return g.Skip() if rng.random() < 0.5 else g.Null()
    if roll < 0.38:
        return g.Abort()
    if roll < 0.55:
        targets = tuple(rng.sample(VARS, 2))
        values = (random_expr(rng, 2), random_expr(rng, 2))
        return g.Assign(targets, values)
    return g.Assign((rng.choice(VARS),), (random_expr(rng, 2),))


def random_loop_free_program(rng: random.Random) -> g.Program:
    """Deterministic, total, loop-free program over x, y, z ending in a return.

    Alternative constructs use a guard and its negation, so exactly one
    branch is always enabled; expressions avoid division.
    """
    stmts = [random_stmt(rng, depth=2) for _ in range(rng.randint(2, 5))]
    stmts.append(g.Return(random_expr(rng, 2)))
    return g.Program("P", VARS, g.list_to_seq(stmts))


def random_state(rng: random.Random, lo: int = -4, hi: int = 4) -> g.State:
    return g.State({v: rng.randint(lo, hi) for v in VARS})


# -- richer generator for parser round-trip fuzzing -------------------------


def _fuzz_stmt(rng: random.Random, depth: int) -> g.Stmt:
    roll = rng.random()
    if depth > 0 and roll < 0.18:
        gcs = tuple(
            g.GuardedCommand(
                random_pred(rng, 1),
                g.list_to_seq([_fuzz_stmt(rng, depth - 1) for _ in range(rng.randint(1, 2))]),
            )
            for _ in range(rng.randint(1, 3))
        )
        return g.If(gcs)
    if depth > 0 and roll < 0.30:
        annotation = None
        if rng.random() < 0.5:
            annotation = g.LoopAnnotation(
                random_pred(rng, 1), random_expr(rng, 1), tuple(rng.sample(VARS, 2))
            )
        gcs = tuple(
            g.GuardedCommand(
                random_pred(rng, 1),
                g.list_to_seq([_fuzz_stmt(rng, depth - 1) for _ in range(rng.randint(1, 2))]),
            )
            for _ in range(rng.randint(1, 2))
        )
        return g.Do(gcs, annotation)
    if roll < 0.4:
        return rng.choice((g.Skip(), g.Null(), g.Abort()))
    if roll < 0.5:
        return g.Return(_fuzz_expr(rng, 2) if rng.random() < 0.8 else None)
    if roll < 0.62:
        targets = tuple(rng.sample(VARS, 2))
        return g.Assign(targets, (_fuzz_expr(rng, 2), _fuzz_expr(rng, 2)))
    return g.Assign((rng.choice(VARS),), (_fuzz_expr(rng, 2),))


def _fuzz_expr(rng: random.Random, depth: int) -> g.Expr:
    if depth == 0 or rng.random() < 0.35:
        roll = rng.random()
        if roll < 0.35:
            return g.IntLiteral(rng.randint(0, 20))
        if roll < 0.7:
            return g.Var(rng.choice(VARS))
        if roll < 0.85:
            return g.ArrayRead("arr", g.IntLiteral(rng.randint(0, 3)))
        return g.ArrayLength("arr")
    kind = rng.choice(("add", "sub", "mul", "div", "neg", "floor"))
    if kind == "neg":
        return g.Neg(_fuzz_expr(rng, depth - 1))
    if kind == "floor":
        return g.Floor(_fuzz_expr(rng, depth - 1))
    cls = {"add": g.Add, "sub": g.Sub, "mul": g.Mul, "div": g.Div}[kind]
    return cls(_fuzz_expr(rng, depth - 1), _fuzz_expr(rng, depth - 1))


def random_fuzz_program(rng: random.Random) -> g.Program:
    """Arbitrary well-formed AST for pretty-printer round-trip fuzzing."""
    stmts = [_fuzz_stmt(rng, depth=2) for _ in range(rng.randint(1, 6))]
    return g.Program("Fuzz", ("x", "y", "z", "arr"), g.list_to_seq(stmts))
