"""Structural diffing of an original/mutant program pair into modification
templates.

The differ is AST-based and assumes a first-order mutant: exactly one minimal
differing site.  A difference at a top-level statement (including any guard
change of an alternative or repetitive construct) is a *statement*
modification; a difference inside a guarded command's body is a
*guarded_command* modification, with the path of enclosing constructs
recorded outermost first.  Trailing ``null`` padding is normalized away
before diffing so that padding alone never counts as a shape change.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from .ast import (
    Assign,
    Do,
    GuardedCommand,
    If,
    list_to_seq,
    Null,
    Pred,
    Program,
    Seq,
    seq_to_list,
    Stmt,
    strip_trailing_nulls,
)
from .errors import (
    MultipleDifferencesError,
    NoDifferenceError,
    ShapeMismatchError,
)
from .oracle import LocationPath

STATEMENT = "statement"
GUARDED_COMMAND = "guarded_command"


def normalize_program(program: Program) -> Program:
    """Strip trailing null padding from every statement list, recursively."""
    body = list_to_seq(_normalize_list(seq_to_list(program.body)))
    return Program(program.name, program.params, body, span=program.span)


def _normalize_list(stmts: list[Stmt]) -> list[Stmt]:
    return strip_trailing_nulls([_normalize_stmt(st) for st in stmts])


def _normalize_stmt(st: Stmt) -> Stmt:
    if isinstance(st, Seq):
        return list_to_seq(_normalize_list(seq_to_list(st)))
    if isinstance(st, (If, Do)):
        commands = tuple(
            dataclasses.replace(
                gc, body=list_to_seq(_normalize_list(seq_to_list(gc.body)))
            )
            for gc in st.commands
        )
        if isinstance(st, If):
            return If(commands, span=st.span)
        return Do(commands, st.annotation, span=st.span)
    return st


@dataclass(frozen=True)
class GuardPathEntry:
    """One enclosing construct on the way to the mutated statement."""

    construct_kind: str  # "if" | "do"
    branch: int
    guard: Pred
    before: tuple[Stmt, ...]
    after: tuple[Stmt, ...]
    shell_u: Stmt
    shell_m: Stmt


@dataclass(frozen=True)
class ModificationTemplate:
    kind: str  # STATEMENT | GUARDED_COMMAND
    original: Program
    mutant: Program
    top_before: tuple[Stmt, ...]
    top_after: tuple[Stmt, ...]
    guard_path: tuple[GuardPathEntry, ...]
    st_u: Stmt
    st_m: Stmt
    st_ju: Optional[Stmt]
    st_jm: Optional[Stmt]
    location: LocationPath

    @property
    def prog_b(self) -> Stmt:
        return list_to_seq(list(self.top_before))

    @property
    def prog_a(self) -> Stmt:
        return list_to_seq(list(self.top_after))

    @property
    def prog_jb(self) -> Stmt:
        parts: list[Stmt] = []
        for entry in self.guard_path:
            parts.extend(entry.before)
        return list_to_seq(parts)

    @property
    def prog_ja(self) -> Stmt:
        parts: list[Stmt] = []
        for entry in reversed(self.guard_path):
            parts.extend(entry.after)
        return list_to_seq(parts)

    @property
    def guards(self) -> tuple[Pred, ...]:
        return tuple(entry.guard for entry in self.guard_path)

    @property
    def mutated_pair(self) -> tuple[Stmt, Stmt]:
        if self.kind == GUARDED_COMMAND:
            assert self.st_ju is not None and self.st_jm is not None
            return self.st_ju, self.st_jm
        return self.st_u, self.st_m


@dataclass(frozen=True)
class ModificationClass:
    row: str
    inner: Optional[str] = None


def _diff_index(o_list: list[Stmt], m_list: list[Stmt]) -> int:
    if len(o_list) != len(m_list):
        raise ShapeMismatchError(
            f"statement counts differ outside the mutated region: "
            f"{len(o_list)} vs {len(m_list)}"
        )
    diffs = [i for i, (a, b) in enumerate(zip(o_list, m_list)) if a != b]
    if not diffs:
        raise NoDifferenceError("programs are structurally equal")
    if len(diffs) > 1:
        raise MultipleDifferencesError(
            f"{len(diffs)} statements differ in one sequence; expected a first-order mutant"
        )
    return diffs[0]


def _descend_branch(o_st: Stmt, m_st: Stmt) -> Optional[int]:
    """Branch index to descend into, or None when this pair is the mutation unit."""
    if type(o_st) is not type(m_st) or not isinstance(o_st, (If, Do)):
        return None
    assert isinstance(m_st, (If, Do))
    if len(o_st.commands) != len(m_st.commands):
        return None
    if isinstance(o_st, Do) and isinstance(m_st, Do):
        if o_st.annotation != m_st.annotation:
            return None
    if any(a.guard != b.guard for a, b in zip(o_st.commands, m_st.commands)):
        # A guard change is a statement modification of the whole construct.
        return None
    diffs = [
        j
        for j, (a, b) in enumerate(zip(o_st.commands, m_st.commands))
        if a.body != b.body
    ]
    if not diffs:
        return None
    if len(diffs) > 1:
        raise MultipleDifferencesError(
            f"{len(diffs)} guarded-command bodies differ in one construct"
        )
    return diffs[0]


def locate_mutation(original: Program, mutant: Program) -> ModificationTemplate:
    """Find the unique minimal differing statement or guarded-command body."""
    if original.name != mutant.name or original.params != mutant.params:
        raise ShapeMismatchError("programs differ in name or parameter list")
    o_prog = normalize_program(original)
    m_prog = normalize_program(mutant)
    o_list = seq_to_list(o_prog.body)
    m_list = seq_to_list(m_prog.body)

    path: list[tuple[str, int]] = []
    levels: list[GuardPathEntry] = []
    top_before: Optional[tuple[Stmt, ...]] = None
    top_after: tuple[Stmt, ...] = ()
    top_pair: Optional[tuple[Stmt, Stmt]] = None

    while True:
        i = _diff_index(o_list, m_list)
        before = tuple(o_list[:i])
        after = tuple(o_list[i + 1 :])
        if top_before is None:
            top_before, top_after = before, after
        else:
            levels[-1] = dataclasses.replace(levels[-1], before=before, after=after)
        path.append(("stmt", i))
        o_st, m_st = o_list[i], m_list[i]
        if top_pair is None:
            top_pair = (o_st, m_st)
        branch = _descend_branch(o_st, m_st)
        if branch is None:
            unit = (o_st, m_st)
            break
        assert isinstance(o_st, (If, Do)) and isinstance(m_st, (If, Do))
        levels.append(
            GuardPathEntry(
                construct_kind="do" if isinstance(o_st, Do) else "if",
                branch=branch,
                guard=o_st.commands[branch].guard,
                before=(),
                after=(),
                shell_u=o_st,
                shell_m=m_st,
            )
        )
        path.append(("branch", branch))
        o_list = seq_to_list(o_st.commands[branch].body)
        m_list = seq_to_list(m_st.commands[branch].body)

    if levels:
        return ModificationTemplate(
            kind=GUARDED_COMMAND,
            original=o_prog,
            mutant=m_prog,
            top_before=top_before,
            top_after=top_after,
            guard_path=tuple(levels),
            st_u=top_pair[0],
            st_m=top_pair[1],
            st_ju=unit[0],
            st_jm=unit[1],
            location=tuple(path),
        )
    return ModificationTemplate(
        kind=STATEMENT,
        original=o_prog,
        mutant=m_prog,
        top_before=top_before,
        top_after=top_after,
        guard_path=(),
        st_u=unit[0],
        st_m=unit[1],
        st_ju=None,
        st_jm=None,
        location=tuple(path),
    )


def reassemble(template: ModificationTemplate, mutated: bool) -> Program:
    """Rebuild a program from the template parts; inverse of locate_mutation."""
    source = template.mutant if mutated else template.original
    if template.kind == STATEMENT:
        mid: Stmt = template.st_m if mutated else template.st_u
    else:
        mid = template.st_jm if mutated else template.st_ju
        assert mid is not None
        for entry in reversed(template.guard_path):
            branch_body = list(entry.before) + [mid] + list(entry.after)
            shell = entry.shell_m if mutated else entry.shell_u
            assert isinstance(shell, (If, Do))
            commands = list(shell.commands)
            commands[entry.branch] = dataclasses.replace(
                commands[entry.branch], body=list_to_seq(branch_body)
            )
            if isinstance(shell, If):
                mid = If(tuple(commands))
            else:
                mid = Do(tuple(commands), shell.annotation)
    body = list(template.top_before) + [mid] + list(template.top_after)
    return Program(source.name, source.params, list_to_seq(body))


_TABLE_ROWS = (
    "expr_mutated",
    "target_mutated",
    "multi_expr_component",
    "multi_target_component",
    "if_guard_mutated",
    "do_guard_mutated",
)


def classify(template: ModificationTemplate) -> ModificationClass:
    """Assign the modification row; guarded-command body changes also carry
    the row of the inner statement pair."""
    if template.kind == STATEMENT:
        return ModificationClass(_classify_pair(template.st_u, template.st_m))
    assert template.st_ju is not None and template.st_jm is not None
    return ModificationClass(
        "body_stmt_mutated", _classify_pair(template.st_ju, template.st_jm)
    )


def _classify_pair(u: Stmt, m: Stmt) -> str:
    if isinstance(u, Assign) and isinstance(m, Assign):
        if len(u.targets) == 1 and len(m.targets) == 1:
            if u.targets == m.targets and u.values != m.values:
                return "expr_mutated"
            if u.values == m.values and u.targets != m.targets:
                return "target_mutated"
        if 1 < len(u.targets) == len(m.targets):
            target_diffs = [
                i for i, (a, b) in enumerate(zip(u.targets, m.targets)) if a != b
            ]
            value_diffs = [
                i for i, (a, b) in enumerate(zip(u.values, m.values)) if a != b
            ]
            if not target_diffs and len(value_diffs) == 1:
                return "multi_expr_component"
            if not value_diffs and len(target_diffs) == 1:
                return "multi_target_component"
    if isinstance(u, If) and isinstance(m, If):
        return "if_guard_mutated"
    if isinstance(u, Do) and isinstance(m, Do):
        return "do_guard_mutated"
    # Outside the recognised rows (for example skip replaced by abort).
    return "statement_replaced"
