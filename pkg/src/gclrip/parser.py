"""Concrete ASCII syntax: parser and canonical pretty printer.

Surface grammar::

    program  := "program" IDENT "(" params? ")" "{" stmts "}"
    stmts    := stmt (";" stmt)* ";"?
    stmt     := idlist ":=" exprlist | "skip" | "null" | "abort"
              | "return" ("(" expr ")")?
              | "if" gcs "fi" | "do" annotation? gcs "od"
    gcs      := gc ("[]" gc)*
    gc       := pred "->" stmts
    annotation := "@invariant" pred "@variant" expr "@modifies" idlist

Predicates use !, &&, ||, => and the comparisons = != < <= > >=; expressions
use unary -, * /, + -, floor(e), a[e], a.length and integer literals.  "#"
starts a line comment.  A bare identifier in predicate position denotes an
opaque postcondition symbol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    Abort,
    Add,
    And,
    ArrayLength,
    ArrayRead,
    Assign,
    BoolLiteral,
    Cmp,
    Div,
    Do,
    Expr,
    Floor,
    GuardedCommand,
    If,
    Implies,
    IntLiteral,
    list_to_seq,
    LoopAnnotation,
    Marker,
    Mul,
    Neg,
    Not,
    Null,
    Or,
    Pred,
    Program,
    Return,
    Seq,
    Skip,
    Span,
    Stmt,
    Sub,
    Var,
)
from .errors import GclSyntaxError

KEYWORDS = {
    "program",
    "skip",
    "null",
    "abort",
    "return",
    "if",
    "fi",
    "do",
    "od",
    "true",
    "false",
    "floor",
    "length",
}

ANNOTATION_WORDS = {"@invariant", "@variant", "@modifies"}

_TWO_CHAR = (":=", "->", "=>", ">=", "<=", "!=", "&&", "||", "[]")
_ONE_CHAR = "(){}[];,.=<>!+-*/"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | keyword/symbol text | "eof"
    text: str
    line: int
    col: int

    @property
    def span(self) -> Span:
        return Span(self.line, self.col, self.line, self.col + max(len(self.text), 1) - 1)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == "@":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word not in ANNOTATION_WORDS:
                raise GclSyntaxError(
                    f"unknown annotation {word!r}", Span(line, col, line, col)
                )
            tokens.append(Token(word, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        pair = text[i : i + 2]
        if pair in _TWO_CHAR:
            tokens.append(Token(pair, pair, start_line, start_col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        raise GclSyntaxError(f"unexpected character {ch!r}", Span(line, col, line, col))
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token plumbing -----------------------------------------------------

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def at(self, kind: str) -> bool:
        return self.cur.kind == kind

    def advance(self) -> Token:
        tok = self.cur
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        if not self.at(kind):
            self.fail(f"expected {kind!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def fail(self, message: str) -> None:
        raise GclSyntaxError(message, self.cur.span)

    def save(self) -> int:
        return self.pos

    def restore(self, mark: int) -> None:
        self.pos = mark

    # -- entry points -------------------------------------------------------

    def parse_program(self) -> Program:
        start = self.cur
        self.expect("program")
        name = self.expect("ident").text
        self.expect("(")
        params: list[str] = []
        if self.at("ident"):
            params.append(self.advance().text)
            while self.at(","):
                self.advance()
                params.append(self.expect("ident").text)
        self.expect(")")
        self.expect("{")
        body = self.parse_stmts(stop={"}"})
        end = self.expect("}")
        self.expect("eof")
        return Program(
            name,
            tuple(params),
            body,
            span=Span(start.line, start.col, end.line, end.col),
        )

    def parse_predicate_only(self) -> Pred:
        pred = self.parse_pred()
        self.expect("eof")
        return pred

    # -- statements ---------------------------------------------------------

    def parse_stmts(self, stop: set[str]) -> Stmt:
        stmts = [self.parse_stmt(stop)]
        while self.at(";"):
            self.advance()
            if self.cur.kind in stop:  # trailing semicolon
                break
            stmts.append(self.parse_stmt(stop))
        return list_to_seq(stmts)

    def parse_stmt(self, stop: set[str]) -> Stmt:
        tok = self.cur
        if self.at("skip"):
            self.advance()
            return Skip(span=tok.span)
        if self.at("null"):
            self.advance()
            return Null(span=tok.span)
        if self.at("abort"):
            self.advance()
            return Abort(span=tok.span)
        if self.at("return"):
            self.advance()
            value = None
            end = tok
            if self.at("("):
                self.advance()
                value = self.parse_expr()
                end = self.expect(")")
            return Return(value, span=Span(tok.line, tok.col, end.line, end.col))
        if self.at("if"):
            self.advance()
            gcs = self.parse_guarded_commands(terminator="fi")
            end = self.expect("fi")
            return If(tuple(gcs), span=Span(tok.line, tok.col, end.line, end.col))
        if self.at("do"):
            self.advance()
            annotation = None
            if self.at("@invariant"):
                annotation = self.parse_annotation()
            gcs = self.parse_guarded_commands(terminator="od")
            end = self.expect("od")
            return Do(
                tuple(gcs),
                annotation,
                span=Span(tok.line, tok.col, end.line, end.col),
            )
        if self.at("ident"):
            targets = [self.advance().text]
            while self.at(","):
                self.advance()
                targets.append(self.expect("ident").text)
            self.expect(":=")
            values = [self.parse_expr()]
            while self.at(","):
                self.advance()
                values.append(self.parse_expr())
            end_span = values[-1].span or tok.span
            return Assign(
                tuple(targets),
                tuple(values),
                span=Span(tok.line, tok.col, end_span.end_line, end_span.end_col),
            )
        self.fail(f"expected a statement, found {tok.text or 'end of input'!r}")
        raise AssertionError  # unreachable

    def parse_annotation(self) -> LoopAnnotation:
        start = self.expect("@invariant")
        invariant = self.parse_pred()
        self.expect("@variant")
        variant = self.parse_expr()
        self.expect("@modifies")
        modified = [self.expect("ident").text]
        while self.at(","):
            self.advance()
            modified.append(self.expect("ident").text)
        return LoopAnnotation(invariant, variant, tuple(modified), span=start.span)

    def parse_guarded_commands(self, terminator: str) -> list[GuardedCommand]:
        stop = {terminator, "[]", "}"}
        gcs = [self.parse_guarded_command(stop)]
        while self.at("[]"):
            self.advance()
            gcs.append(self.parse_guarded_command(stop))
        return gcs

    def parse_guarded_command(self, stop: set[str]) -> GuardedCommand:
        start = self.cur
        guard = self.parse_pred()
        if self.at(":="):
            self.fail("a guard cannot contain ':='")
        self.expect("->")
        body = self.parse_stmts(stop)
        return GuardedCommand(guard, body, span=start.span)

    # -- predicates ---------------------------------------------------------

    def parse_pred(self) -> Pred:
        return self.parse_implies()

    def parse_implies(self) -> Pred:
        left = self.parse_or()
        if self.at("=>"):
            self.advance()
            right = self.parse_implies()  # right associative
            return Implies(left, right, span=left.span)
        return left

    def parse_or(self) -> Pred:
        left = self.parse_and()
        while self.at("||"):
            self.advance()
            right = self.parse_and()
            left = Or(left, right, span=left.span)
        return left

    def parse_and(self) -> Pred:
        left = self.parse_not()
        while self.at("&&"):
            self.advance()
            right = self.parse_not()
            left = And(left, right, span=left.span)
        return left

    def parse_not(self) -> Pred:
        if self.at("!"):
            tok = self.advance()
            operand = self.parse_not()
            return Not(operand, span=tok.span)
        return self.parse_pred_atom()

    def parse_pred_atom(self) -> Pred:
        tok = self.cur
        if self.at("true"):
            self.advance()
            return BoolLiteral(True, span=tok.span)
        if self.at("false"):
            self.advance()
            return BoolLiteral(False, span=tok.span)
        # Try a comparison first: its left side may itself start with "(".
        mark = self.save()
        try:
            left = self.parse_expr()
        except GclSyntaxError:
            self.restore(mark)
            left = None
        if left is not None:
            if self.cur.kind in ("=", "!=", "<", "<=", ">", ">="):
                op = self.advance().kind
                right = self.parse_expr()
                return Cmp(op, left, right, span=tok.span)
            if isinstance(left, Var):
                # A bare identifier in predicate position is an opaque
                # postcondition symbol.
                return Marker(left.name, span=tok.span)
            self.restore(mark)
        if self.at("("):
            self.advance()
            inner = self.parse_pred()
            self.expect(")")
            return inner
        self.fail(f"expected a predicate, found {tok.text or 'end of input'!r}")
        raise AssertionError  # unreachable

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.cur.kind in ("+", "-"):
            op = self.advance().kind
            right = self.parse_term()
            cls = Add if op == "+" else Sub
            left = cls(left, right, span=left.span)
        return left

    def parse_term(self) -> Expr:
        left = self.parse_factor()
        while self.cur.kind in ("*", "/"):
            op = self.advance().kind
            right = self.parse_factor()
            cls = Mul if op == "*" else Div
            left = cls(left, right, span=left.span)
        return left

    def parse_factor(self) -> Expr:
        if self.at("-"):
            tok = self.advance()
            operand = self.parse_factor()
            return Neg(operand, span=tok.span)
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.cur
        if self.at("int"):
            self.advance()
            return IntLiteral(int(tok.text), span=tok.span)
        if self.at("floor"):
            self.advance()
            self.expect("(")
            inner = self.parse_expr()
            end = self.expect(")")
            return Floor(inner, span=Span(tok.line, tok.col, end.line, end.col))
        if self.at("ident"):
            self.advance()
            name = tok.text
            if self.at("["):
                self.advance()
                index = self.parse_expr()
                end = self.expect("]")
                return ArrayRead(
                    name, index, span=Span(tok.line, tok.col, end.line, end.col)
                )
            if self.at("."):
                self.advance()
                self.expect("length")
                return ArrayLength(name, span=tok.span)
            return Var(name, span=tok.span)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        self.fail(f"expected an expression, found {tok.text or 'end of input'!r}")
        raise AssertionError  # unreachable


def parse_program(text: str) -> Program:
    return _Parser(text).parse_program()


def parse_predicate(text: str) -> Pred:
    return _Parser(text).parse_predicate_only()


def parse_expression(text: str) -> Expr:
    parser = _Parser(text)
    expr = parser.parse_expr()
    parser.expect("eof")
    return expr


# ---------------------------------------------------------------------------
# Pretty printing
# ---------------------------------------------------------------------------

_EXPR_PREC = {"add": 1, "mul": 2, "unary": 3, "atom": 4}


def format_expr(expr: Expr, parent_prec: int = 0) -> str:
    if isinstance(expr, IntLiteral):
        return str(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, ArrayRead):
        return f"{expr.array}[{format_expr(expr.index)}]"
    if isinstance(expr, ArrayLength):
        return f"{expr.array}.length"
    if isinstance(expr, Floor):
        return f"floor({format_expr(expr.operand)})"
    if isinstance(expr, Neg):
        text = f"-{format_expr(expr.operand, _EXPR_PREC['unary'])}"
        return f"({text})" if parent_prec > _EXPR_PREC["unary"] else text
    if isinstance(expr, (Add, Sub)):
        op = "+" if isinstance(expr, Add) else "-"
        prec = _EXPR_PREC["add"]
    elif isinstance(expr, (Mul, Div)):
        op = "*" if isinstance(expr, Mul) else "/"
        prec = _EXPR_PREC["mul"]
    else:
        raise TypeError(f"format_expr: unexpected node {expr!r}")
    # Left associative: the right operand needs parentheses at equal precedence.
    text = f"{format_expr(expr.left, prec)} {op} {format_expr(expr.right, prec + 1)}"
    if parent_prec > prec:
        return f"({text})"
    return text


_PRED_PREC = {"implies": 1, "or": 2, "and": 3, "not": 4, "atom": 5}


def format_pred(pred: Pred, parent_prec: int = 0) -> str:
    if isinstance(pred, BoolLiteral):
        return "true" if pred.value else "false"
    if isinstance(pred, Cmp):
        return f"{format_expr(pred.left)} {pred.op} {format_expr(pred.right)}"
    if isinstance(pred, Marker):
        subs = "".join(
            f"[{var}\\{format_expr(expr)}]" for var, expr in pred.substitutions
        )
        return pred.tag + subs
    if isinstance(pred, Not):
        inner = format_pred(pred.operand, _PRED_PREC["not"])
        text = f"!{inner}"
        return f"({text})" if parent_prec > _PRED_PREC["not"] else text
    if isinstance(pred, And):
        prec = _PRED_PREC["and"]
        text = f"{format_pred(pred.left, prec)} && {format_pred(pred.right, prec + 1)}"
    elif isinstance(pred, Or):
        prec = _PRED_PREC["or"]
        text = f"{format_pred(pred.left, prec)} || {format_pred(pred.right, prec + 1)}"
    elif isinstance(pred, Implies):
        prec = _PRED_PREC["implies"]
        # Right associative: the right side keeps the same precedence.
        text = f"{format_pred(pred.left, prec + 1)} => {format_pred(pred.right, prec)}"
    else:
        raise TypeError(f"format_pred: unexpected node {pred!r}")
    if parent_prec > prec:
        return f"({text})"
    return text


def _format_stmt_lines(stmt: Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(stmt, Assign):
        targets = ", ".join(stmt.targets)
        values = ", ".join(format_expr(v) for v in stmt.values)
        return [f"{pad}{targets} := {values}"]
    if isinstance(stmt, Skip):
        return [f"{pad}skip"]
    if isinstance(stmt, Null):
        return [f"{pad}null"]
    if isinstance(stmt, Abort):
        return [f"{pad}abort"]
    if isinstance(stmt, Return):
        if stmt.value is None:
            return [f"{pad}return"]
        return [f"{pad}return ({format_expr(stmt.value)})"]
    if isinstance(stmt, Seq):
        return _format_seq_lines(stmt, indent)
    if isinstance(stmt, (If, Do)):
        opener = "if" if isinstance(stmt, If) else "do"
        closer = "fi" if isinstance(stmt, If) else "od"
        lines = [f"{pad}{opener}"]
        if isinstance(stmt, Do) and stmt.annotation is not None:
            ann = stmt.annotation
            lines.append(f"{pad}  @invariant {format_pred(ann.invariant)}")
            lines.append(f"{pad}  @variant {format_expr(ann.variant)}")
            lines.append(f"{pad}  @modifies {', '.join(ann.modified)}")
        for i, gc in enumerate(stmt.commands):
            sep = "  " if i == 0 else "[]"
            lines.append(f"{pad}{sep} {format_pred(gc.guard)} ->")
            lines.extend(_format_seq_lines(gc.body, indent + 2))
        lines.append(f"{pad}{closer}")
        return lines
    raise TypeError(f"format_stmt: unexpected node {stmt!r}")


def _format_seq_lines(stmt: Stmt, indent: int) -> list[str]:
    from .ast import seq_to_list

    lines: list[str] = []
    stmts = seq_to_list(stmt)
    for i, st in enumerate(stmts):
        chunk = _format_stmt_lines(st, indent)
        if i < len(stmts) - 1:
            chunk[-1] += ";"
        lines.extend(chunk)
    return lines


def format_stmt(stmt: Stmt, indent: int = 0) -> str:
    return "\n".join(_format_seq_lines(stmt, indent))


def pretty_print(program: Program) -> str:
    """Canonical text of a program; re-parses to a structurally equal AST."""
    header = f"program {program.name}({', '.join(program.params)}) {{"
    body = _format_seq_lines(program.body, 1)
    return "\n".join([header, *body, "}"]) + "\n"
