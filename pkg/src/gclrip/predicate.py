"""Predicate semantics: states, domains, substitution, evaluation,
rewrite-based simplification, and bounded semantic comparison.

All arithmetic is exact: integers stay ``int`` and division produces
``fractions.Fraction``, so floor-versus-exact-division distinctions survive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Mapping, Optional, Sequence, Union

from .ast import (
    Add,
    And,
    ArrayLength,
    ArrayRead,
    BoolLiteral,
    Cmp,
    Div,
    Expr,
    Floor,
    free_vars,
    Implies,
    IntLiteral,
    Marker,
    MARKER_ANY,
    Mul,
    Neg,
    Not,
    Or,
    Pred,
    Sub,
    Var,
)
from .errors import (
    DivisionByZeroError,
    DomainError,
    DomainTooLargeError,
    IndexOutOfBoundsError,
    MarkerNotGroundError,
    UnboundVariableError,
)

Value = Union[int, Fraction]

DEFAULT_MAX_STATES = 10_000_000
DEFAULT_WITNESS_CAP = 100


def value_to_json(value: Value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return f"{value.numerator}/{value.denominator}"
    return value


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------


class State:
    """A concrete store: scalar rationals plus finite integer arrays.

    Instances are immutable by convention; updates build new states.  The
    canonical ``key()`` makes states hashable and totally ordered within one
    domain, which keeps witness sets deterministic.
    """

    __slots__ = ("scalars", "arrays", "_key")

    def __init__(
        self,
        scalars: Optional[Mapping[str, Value]] = None,
        arrays: Optional[Mapping[str, Sequence[int]]] = None,
    ):
        self.scalars: dict[str, Value] = dict(scalars or {})
        self.arrays: dict[str, tuple[int, ...]] = {
            name: tuple(vals) for name, vals in (arrays or {}).items()
        }
        self._key = None

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                tuple(sorted(self.scalars.items())),
                tuple(sorted(self.arrays.items())),
            )
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        parts = [f"{k}={v}" for k, v in sorted(self.scalars.items())]
        parts += [f"{k}={list(v)}" for k, v in sorted(self.arrays.items())]
        return "State(" + ", ".join(parts) + ")"

    def with_scalar(self, name: str, value: Value) -> "State":
        scalars = dict(self.scalars)
        scalars[name] = value
        return State(scalars, self.arrays)

    def to_json(self):
        obj = {name: value_to_json(v) for name, v in self.scalars.items()}
        obj.update({name: list(vals) for name, vals in self.arrays.items()})
        return dict(sorted(obj.items()))


# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArraySpec:
    len_lo: int
    len_hi: int
    elem_lo: int
    elem_hi: int

    def __post_init__(self) -> None:
        if self.len_lo > self.len_hi or self.elem_lo > self.elem_hi:
            raise DomainError("array spec has lo > hi")
        if self.len_lo < 0:
            raise DomainError("array length cannot be negative")

    def count(self) -> int:
        width = self.elem_hi - self.elem_lo + 1
        return sum(width**n for n in range(self.len_lo, self.len_hi + 1))

    def values(self) -> list[tuple[int, ...]]:
        elems = range(self.elem_lo, self.elem_hi + 1)
        out: list[tuple[int, ...]] = []
        for n in range(self.len_lo, self.len_hi + 1):
            out.extend(itertools.product(elems, repeat=n))
        return out


@dataclass(frozen=True)
class DomainSpec:
    """Per-variable integer ranges and array bounds for exhaustive enumeration."""

    scalar_ranges: tuple[tuple[str, tuple[int, int]], ...]
    array_specs: tuple[tuple[str, ArraySpec], ...] = ()

    @staticmethod
    def make(
        scalars: Optional[Mapping[str, tuple[int, int]]] = None,
        arrays: Optional[Mapping[str, ArraySpec]] = None,
    ) -> "DomainSpec":
        return DomainSpec(
            tuple(sorted((scalars or {}).items())),
            tuple(sorted((arrays or {}).items())),
        )

    def __post_init__(self) -> None:
        for name, (lo, hi) in self.scalar_ranges:
            if lo > hi:
                raise DomainError(f"range for {name!r} has lo > hi")

    @property
    def scalars(self) -> dict[str, tuple[int, int]]:
        return dict(self.scalar_ranges)

    @property
    def arrays(self) -> dict[str, ArraySpec]:
        return dict(self.array_specs)

    def names(self) -> list[str]:
        return sorted([n for n, _ in self.scalar_ranges] + [n for n, _ in self.array_specs])

    def size(self, names: Optional[Sequence[str]] = None) -> int:
        total = 1
        for name in names if names is not None else self.names():
            total *= self._count(name)
        return total

    def _count(self, name: str) -> int:
        scalars = self.scalars
        arrays = self.arrays
        if name in scalars:
            lo, hi = scalars[name]
            return hi - lo + 1
        if name in arrays:
            return arrays[name].count()
        raise DomainError(f"variable {name!r} is not covered by the domain")

    def check_size(
        self, max_states: int = DEFAULT_MAX_STATES, names: Optional[Sequence[str]] = None
    ) -> int:
        size = self.size(names)
        if size > max_states:
            raise DomainTooLargeError(
                f"domain enumerates {size} states, above the cap of {max_states}"
            )
        return size

    def states(self, names: Optional[Sequence[str]] = None) -> Iterator[State]:
        """Enumerate states deterministically: names sorted, values ascending."""
        use = sorted(names) if names is not None else self.names()
        scalars = self.scalars
        arrays = self.arrays
        pools: list[list] = []
        for name in use:
            if name in scalars:
                lo, hi = scalars[name]
                pools.append([(name, False, v) for v in range(lo, hi + 1)])
            elif name in arrays:
                pools.append([(name, True, v) for v in arrays[name].values()])
            else:
                raise DomainError(f"variable {name!r} is not covered by the domain")
        for combo in itertools.product(*pools):
            sc = {name: v for name, is_arr, v in combo if not is_arr}
            ar = {name: v for name, is_arr, v in combo if is_arr}
            yield State(sc, ar)

    def to_json(self):
        return {
            "scalars": {n: [lo, hi] for n, (lo, hi) in self.scalar_ranges},
            "arrays": {
                n: {
                    "len": [s.len_lo, s.len_hi],
                    "elem": [s.elem_lo, s.elem_hi],
                }
                for n, s in self.array_specs
            },
        }


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

MarkerInterp = Callable[[Marker, State], bool]


def eval_expr(expr: Expr, state: State) -> Value:
    if isinstance(expr, IntLiteral):
        return expr.value
    if isinstance(expr, Var):
        try:
            return state.scalars[expr.name]
        except KeyError:
            raise UnboundVariableError(f"variable {expr.name!r} is not bound") from None
    if isinstance(expr, ArrayRead):
        values = _array(state, expr.array)
        index = eval_expr(expr.index, state)
        if isinstance(index, Fraction):
            if index.denominator != 1:
                raise IndexOutOfBoundsError(f"non-integer index {index} into {expr.array!r}")
            index = int(index)
        if index < 0 or index >= len(values):
            raise IndexOutOfBoundsError(
                f"index {index} out of bounds for {expr.array!r} of length {len(values)}"
            )
        return values[index]
    if isinstance(expr, ArrayLength):
        return len(_array(state, expr.array))
    if isinstance(expr, Neg):
        return -eval_expr(expr.operand, state)
    if isinstance(expr, Add):
        return eval_expr(expr.left, state) + eval_expr(expr.right, state)
    if isinstance(expr, Sub):
        return eval_expr(expr.left, state) - eval_expr(expr.right, state)
    if isinstance(expr, Mul):
        return eval_expr(expr.left, state) * eval_expr(expr.right, state)
    if isinstance(expr, Div):
        denominator = eval_expr(expr.right, state)
        if denominator == 0:
            raise DivisionByZeroError("division by zero")
        return Fraction(eval_expr(expr.left, state)) / Fraction(denominator)
    if isinstance(expr, Floor):
        return math.floor(eval_expr(expr.operand, state))
    raise TypeError(f"eval_expr: unexpected node {expr!r}")


def _array(state: State, name: str) -> tuple[int, ...]:
    try:
        return state.arrays[name]
    except KeyError:
        raise UnboundVariableError(f"array {name!r} is not bound") from None


_CMP_FUNCS = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def eval_pred(pred: Pred, state: State, marker_interp: Optional[MarkerInterp] = None) -> bool:
    """Truth value under exact arithmetic.

    Conjunction, disjunction, and implication short-circuit left to right, so
    a guarded array access such as ``i < 1 || b[1] != x`` never evaluates the
    access it protects.
    """
    if isinstance(pred, BoolLiteral):
        return pred.value
    if isinstance(pred, Cmp):
        return _CMP_FUNCS[pred.op](eval_expr(pred.left, state), eval_expr(pred.right, state))
    if isinstance(pred, Not):
        return not eval_pred(pred.operand, state, marker_interp)
    if isinstance(pred, And):
        return eval_pred(pred.left, state, marker_interp) and eval_pred(
            pred.right, state, marker_interp
        )
    if isinstance(pred, Or):
        return eval_pred(pred.left, state, marker_interp) or eval_pred(
            pred.right, state, marker_interp
        )
    if isinstance(pred, Implies):
        return (not eval_pred(pred.left, state, marker_interp)) or eval_pred(
            pred.right, state, marker_interp
        )
    if isinstance(pred, Marker):
        if marker_interp is None:
            raise MarkerNotGroundError(
                f"postcondition symbol {pred.tag!r} has no interpretation"
            )
        return marker_interp(pred, state)
    raise TypeError(f"eval_pred: unexpected node {pred!r}")


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def substitute_expr(expr: Expr, var: str, value: Expr) -> Expr:
    if isinstance(expr, Var):
        return value if expr.name == var else expr
    return _map_expr(expr, lambda e: substitute_expr(e, var, value))


def substitute_expr_parallel(expr: Expr, mapping: Mapping[str, Expr]) -> Expr:
    if isinstance(expr, Var):
        return mapping.get(expr.name, expr)
    return _map_expr(expr, lambda e: substitute_expr_parallel(e, mapping))


def _map_expr(expr: Expr, f: Callable[[Expr], Expr]) -> Expr:
    if isinstance(expr, (IntLiteral, ArrayLength, Var)):
        return expr
    if isinstance(expr, ArrayRead):
        return ArrayRead(expr.array, f(expr.index))
    if isinstance(expr, Neg):
        return Neg(f(expr.operand))
    if isinstance(expr, Floor):
        return Floor(f(expr.operand))
    if isinstance(expr, Add):
        return Add(f(expr.left), f(expr.right))
    if isinstance(expr, Sub):
        return Sub(f(expr.left), f(expr.right))
    if isinstance(expr, Mul):
        return Mul(f(expr.left), f(expr.right))
    if isinstance(expr, Div):
        return Div(f(expr.left), f(expr.right))
    raise TypeError(f"substitute: unexpected expression {expr!r}")


def substitute(pred: Pred, var: str, value: Expr) -> Pred:
    """Replace free occurrences of ``var``; markers record the pair instead."""
    return substitute_parallel(pred, {var: value})


def substitute_parallel(pred: Pred, mapping: Mapping[str, Expr]) -> Pred:
    """Simultaneous substitution: all targets are replaced in one pass.

    Marker nodes append to their pending list.  When a target also occurs
    free in one of the replacement expressions, the appended pairs route
    through fresh ``$p``-names so the sequential pending-list semantics still
    realises a simultaneous substitution.
    """
    if not mapping:
        return pred
    if isinstance(pred, BoolLiteral):
        return pred
    if isinstance(pred, Cmp):
        return Cmp(
            pred.op,
            substitute_expr_parallel(pred.left, mapping),
            substitute_expr_parallel(pred.right, mapping),
        )
    if isinstance(pred, Not):
        return Not(substitute_parallel(pred.operand, mapping))
    if isinstance(pred, And):
        return And(
            substitute_parallel(pred.left, mapping),
            substitute_parallel(pred.right, mapping),
        )
    if isinstance(pred, Or):
        return Or(
            substitute_parallel(pred.left, mapping),
            substitute_parallel(pred.right, mapping),
        )
    if isinstance(pred, Implies):
        return Implies(
            substitute_parallel(pred.left, mapping),
            substitute_parallel(pred.right, mapping),
        )
    if isinstance(pred, Marker):
        return Marker(pred.tag, pred.substitutions + _chain_pairs(mapping))
    raise TypeError(f"substitute: unexpected predicate {pred!r}")


def _chain_pairs(mapping: Mapping[str, Expr]) -> tuple[tuple[str, Expr], ...]:
    if len(mapping) == 1:
        return tuple(mapping.items())
    value_vars: set[str] = set()
    for expr in mapping.values():
        value_vars |= free_vars(expr)
    items = sorted(mapping.items())
    if not (set(mapping) & value_vars):
        return tuple(items)
    detours = tuple((var, Var(f"$p{i}")) for i, (var, _) in enumerate(items))
    landings = tuple((f"$p{i}", expr) for i, (_, expr) in enumerate(items))
    return detours + landings


def marker_image(marker: Marker, var: str) -> Expr:
    """The expression a marker's pending substitutions send ``var`` to."""
    expr: Expr = Var(var)
    for name, value in marker.substitutions:
        expr = substitute_expr(expr, name, value)
    return expr


# ---------------------------------------------------------------------------
# Simplification
# ---------------------------------------------------------------------------

_NEGATED_OP = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}

_SIMPLIFY_ROUNDS = 1000


def simplify(pred: Pred) -> Pred:
    """Rewrite to a logically equivalent, usually smaller predicate.

    Rules: boolean-constant absorption, double negation, negation pushed
    through and/or and over comparisons, complement collapse (p && !p, p || !p
    for syntactic complements), ground-comparison folding, and idempotence.
    Implications are simplified inside but never expanded.
    """
    current = pred
    for _ in range(_SIMPLIFY_ROUNDS):
        reduced = _simp(current)
        if reduced == current:
            return reduced
        current = reduced
    return current


def _simp(pred: Pred) -> Pred:
    if isinstance(pred, (BoolLiteral, Marker)):
        return pred
    if isinstance(pred, Cmp):
        return _fold_ground(pred)
    if isinstance(pred, Not):
        return _push_not(_simp(pred.operand))
    if isinstance(pred, And):
        return _and(_simp(pred.left), _simp(pred.right))
    if isinstance(pred, Or):
        return _or(_simp(pred.left), _simp(pred.right))
    if isinstance(pred, Implies):
        return Implies(_simp(pred.left), _simp(pred.right))
    raise TypeError(f"simplify: unexpected node {pred!r}")


def _fold_ground(cmp: Cmp) -> Pred:
    if free_vars(cmp):
        return cmp
    try:
        return BoolLiteral(eval_pred(cmp, State()))
    except Exception:
        return cmp


def _push_not(pred: Pred) -> Pred:
    if isinstance(pred, BoolLiteral):
        return BoolLiteral(not pred.value)
    if isinstance(pred, Cmp):
        return _fold_ground(Cmp(_NEGATED_OP[pred.op], pred.left, pred.right))
    if isinstance(pred, Not):
        return pred.operand
    if isinstance(pred, And):
        return _or(_push_not(pred.left), _push_not(pred.right))
    if isinstance(pred, Or):
        return _and(_push_not(pred.left), _push_not(pred.right))
    return Not(pred)


def _and(left: Pred, right: Pred) -> Pred:
    if isinstance(left, BoolLiteral):
        return right if left.value else BoolLiteral(False)
    if isinstance(right, BoolLiteral):
        return left if right.value else BoolLiteral(False)
    if left == right:
        return left
    if _complementary(left, right):
        return BoolLiteral(False)
    return And(left, right)


def _or(left: Pred, right: Pred) -> Pred:
    if isinstance(left, BoolLiteral):
        return BoolLiteral(True) if left.value else right
    if isinstance(right, BoolLiteral):
        return BoolLiteral(True) if right.value else left
    if left == right:
        return left
    if _complementary(left, right):
        return BoolLiteral(True)
    return Or(left, right)


def _complementary(left: Pred, right: Pred) -> bool:
    neg = _negation_of(left)
    if neg is not None and neg == right:
        return True
    neg = _negation_of(right)
    return neg is not None and neg == left


def _negation_of(pred: Pred) -> Optional[Pred]:
    if isinstance(pred, BoolLiteral):
        return BoolLiteral(not pred.value)
    if isinstance(pred, Cmp):
        return Cmp(_NEGATED_OP[pred.op], pred.left, pred.right)
    if isinstance(pred, Not):
        return pred.operand
    if isinstance(pred, And):
        left = _negation_of(pred.left)
        right = _negation_of(pred.right)
        if left is None or right is None:
            return None
        return Or(left, right)
    if isinstance(pred, Or):
        left = _negation_of(pred.left)
        right = _negation_of(pred.right)
        if left is None or right is None:
            return None
        return And(left, right)
    return None


# ---------------------------------------------------------------------------
# Bounded semantic comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonResult:
    verdict: str  # "equivalent_on_domain" | "differ"
    witnesses: tuple[State, ...]
    domain: DomainSpec

    @property
    def equivalent(self) -> bool:
        return self.verdict == "equivalent_on_domain"


def _collect_markers(pred: Pred, acc: list[Marker]) -> None:
    if isinstance(pred, Marker):
        acc.append(pred)
    elif isinstance(pred, Not):
        _collect_markers(pred.operand, acc)
    elif isinstance(pred, (And, Or, Implies)):
        _collect_markers(pred.left, acc)
        _collect_markers(pred.right, acc)


def bounded_compare(
    p1: Pred,
    p2: Pred,
    domain: DomainSpec,
    projection: Optional[Sequence[str]] = None,
    assume: Optional[Pred] = None,
    max_states: int = DEFAULT_MAX_STATES,
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> ComparisonResult:
    """Exhaustively compare two predicates over a finite domain.

    Opaque postcondition symbols are discharged by the projection policy: a
    marker occurrence is summarised by the tuple of values its pending
    substitutions assign to the projection variables, and distinct tuples are
    treated as independent booleans.  Two predicates differ at a state when
    some assignment to those booleans gives them different truth values.
    """
    markers: list[Marker] = []
    _collect_markers(p1, markers)
    _collect_markers(p2, markers)
    if markers and projection is None:
        raise MarkerNotGroundError(
            "comparison of predicates with postcondition symbols needs a projection"
        )
    proj = tuple(projection) if projection is not None else ()
    needed = (free_vars(p1) | free_vars(p2)) - {MARKER_ANY}
    if assume is not None:
        needed |= free_vars(assume) - {MARKER_ANY}
    for marker in markers:
        for var in proj:
            needed |= free_vars(marker_image(marker, var))
    missing = sorted(needed - set(domain.names()))
    if missing:
        raise DomainError(f"domain does not cover: {', '.join(missing)}")

    domain.check_size(max_states)

    def marker_key(marker: Marker, state: State) -> tuple:
        return (marker.tag,) + tuple(
            eval_expr(marker_image(marker, var), state) for var in proj
        )

    witnesses: list[State] = []
    differ = False
    for state in domain.states():
        if assume is not None and not eval_pred(assume, state):
            continue
        if not markers:
            if eval_pred(p1, state) != eval_pred(p2, state):
                differ = True
                if len(witnesses) < witness_cap:
                    witnesses.append(state)
        else:
            keys = sorted(
                {marker_key(m, state) for m in markers}
            )
            if len(keys) > 16:
                raise DomainTooLargeError(
                    f"{len(keys)} distinct marker instances at one state"
                )
            found = False
            for bits in itertools.product((False, True), repeat=len(keys)):
                env = dict(zip(keys, bits))

                def interp(marker: Marker, st: State, _env=env) -> bool:
                    return _env[marker_key(marker, st)]

                if eval_pred(p1, state, interp) != eval_pred(p2, state, interp):
                    found = True
                    break
            if found:
                differ = True
                if len(witnesses) < witness_cap:
                    witnesses.append(state)
    verdict = "differ" if differ else "equivalent_on_domain"
    return ComparisonResult(verdict, tuple(witnesses), domain)
