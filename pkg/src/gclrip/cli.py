"""Command-line front end.

Subcommands: parse, wp, rc, diff, rip, oracle, validate.  Exit codes: 0 on
success, 1 when the analysis itself reports a failure (for example the
symbolic/semantic cross-check of ``validate`` disagreeing, or a program pair
that is not a first-order mutant), 2 on usage or parse errors.  All commands
run offline on local files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .ast import Program, list_to_seq, seq_to_list, validate
from .errors import (
    DomainError,
    DomainTooLargeError,
    GclError,
    GclSyntaxError,
    MissingAnnotationError,
    MultipleDifferencesError,
    NoDifferenceError,
    ShapeMismatchError,
)
from .mutation import GUARDED_COMMAND, ModificationTemplate, classify, locate_mutation
from .oracle import DEFAULT_FUEL, kill_analysis
from .parser import format_pred, format_stmt, parse_predicate, parse_program, pretty_print
from .predicate import DEFAULT_MAX_STATES, ArraySpec, DomainSpec
from .rc import rc
from .rip import full_test_spec
from .wp import format_derivation, wp

USAGE_ERROR = 2
FINDING = 1
OK = 0


# ---------------------------------------------------------------------------
# Option parsing helpers
# ---------------------------------------------------------------------------


def _parse_range(text: str) -> tuple[int, int]:
    lo_text, sep, hi_text = text.partition("..")
    if not sep:
        raise ValueError(f"expected lo..hi, got {text!r}")
    return int(lo_text), int(hi_text)


def parse_domain_option(domain_text: Optional[str], array_texts: list[str]) -> DomainSpec:
    """Build a domain from ``a=-3..3,b=0..5`` plus ``b=len:1..2,elem:0..5``."""
    scalars: dict[str, tuple[int, int]] = {}
    arrays: dict[str, ArraySpec] = {}
    if domain_text:
        for item in domain_text.split(","):
            item = item.strip()
            if not item:
                continue
            name, sep, rng = item.partition("=")
            if not sep:
                raise DomainError(f"bad domain entry {item!r}; expected name=lo..hi")
            try:
                scalars[name.strip()] = _parse_range(rng.strip())
            except ValueError as err:
                raise DomainError(f"bad domain entry {item!r}: {err}") from None
    for text in array_texts:
        name, sep, spec_text = text.partition("=")
        if not sep:
            raise DomainError(f"bad array entry {text!r}; expected name=len:lo..hi,elem:lo..hi")
        parts = dict(
            part.strip().split(":", 1) for part in spec_text.split(",") if part.strip()
        )
        try:
            len_lo, len_hi = _parse_range(parts["len"])
            elem_lo, elem_hi = _parse_range(parts["elem"])
        except (KeyError, ValueError) as err:
            raise DomainError(f"bad array entry {text!r}: {err}") from None
        arrays[name.strip()] = ArraySpec(len_lo, len_hi, elem_lo, elem_hi)
    return DomainSpec.make(scalars, arrays)


def _load_config(path: str) -> dict[str, list[str] | str]:
    values: dict[str, list[str] | str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise DomainError(f"bad config line {raw!r}; expected key=value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key == "array":
            existing = values.setdefault("array", [])
            assert isinstance(existing, list)
            existing.extend(v.strip() for v in value.split(";") if v.strip())
        else:
            values[key] = value
    return values


def _read_program(path: str) -> Program:
    text = Path(path).read_text(encoding="utf-8")
    return parse_program(text)


def _emit_json(obj) -> None:
    print(json.dumps(obj, sort_keys=True, indent=2))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _cmd_parse(args) -> int:
    program = _read_program(args.file)
    diagnostics = validate(program)
    if args.format == "json":
        _emit_json(
            {
                "name": program.name,
                "params": list(program.params),
                "pretty": pretty_print(program),
                "diagnostics": [
                    {"severity": d.severity, "message": d.message, "span": str(d.span or "")}
                    for d in diagnostics
                ],
            }
        )
    else:
        print(pretty_print(program), end="")
        for d in diagnostics:
            print(str(d), file=sys.stderr)
    if any(d.severity == "error" for d in diagnostics):
        return FINDING
    return OK


def _cmd_wp(args) -> int:
    program = _read_program(args.file)
    post = parse_predicate(args.post)
    result = wp(program.body, post, unroll_bound=args.unroll, program_name=program.name)
    if args.format == "json":
        _emit_json(
            {
                "wp": format_pred(result.predicate),
                "post": format_pred(post),
                "unroll_bound": args.unroll,
                "derivation": [
                    {
                        "rule": step.rule,
                        "post": format_pred(step.before),
                        "result": format_pred(step.after),
                    }
                    for step in result.derivation
                ],
            }
        )
    else:
        print(f"wp: {format_pred(result.predicate)}")
        print("derivation:")
        print(format_derivation(result.derivation))
    return OK


def _cmd_rc(args) -> int:
    program = _read_program(args.file)
    stmts = seq_to_list(program.body)
    if args.upto is not None:
        stmts = [
            st for st in stmts if st.span is not None and st.span.end_line <= args.upto
        ]
        if not stmts:
            print(f"no top-level statement ends at or before line {args.upto}", file=sys.stderr)
            return USAGE_ERROR
    result = rc(list_to_seq(stmts))
    if args.format == "json":
        _emit_json(
            {
                "rc": format_pred(result.predicate),
                "loop_policy_used": result.loop_policy_used,
            }
        )
    else:
        print(f"rc: {format_pred(result.predicate)}")
        print(f"loop policy: {result.loop_policy_used}")
    return OK


def _format_template(template: ModificationTemplate) -> str:
    lines = [f"kind: {template.kind}"]

    def block(label: str, stmt) -> None:
        lines.append(f"{label}:")
        lines.append(format_stmt(stmt, indent=1))

    block("prog_b", template.prog_b)
    block("st_u", template.st_u)
    block("st_m", template.st_m)
    if template.kind == GUARDED_COMMAND:
        for depth, entry in enumerate(template.guard_path):
            lines.append(
                f"guard[{depth}] ({entry.construct_kind}, branch {entry.branch}): "
                f"{format_pred(entry.guard)}"
            )
        block("prog_jb", template.prog_jb)
        block("st_ju", template.st_ju)
        block("st_jm", template.st_jm)
        block("prog_ja", template.prog_ja)
    block("prog_a", template.prog_a)
    row = classify(template)
    lines.append(f"classification: {row.row}" + (f" ({row.inner})" if row.inner else ""))
    return "\n".join(lines)


def _cmd_diff(args) -> int:
    original = _read_program(args.original)
    mutant = _read_program(args.mutant)
    template = locate_mutation(original, mutant)
    if args.format == "json":
        row = classify(template)
        _emit_json(
            {
                "kind": template.kind,
                "prog_b": format_stmt(template.prog_b),
                "st_u": format_stmt(template.st_u),
                "st_m": format_stmt(template.st_m),
                "prog_a": format_stmt(template.prog_a),
                "guards": [format_pred(g) for g in template.guards],
                "row": row.row,
                "inner_row": row.inner,
            }
        )
    else:
        print(_format_template(template))
    return OK


def _require_domain(args) -> DomainSpec:
    domain = parse_domain_option(args.domain, args.array or [])
    if not domain.names():
        raise DomainError("this command needs --domain (and --array for array inputs)")
    return domain


def _cmd_rip(args) -> int:
    original = _read_program(args.original)
    mutant = _read_program(args.mutant)
    template = locate_mutation(original, mutant)
    domain = _require_domain(args)
    report = full_test_spec(
        template,
        domain,
        unroll_bound=args.unroll,
        fuel=args.fuel,
        max_states=args.max_states,
    )
    if args.format == "json":
        _emit_json(report.to_json())
    else:
        print(f"classification: {report.classification}")
        print(f"reachability: {format_pred(report.reachability)}")
        symbolic = report.infection.symbolic
        print(
            "infection (symbolic): "
            + (format_pred(symbolic) if symbolic is not None else "-")
        )
        print(f"infection witnesses: {len(report.infection.semantic_witnesses)}")
        print(f"propagation wp_u: {format_pred(report.propagation.wp_u)}")
        print(f"propagation wp_m: {format_pred(report.propagation.wp_m)}")
        print(f"propagation witnesses: {len(report.propagation.semantic)}")
        print(f"full test specification: {len(report.full_spec_bounded)} input(s)")
        for state in report.full_spec_bounded:
            print(f"  {state!r}")
        for note in report.notes:
            print(f"note: {note}")
    return OK


def _cmd_oracle(args) -> int:
    original = _read_program(args.original)
    mutant = _read_program(args.mutant)
    template = locate_mutation(original, mutant)
    domain = _require_domain(args)
    report = kill_analysis(
        original,
        mutant,
        template.location,
        domain,
        fuel=args.fuel,
        max_states=args.max_states,
    )
    if args.format == "json":
        _emit_json(report.to_json())
    else:
        print(f"enumerated: {report.total_enumerated}")
        print(f"reached: {len(report.reached)}")
        print(f"weakly killed: {len(report.weak_kill)}")
        print(f"strongly killed: {len(report.strong_kill)}")
        if report.fuel_exhausted:
            print(f"fuel exhausted (excluded): {report.fuel_exhausted}")
    return OK


def _cmd_validate(args) -> int:
    original = _read_program(args.original)
    mutant = _read_program(args.mutant)
    template = locate_mutation(original, mutant)
    domain = _require_domain(args)
    report = full_test_spec(
        template,
        domain,
        unroll_bound=args.unroll,
        fuel=args.fuel,
        max_states=args.max_states,
    )
    full_spec = set(report.full_spec_bounded)
    strong = set(report.kill_report.strong_kill)
    if full_spec == strong:
        print(
            f"ok: full test specification and oracle strong-kill set agree "
            f"on {len(strong)} input(s)"
        )
        return OK
    print("disagreement between full test specification and oracle strong-kill set:")
    for state in sorted(full_spec - strong, key=lambda s: s.key()):
        print(f"  only in full spec: {state!r}")
    for state in sorted(strong - full_spec, key=lambda s: s.key()):
        print(f"  only in oracle:    {state!r}")
    return FINDING


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser, domain: bool = False) -> None:
    sub.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_argument("--config", help="key=value file with the same keys as the flags")
    if domain:
        sub.add_argument("--domain", help="scalar ranges, e.g. a=-3..3,b=0..5")
        sub.add_argument(
            "--array",
            action="append",
            help="array bounds, e.g. b=len:1..2,elem:0..5 (repeatable)",
        )
        sub.add_argument("--unroll", type=int, default=1)
        sub.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
        sub.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gclrip",
        description=(
            "Reachability/Infection/Propagation analysis of guarded-command "
            "program mutants, with a bounded-exhaustive killing oracle."
        ),
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("parse", help="parse a program and print its canonical form")
    p.add_argument("file")
    _add_common(p)
    p.set_defaults(func=_cmd_parse)

    p = subs.add_parser("wp", help="weakest precondition of a program body")
    p.add_argument("file")
    p.add_argument("--post", required=True, help="postcondition predicate; 'A' is opaque")
    p.add_argument("--unroll", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=_cmd_wp)

    p = subs.add_parser("rc", help="reachability condition of a statement prefix")
    p.add_argument("file")
    p.add_argument("--upto", type=int, help="prefix ends at this source line")
    _add_common(p)
    p.set_defaults(func=_cmd_rc)

    p = subs.add_parser("diff", help="decompose an original/mutant pair")
    p.add_argument("original")
    p.add_argument("mutant")
    _add_common(p)
    p.set_defaults(func=_cmd_diff)

    p = subs.add_parser("rip", help="full RIP analysis of a mutant")
    p.add_argument("original")
    p.add_argument("mutant")
    _add_common(p, domain=True)
    p.set_defaults(func=_cmd_rip)

    p = subs.add_parser("oracle", help="bounded-exhaustive kill analysis")
    p.add_argument("original")
    p.add_argument("mutant")
    _add_common(p, domain=True)
    p.set_defaults(func=_cmd_oracle)

    p = subs.add_parser(
        "validate", help="cross-check the RIP analysis against the kill oracle"
    )
    p.add_argument("original")
    p.add_argument("mutant")
    _add_common(p, domain=True)
    p.set_defaults(func=_cmd_validate)

    return parser


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    values = _load_config(args.config)
    for key, value in values.items():
        if not hasattr(args, key):
            raise DomainError(f"config key {key!r} does not match any flag")
        current = getattr(args, key)
        if key == "array":
            if current in (None, []):
                setattr(args, key, list(value))
        elif current in (None,) or _is_default(args, key, current):
            if key in ("unroll", "fuel", "max_states", "upto"):
                setattr(args, key, int(value))
            else:
                setattr(args, key, value)


_DEFAULTS = {
    "format": "text",
    "unroll": 1,
    "fuel": DEFAULT_FUEL,
    "max_states": DEFAULT_MAX_STATES,
}


def _is_default(args: argparse.Namespace, key: str, current) -> bool:
    return key in _DEFAULTS and current == _DEFAULTS[key]


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0, None) else OK
    try:
        _apply_config(args)
        return args.func(args)
    except GclSyntaxError as err:
        print(str(err), file=sys.stderr)
        return USAGE_ERROR
    except FileNotFoundError as err:
        print(f"file not found: {err.filename}", file=sys.stderr)
        return USAGE_ERROR
    except (DomainError, DomainTooLargeError, MissingAnnotationError) as err:
        print(str(err), file=sys.stderr)
        return USAGE_ERROR
    except (NoDifferenceError, MultipleDifferencesError, ShapeMismatchError) as err:
        print(str(err), file=sys.stderr)
        return FINDING
    except GclError as err:
        print(str(err), file=sys.stderr)
        return FINDING


if __name__ == "__main__":
    sys.exit(main())
