from pathlib import Path

import pytest

import gclrip as g

CORPUS_DIR = Path(__file__).parent / "corpus"

CORPUS_NAMES = [
    "min",
    "min_m1",
    "min_m2",
    "iseven",
    "iseven_m",
    "chkdig",
    "chkdig_m1",
    "chkdig_m2",
    "search",
    "search_m",
]

#: (original, mutant, domain) for every corpus pair; domains are sized for
#: fast exhaustive runs in property tests.
CORPUS_PAIRS = [
    ("min", "min_m1", g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})),
    ("min", "min_m2", g.DomainSpec.make({"a": (-3, 3), "b": (-3, 3)})),
    ("iseven", "iseven_m", g.DomainSpec.make({"a": (-6, 6)})),
    ("chkdig", "chkdig_m1", g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})),
    ("chkdig", "chkdig_m2", g.DomainSpec.make({"a": (0, 24), "b": (0, 11)})),
    (
        "search",
        "search_m",
        g.DomainSpec.make({"x": (0, 3)}, {"b": g.ArraySpec(1, 2, 0, 3)}),
    ),
]


def corpus_path(name: str) -> Path:
    return CORPUS_DIR / f"{name}.gcl"


def load_program(name: str) -> g.Program:
    return g.parse_program(corpus_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus() -> dict[str, g.Program]:
    return {name: load_program(name) for name in CORPUS_NAMES}
