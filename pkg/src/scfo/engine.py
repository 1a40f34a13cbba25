"""Protocol objects, the random-cut simulator and exact verification."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .core import (
    Assignment,
    BooleanFunction,
    Literal,
    Necklace,
    StructuralError,
    Template,
    Word,
    all_assignments,
    canonical,
    eval_function,
    format_assignment,
    instantiate,
    open_distribution,
    rotate,
)


class ProtocolError(Exception):
    """Base class for failures of a template/function pair or a decode."""


class NonConstantClass(ProtocolError):
    """Two inputs with the same output open to different necklaces."""

    def __init__(self, pairs: list[tuple[Assignment, Assignment]]):
        self.pairs = pairs
        shown = ", ".join(f"{format_assignment(a)}/{format_assignment(b)}" for a, b in pairs[:4])
        super().__init__(f"output class spans several necklaces: {shown}")


class IndistinguishableClasses(ProtocolError):
    """The 0-inputs and 1-inputs open to the same necklace."""

    def __init__(self, necklace: Necklace):
        self.necklace = necklace
        super().__init__(f"both outputs open to the necklace {necklace}")


class UnknownClass(ProtocolError):
    def __init__(self, word: Word):
        self.word = word
        super().__init__(f"opened word {word} matches no output class")


@dataclass(frozen=True)
class OutputRule:
    entries: tuple[tuple[Necklace, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e[1])))
        if not 1 <= len(self.entries) <= 2:
            raise StructuralError("an output rule has one or two entries")
        bits = [b for _, b in self.entries]
        necks = [nk for nk, _ in self.entries]
        if len(set(bits)) != len(bits) or any(b not in (0, 1) for b in bits):
            raise StructuralError("output bits must be distinct bits")
        if len(set(necks)) != len(necks):
            raise StructuralError("output classes must be distinct necklaces")
        if len({len(nk) for nk in necks}) != 1:
            raise StructuralError("output classes must share one length")

    @classmethod
    def from_words(cls, words: Mapping[int, Word | str]) -> "OutputRule":
        """Build from any rotation of each class word."""
        entries = []
        for bit, w in words.items():
            if isinstance(w, str):
                w = Word.parse(w)
            entries.append((canonical(w), bit))
        return cls(tuple(entries))

    @property
    def m(self) -> int:
        return len(self.entries[0][0])

    def necklace_for(self, bit: int) -> Necklace | None:
        for nk, b in self.entries:
            if b == bit:
                return nk
        return None

    def lookup(self, nk: Necklace) -> int | None:
        for other, b in self.entries:
            if other == nk:
                return b
        return None

    def swapped(self) -> "OutputRule":
        return OutputRule(tuple((nk, 1 - b) for nk, b in self.entries))


@dataclass(frozen=True)
class Protocol:
    name: str
    template: Template
    rule: OutputRule

    def __post_init__(self):
        if self.rule.m != self.template.m:
            raise StructuralError(
                f"rule necklaces have length {self.rule.m}, template has {self.template.m} cards"
            )

    @property
    def n(self) -> int:
        return self.template.n

    @property
    def m(self) -> int:
        return self.template.m


def _classes(t: Template, f: BooleanFunction) -> dict[int, dict[Necklace, list[Assignment]]]:
    if t.n != f.n:
        raise StructuralError(f"template arity {t.n} != function arity {f.n}")
    classes: dict[int, dict[Necklace, list[Assignment]]] = {}
    for a in all_assignments(f.n):
        nk = canonical(instantiate(t, a))
        classes.setdefault(eval_function(f, a), {}).setdefault(nk, []).append(a)
    return classes


def _class_pairs(groups: dict[Necklace, list[Assignment]]) -> list[tuple[Assignment, Assignment]]:
    """One witness pair for every two necklaces sharing an output."""
    reps = [members[0] for members in groups.values()]
    return list(combinations(reps, 2))


def derive_output_rule(t: Template, f: BooleanFunction) -> OutputRule:
    """The rule of the protocol ``t`` would need to compute ``f``.

    Each class is first represented by the necklace of its lowest input; if
    the two representatives coincide the classes are indistinguishable.
    Only then is every class checked for a single necklace.
    """
    classes = _classes(t, f)
    entries = tuple((next(iter(groups)), bit) for bit, groups in sorted(classes.items()))
    if len(entries) == 2 and entries[0][0] == entries[1][0]:
        raise IndistinguishableClasses(entries[0][0])
    pairs = []
    for bit in sorted(classes):
        pairs.extend(_class_pairs(classes[bit]))
    if pairs:
        raise NonConstantClass(pairs)
    return OutputRule(entries)


def decode(opened: Word, rule: OutputRule) -> int:
    if len(opened) != rule.m:
        raise StructuralError(f"opened word has {len(opened)} cards, rule expects {rule.m}")
    bit = rule.lookup(canonical(opened))
    if bit is None:
        raise UnknownClass(opened)
    return bit


def apply_random_cut(w: Word, rng: random.Random) -> tuple[int, Word]:
    """Draw one uniform shift from ``rng`` and apply it."""
    shift = rng.randrange(len(w))
    return shift, rotate(w, shift)


@dataclass(frozen=True)
class Trace:
    assignment: Assignment
    hidden_word: Word
    shift: int
    opened_word: Word
    decoded: int


def run(p: Protocol, a: Sequence[int], rng: random.Random) -> Trace:
    a = tuple(a)
    hidden = instantiate(p.template, a)
    shift, opened = apply_random_cut(hidden, rng)
    return Trace(a, hidden, shift, opened, decode(opened, p.rule))


@dataclass(frozen=True)
class ReportRow:
    assignment: Assignment
    word: Word
    necklace: Necklace
    expected: int
    decoded: int | None


@dataclass
class VerificationReport:
    protocol: Protocol
    function: BooleanFunction
    rows: list[ReportRow]
    correct: bool
    secure: bool
    failure_reasons: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.correct and self.secure

    @property
    def constants(self) -> int:
        return self.protocol.template.constant_count()


def verify(p: Protocol, f: BooleanFunction) -> VerificationReport:
    """Check every input exhaustively; failures are collected, not raised."""
    if p.n != f.n:
        raise StructuralError(f"protocol arity {p.n} != function arity {f.n}")
    rows = []
    reasons = []
    for a in all_assignments(f.n):
        w = instantiate(p.template, a)
        nk = canonical(w)
        expected = eval_function(f, a)
        decoded = p.rule.lookup(nk)
        rows.append(ReportRow(a, w, nk, expected, decoded))
        if decoded is None:
            reasons.append(f"input {format_assignment(a)}: opened class {nk} is not in the rule")
        elif decoded != expected:
            reasons.append(f"input {format_assignment(a)}: decodes to {decoded}, expected {expected}")

    by_bit: dict[int, dict[Necklace, list[Assignment]]] = {}
    for r in rows:
        by_bit.setdefault(r.expected, {}).setdefault(r.necklace, []).append(r.assignment)
    secure = True
    for bit in sorted(by_bit):
        for a, b in _class_pairs(by_bit[bit]):
            secure = False
            reasons.append(
                f"output {bit}: inputs {format_assignment(a)} and {format_assignment(b)} "
                f"open to different necklaces"
            )
    shared = set(by_bit.get(0, {})) & set(by_bit.get(1, {}))
    for nk in sorted(shared):
        reasons.append(f"necklace {nk} occurs for both outputs")

    correct = all(r.decoded == r.expected for r in rows) and not shared
    return VerificationReport(p, f, rows, correct, secure, reasons)


def security_by_distribution(p: Protocol, f: BooleanFunction) -> bool:
    """Security via exact opened-row distributions, without necklaces."""
    if p.n != f.n:
        raise StructuralError(f"protocol arity {p.n} != function arity {f.n}")
    seen: dict[int, list[tuple[Word, Fraction]]] = {}
    for a in all_assignments(f.n):
        dist = open_distribution(instantiate(p.template, a))
        bit = eval_function(f, a)
        if bit not in seen:
            seen[bit] = dist
        elif seen[bit] != dist:
            return False
    return True


def restrict_template(t: Template, var: int, b: int) -> Template:
    if not 0 <= var < t.n:
        raise StructuralError(f"variable {var} out of range for n={t.n}")
    if b not in (0, 1):
        raise StructuralError(f"not a bit: {b!r}")
    out = []
    for lit in t.literals:
        if lit.var is None:
            out.append(lit)
        elif lit.var == var:
            out.append(Literal("const", b if lit.kind == "pos" else 1 - b))
        elif lit.var > var:
            out.append(Literal(lit.kind, lit.var - 1))
        else:
            out.append(lit)
    return Template(t.n - 1, tuple(out))


def restrict(p: Protocol, var: int, b: int, name: str | None = None) -> Protocol:
    return Protocol(name or f"{p.name}-fix{var}-{b}", restrict_template(p.template, var, b), p.rule)


def render_table(p: Protocol, f: BooleanFunction) -> list[str]:
    """Rows ``bits | f | word`` in big-endian input order."""
    if p.n != f.n:
        raise StructuralError(f"protocol arity {p.n} != function arity {f.n}")
    return [
        f"{format_assignment(a)} | {eval_function(f, a)} | {instantiate(p.template, a)}"
        for a in all_assignments(f.n)
    ]


def check_template(t: Template, f: BooleanFunction, name: str = "candidate") -> Protocol | None:
    try:
        rule = derive_output_rule(t, f)
    except ProtocolError:
        return None
    return Protocol(name, t, rule)


def reachable_words(p: Protocol) -> Iterable[Word]:
    for a in all_assignments(p.n):
        w = instantiate(p.template, a)
        for k in range(p.m):
            yield rotate(w, k)
