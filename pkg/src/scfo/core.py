"""Cards, literals, templates, rotations and necklaces.

Conventions used throughout the package:

* a club encodes 0 and a heart encodes 1; the text form uses ``C`` and ``H``;
* clubs sort before hearts, so the canonical rotation of a word is its
  lexicographically least rotation in the ``C < H`` order;
* variables are numbered from 0 and an assignment ``(a0, a1, ...)`` indexes a
  truth table big-endian, variable 0 being the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence


class StructuralError(ValueError):
    """Malformed input: wrong lengths, out-of-range indices, bad characters."""


class Symbol(IntEnum):
    CLUB = 0
    HEART = 1

    @property
    def letter(self) -> str:
        return "C" if self is Symbol.CLUB else "H"

    @classmethod
    def from_letter(cls, ch: str) -> "Symbol":
        if ch == "C":
            return cls.CLUB
        if ch == "H":
            return cls.HEART
        raise StructuralError(f"not a card letter: {ch!r}")


def symbol_of_bit(b: int) -> Symbol:
    if b not in (0, 1):
        raise StructuralError(f"not a bit: {b!r}")
    return Symbol(b)


def bit_of_symbol(s: Symbol) -> int:
    return int(s)


# -- words -------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Word:
    """A row of cards, leftmost first."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(Symbol(s) for s in self.symbols))

    @classmethod
    def parse(cls, text: str) -> "Word":
        return cls(tuple(Symbol.from_letter(ch) for ch in text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Word":
        return cls(tuple(symbol_of_bit(b) for b in bits))

    def __str__(self) -> str:
        return "".join(s.letter for s in self.symbols)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[Symbol]:
        return iter(self.symbols)

    def __getitem__(self, i: int) -> Symbol:
        return self.symbols[i]

    def swapped(self) -> "Word":
        """Exchange clubs and hearts."""
        return Word(tuple(Symbol(1 - s) for s in self.symbols))

    def to_int(self) -> int:
        """Pack into an integer, first card in the most significant bit."""
        v = 0
        for s in self.symbols:
            v = (v << 1) | int(s)
        return v

    @classmethod
    def from_int(cls, value: int, m: int) -> "Word":
        return cls(tuple(Symbol((value >> (m - 1 - i)) & 1) for i in range(m)))


def rotate(w: Word, k: int) -> Word:
    """Cyclic left shift: ``rotate(w, k)[i] == w[(i + k) % m]``."""
    m = len(w)
    if m == 0:
        return w
    k %= m
    return Word(w.symbols[k:] + w.symbols[:k])


def least_rotation(seq: Sequence) -> int:
    """Start index of the lexicographically least rotation of ``seq``.

    Linear-time two-pointer minimum-expression algorithm; works for any
    sequence of mutually comparable items.
    """
    m = len(seq)
    i, j, k = 0, 1, 0
    while i < m and j < m and k < m:
        a = seq[(i + k) % m]
        b = seq[(j + k) % m]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    return min(i, j) if m else 0


def smallest_period(seq: Sequence) -> int:
    """Smallest p > 0 such that rotating ``seq`` by p leaves it unchanged."""
    m = len(seq)
    if m == 0:
        return 1
    # KMP failure function; the border gives the period when it divides m
    fail = [0] * m
    k = 0
    for i in range(1, m):
        while k and seq[i] != seq[k]:
            k = fail[k - 1]
        if seq[i] == seq[k]:
            k += 1
        fail[i] = k
    p = m - fail[-1]
    return p if m % p == 0 else m


@dataclass(frozen=True, order=True)
class Necklace:
    representative: Word
    period: int

    def __str__(self) -> str:
        return str(self.representative)

    def __len__(self) -> int:
        return len(self.representative)

    def rotations(self) -> list[Word]:
        """The distinct rotations of the representative, in shift order."""
        return [rotate(self.representative, k) for k in range(self.period)]


def canonical(w: Word) -> Necklace:
    start = least_rotation(w.symbols)
    rep = rotate(w, start)
    return Necklace(rep, smallest_period(rep.symbols))


def open_distribution(w: Word) -> list[tuple[Word, Fraction]]:
    """Exact law of the opened row after a uniform random cut of ``w``.

    Counts every one of the m shifts, so it does not rely on the necklace
    machinery. Sorted by word.
    """
    m = len(w)
    if m == 0:
        return [(w, Fraction(1))]
    counts: dict[Word, int] = {}
    for k in range(m):
        r = rotate(w, k)
        counts[r] = counts.get(r, 0) + 1
    return sorted((r, Fraction(c, m)) for r, c in counts.items())


@lru_cache(maxsize=None)
def canonical_table(m: int) -> tuple[int, ...]:
    """Packed-word lookup: ``table[v]`` is the packed canonical rotation of v.

    Used in the search hot loop; m is capped at 16 to keep the table small.
    """
    if not 0 <= m <= 16:
        raise StructuralError(f"canonical table supports 0 <= m <= 16, got {m}")
    mask = (1 << m) - 1
    table = [0] * (1 << m)
    for v in range(1 << m):
        if table[v]:
            continue
        # collect the orbit, then store its minimum for every member
        orbit = []
        r = v
        for _ in range(max(m, 1)):
            orbit.append(r)
            r = ((r << 1) | (r >> (m - 1))) & mask if m else r
        lo = min(orbit)
        for r in orbit:
            table[r] = lo
    return tuple(table)


# -- literals and templates --------------------------------------------------


@dataclass(frozen=True)
class Literal:
    """One card position: ``pos``/``neg`` of a variable, or a constant card."""

    kind: str
    value: int

    def __post_init__(self):
        if self.kind not in ("pos", "neg", "const"):
            raise StructuralError(f"unknown literal kind {self.kind!r}")
        if self.kind == "const" and self.value not in (0, 1):
            raise StructuralError(f"constant must be a bit, got {self.value!r}")
        if self.kind != "const" and self.value < 0:
            raise StructuralError(f"negative variable index {self.value}")

    @property
    def code(self) -> int:
        """Total order: const 0 < const 1 < x0 < !x0 < x1 < !x1 < ..."""
        if self.kind == "const":
            return self.value
        return 2 + 2 * self.value + (self.kind == "neg")

    @classmethod
    def from_code(cls, code: int) -> "Literal":
        if code < 2:
            return cls("const", code)
        var, neg = divmod(code - 2, 2)
        return cls("neg" if neg else "pos", var)

    @property
    def var(self) -> int | None:
        return None if self.kind == "const" else self.value

    def complement(self) -> "Literal":
        if self.kind == "const":
            return Literal("const", 1 - self.value)
        return Literal("neg" if self.kind == "pos" else "pos", self.value)

    def __lt__(self, other: "Literal") -> bool:
        return self.code < other.code

    def __repr__(self) -> str:
        if self.kind == "const":
            return f"Const({self.value})"
        return f"{'Pos' if self.kind == 'pos' else 'Neg'}({self.value})"


def pos(i: int) -> Literal:
    return Literal("pos", i)


def neg(i: int) -> Literal:
    return Literal("neg", i)


def const(b: int) -> Literal:
    return Literal("const", b)


Assignment = tuple[int, ...]


def parse_assignment(text: str) -> Assignment:
    if not text or any(ch not in "01" for ch in text):
        raise StructuralError(f"assignment must be a non-empty bit string, got {text!r}")
    return tuple(int(ch) for ch in text)


def format_assignment(a: Sequence[int]) -> str:
    return "".join(str(b) for b in a)


def all_assignments(n: int) -> list[Assignment]:
    """All 2^n assignments in big-endian order (row i is the binary of i)."""
    return [tuple((i >> (n - 1 - k)) & 1 for k in range(n)) for i in range(1 << n)]


def eval_literal(lit: Literal, a: Sequence[int]) -> int:
    if lit.kind == "const":
        return lit.value
    if lit.value >= len(a):
        raise StructuralError(f"variable {lit.value} out of range for assignment of length {len(a)}")
    b = a[lit.value]
    return b if lit.kind == "pos" else 1 - b


@dataclass(frozen=True)
class Template:
    n: int
    literals: tuple[Literal, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        if self.n < 0:
            raise StructuralError("variable count must be non-negative")
        if not self.literals:
            raise StructuralError("a template needs at least one card")
        for lit in self.literals:
            if lit.var is not None and lit.var >= self.n:
                raise StructuralError(f"literal {lit!r} refers past n={self.n}")

    def __len__(self) -> int:
        return len(self.literals)

    @property
    def m(self) -> int:
        return len(self.literals)

    @property
    def codes(self) -> tuple[int, ...]:
        return tuple(lit.code for lit in self.literals)

    @classmethod
    def from_codes(cls, n: int, codes: Iterable[int]) -> "Template":
        return cls(n, tuple(Literal.from_code(c) for c in codes))

    def constant_count(self) -> int:
        return sum(lit.kind == "const" for lit in self.literals)


def instantiate(t: Template, a: Sequence[int]) -> Word:
    if len(a) != t.n:
        raise StructuralError(f"assignment length {len(a)} != template arity {t.n}")
    return Word.from_bits(eval_literal(lit, a) for lit in t.literals)


def rotate_template(t: Template, k: int) -> Template:
    k %= t.m
    return Template(t.n, t.literals[k:] + t.literals[:k])


def complement_template(t: Template) -> Template:
    return Template(t.n, tuple(lit.complement() for lit in t.literals))


# -- Boolean functions -------------------------------------------------------


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table over n variables, row i being the big-endian assignment i."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(self.table))
        if self.n < 0:
            raise StructuralError("variable count must be non-negative")
        if len(self.table) != 1 << self.n:
            raise StructuralError(f"truth table needs {1 << self.n} rows, got {len(self.table)}")
        if any(b not in (0, 1) for b in self.table):
            raise StructuralError("truth table entries must be bits")

    @classmethod
    def from_callable(cls, n: int, fn: Callable[..., int]) -> "BooleanFunction":
        return cls(n, tuple(int(bool(fn(*a))) for a in all_assignments(n)))

    @classmethod
    def from_index(cls, n: int, index: int) -> "BooleanFunction":
        """Inverse of :attr:`index`: row 0 is the most significant bit."""
        rows = 1 << n
        if not 0 <= index < 1 << rows:
            raise StructuralError(f"truth-table id {index} out of range for n={n}")
        return cls(n, tuple((index >> (rows - 1 - i)) & 1 for i in range(rows)))

    @property
    def index(self) -> int:
        v = 0
        for b in self.table:
            v = (v << 1) | b
        return v

    def to_hex(self) -> str:
        digits = max(1, (1 << self.n) // 4)
        return format(self.index, f"0{digits}x")

    @classmethod
    def from_hex(cls, n: int, text: str) -> "BooleanFunction":
        t = text[2:] if text.lower().startswith("0x") else text
        try:
            value = int(t, 16)
        except ValueError:
            raise StructuralError(f"not a hex truth table: {text!r}") from None
        return cls.from_index(n, value)

    def is_constant(self) -> bool:
        return len(set(self.table)) == 1


def eval_function(f: BooleanFunction, a: Sequence[int]) -> int:
    if len(a) != f.n:
        raise StructuralError(f"assignment length {len(a)} != function arity {f.n}")
    i = 0
    for b in a:
        if b not in (0, 1):
            raise StructuralError(f"not a bit: {b!r}")
        i = (i << 1) | b
    return f.table[i]


def restrict_function(f: BooleanFunction, var: int, b: int) -> BooleanFunction:
    """Fix variable ``var`` to ``b``; the remaining variables keep their order."""
    if not 0 <= var < f.n:
        raise StructuralError(f"variable {var} out of range for n={f.n}")
    table = []
    for a in all_assignments(f.n - 1):
        full = a[:var] + (b,) + a[var:]
        table.append(eval_function(f, full))
    return BooleanFunction(f.n - 1, tuple(table))
