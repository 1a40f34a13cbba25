"""The ``.scfo`` protocol description format.

A document looks like::

    # Protocol 1: three-input XOR
    protocol protocol1
    vars x y z
    template x y !x z x !y !x !z
    output 0: CCHCCHHH
    output 1: HHCHHCCC
    function xor3

Lines must appear in that order; the second ``output`` line and the
``function`` line are optional.  Output words may be any rotation of the
class; they are stored (and serialized) as canonical representatives.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import BooleanFunction, Literal, StructuralError, Template, Word, canonical
from .engine import OutputRule, Protocol
from .fixtures import FUNCTIONS

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*\Z")
WORD_RE = re.compile(r"[CH]+\Z")
HEX_RE = re.compile(r"(0[xX])?[0-9A-Fa-f]+\Z")
DEFAULT_NAMES = ("x", "y", "z", "w")


class DslError(Exception):
    """A positioned parse failure; ``code`` identifies the kind."""

    code = "error"

    def __init__(self, line: int, column: int, message: str, expected: str | None = None):
        self.line = line
        self.column = column
        self.message = message
        self.expected = expected
        super().__init__(f"{line}:{column}: {self.code}: {message}")

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "line": self.line,
            "column": self.column,
            "message": self.message,
            "expected": self.expected,
        }


class DslSyntaxError(DslError):
    code = "syntax"


class UnknownVariable(DslError):
    code = "unknown-variable"


class DuplicateVariable(DslError):
    code = "duplicate-variable"


class WordLengthError(DslError):
    code = "word-length"


class DuplicateOutput(DslError):
    code = "duplicate-output"


class InvalidRule(DslError):
    code = "invalid-rule"


class UnknownFunction(DslError):
    code = "unknown-function"


class FunctionArity(DslError):
    code = "function-arity"


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[list[Token]]:
    """Split into non-empty lines of tokens; ``:`` is always its own token."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        toks = []
        for m in re.finditer(r":|[^\s:]+", body):
            toks.append(Token(m.group(), lineno, m.start() + 1))
        if toks:
            lines.append(toks)
    return lines


@dataclass
class ParsedDocument:
    protocol: Protocol
    variables: tuple[str, ...]
    function: BooleanFunction | None = None
    function_spec: str | None = None


class _Parser:
    def __init__(self, text: str):
        self.lines = tokenize(text)
        self.pos = 0
        raw = text.splitlines()
        self.eof = (max(len(raw), 1), len(raw[-1]) + 1 if raw else 1)

    def _eof_error(self, expected: str) -> DslSyntaxError:
        return DslSyntaxError(*self.eof, f"unexpected end of input, expected {expected}", expected)

    def peek_keyword(self) -> str | None:
        if self.pos < len(self.lines):
            return self.lines[self.pos][0].text
        return None

    def take_line(self, keyword: str) -> list[Token]:
        if self.pos >= len(self.lines):
            raise self._eof_error(f"'{keyword}'")
        toks = self.lines[self.pos]
        if toks[0].text != keyword:
            t = toks[0]
            raise DslSyntaxError(t.line, t.column, f"expected '{keyword}', found {t.text!r}", f"'{keyword}'")
        self.pos += 1
        return toks

    @staticmethod
    def after(tok: Token) -> tuple[int, int]:
        return tok.line, tok.column + len(tok.text)

    def parse(self) -> ParsedDocument:
        head = self.take_line("protocol")
        name = self.single_name(head, "protocol name")

        vtoks = self.take_line("vars")
        if len(vtoks) < 2:
            raise DslSyntaxError(*self.after(vtoks[0]), "expected at least one variable name", "NAME")
        variables: list[str] = []
        for t in vtoks[1:]:
            if not NAME_RE.match(t.text):
                raise DslSyntaxError(t.line, t.column, f"bad variable name {t.text!r}", "NAME")
            if t.text in variables:
                raise DuplicateVariable(t.line, t.column, f"variable {t.text!r} declared twice")
            variables.append(t.text)
        index = {v: i for i, v in enumerate(variables)}

        ttoks = self.take_line("template")
        if len(ttoks) < 2:
            raise DslSyntaxError(*self.after(ttoks[0]), "expected at least one literal", "literal")
        literals = [self.literal(t, index) for t in ttoks[1:]]
        template = Template(len(variables), tuple(literals))

        classes: dict[int, Word] = {}
        class_toks: list[Token] = []
        while self.peek_keyword() == "output" or not classes:
            otoks = self.take_line("output")
            bit, word, wtok = self.output_line(otoks, template.m)
            if bit in classes:
                raise DuplicateOutput(otoks[1].line, otoks[1].column, f"output {bit} given twice")
            classes[bit] = word
            class_toks.append(wtok)
            if len(classes) == 2:
                break
        if len(classes) == 2 and canonical(classes[0]) == canonical(classes[1]):
            t = class_toks[1]
            raise InvalidRule(t.line, t.column, "both outputs name the same cyclic class")

        function = spec = None
        if self.peek_keyword() == "function":
            ftoks = self.take_line("function")
            spec = self.single_name(ftoks, "function name or hex table", allow_hex=True)
            function = self.function(ftoks[1], len(variables))

        if self.pos < len(self.lines):
            t = self.lines[self.pos][0]
            expected = "'output' or 'function'" if len(classes) < 2 and spec is None else (
                "'function'" if spec is None else "end of input"
            )
            raise DslSyntaxError(t.line, t.column, f"unexpected {t.text!r}", expected)

        protocol = Protocol(name, template, OutputRule.from_words(classes))
        return ParsedDocument(protocol, tuple(variables), function, spec)

    def single_name(self, toks: list[Token], what: str, allow_hex: bool = False) -> str:
        if len(toks) < 2:
            raise DslSyntaxError(*self.after(toks[0]), f"expected {what}", what)
        t = toks[1]
        if not (NAME_RE.match(t.text) or (allow_hex and HEX_RE.match(t.text))):
            raise DslSyntaxError(t.line, t.column, f"bad {what} {t.text!r}", what)
        if len(toks) > 2:
            extra = toks[2]
            raise DslSyntaxError(extra.line, extra.column, f"unexpected {extra.text!r}", "end of line")
        return t.text

    @staticmethod
    def literal(t: Token, index: dict[str, int]) -> Literal:
        if t.text in ("0", "1"):
            return Literal("const", int(t.text))
        negated = t.text.startswith("!")
        name = t.text[1:] if negated else t.text
        if not NAME_RE.match(name):
            raise DslSyntaxError(t.line, t.column, f"bad literal {t.text!r}", "literal")
        if name not in index:
            raise UnknownVariable(t.line, t.column, f"unknown variable {name!r}")
        return Literal("neg" if negated else "pos", index[name])

    def output_line(self, toks: list[Token], m: int) -> tuple[int, Word, Token]:
        def need(i: int, what: str) -> Token:
            if len(toks) <= i:
                raise DslSyntaxError(*self.after(toks[-1]), f"expected {what}", what)
            return toks[i]

        bit_tok = need(1, "bit")
        if bit_tok.text not in ("0", "1"):
            raise DslSyntaxError(bit_tok.line, bit_tok.column, f"expected 0 or 1, found {bit_tok.text!r}", "bit")
        colon = need(2, "':'")
        if colon.text != ":":
            raise DslSyntaxError(colon.line, colon.column, f"expected ':', found {colon.text!r}", "':'")
        word_tok = need(3, "word")
        if not WORD_RE.match(word_tok.text):
            raise DslSyntaxError(
                word_tok.line, word_tok.column, f"class word must use C and H, found {word_tok.text!r}", "word"
            )
        if len(toks) > 4:
            t = toks[4]
            raise DslSyntaxError(t.line, t.column, f"unexpected {t.text!r}", "end of line")
        if len(word_tok.text) != m:
            raise WordLengthError(
                word_tok.line, word_tok.column, f"class word has {len(word_tok.text)} cards, template has {m}"
            )
        return int(bit_tok.text), Word.parse(word_tok.text), word_tok

    @staticmethod
    def function(t: Token, n: int) -> BooleanFunction:
        if t.text in FUNCTIONS:
            f = FUNCTIONS[t.text]
            if f.n != n:
                raise FunctionArity(t.line, t.column, f"{t.text} takes {f.n} variables, document declares {n}")
            return f
        if not HEX_RE.match(t.text):
            raise UnknownFunction(t.line, t.column, f"unknown function {t.text!r}")
        try:
            return BooleanFunction.from_hex(n, t.text)
        except StructuralError as exc:
            raise FunctionArity(t.line, t.column, str(exc)) from None


def parse_document(text: str) -> ParsedDocument:
    return _Parser(text).parse()


def parse_protocol(text: str) -> tuple[Protocol, BooleanFunction | None]:
    doc = parse_document(text)
    return doc.protocol, doc.function


# -- serialization -----------------------------------------------------------


def variable_names(n: int) -> tuple[str, ...]:
    if n <= len(DEFAULT_NAMES):
        return DEFAULT_NAMES[:n]
    return tuple(f"x{i}" for i in range(n))


def format_literal(lit: Literal, names: tuple[str, ...]) -> str:
    if lit.kind == "const":
        return str(lit.value)
    return ("!" if lit.kind == "neg" else "") + names[lit.value]


def format_template(t: Template, names: tuple[str, ...] | None = None) -> str:
    names = names or variable_names(t.n)
    return " ".join(format_literal(lit, names) for lit in t.literals)


def function_spec(f: BooleanFunction) -> str:
    """Built-in name when one matches, else the hex truth table."""
    for name, g in FUNCTIONS.items():
        if g == f:
            return name
    return f.to_hex()


def serialize_protocol(p: Protocol, function: BooleanFunction | None = None) -> str:
    names = variable_names(p.n)
    if not p.n:
        raise StructuralError("the document format needs at least one variable")
    lines = [
        f"protocol {p.name}",
        "vars " + " ".join(names),
        "template " + format_template(p.template, names),
    ]
    for nk, bit in p.rule.entries:
        lines.append(f"output {bit}: {nk.representative}")
    if function is not None:
        if function.n != p.n:
            raise StructuralError("function arity differs from the protocol's")
        lines.append(f"function {function_spec(function)}")
    return "\n".join(lines) + "\n"
