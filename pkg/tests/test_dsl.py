import random
from pathlib import Path

import pytest

from oracles import necklace
from scfo.core import Template, const, pos
from scfo.dsl import (
    DslError,
    DslSyntaxError,
    DuplicateOutput,
    DuplicateVariable,
    FunctionArity,
    InvalidRule,
    UnknownFunction,
    UnknownVariable,
    WordLengthError,
    parse_document,
    parse_protocol,
    serialize_protocol,
    tokenize,
)
from scfo.engine import OutputRule, Protocol
from scfo.fixtures import FUNCTIONS, all_fixtures, five_card_trick, protocol1, xor3

DOCS = Path(__file__).resolve().parent.parent / "protocols"

PROTOCOL1_DOC = """\
protocol protocol1
vars x y z
template x y !x z x !y !x !z
output 0: CCHCCHHH
output 1: HHCHHCCC
function xor3
"""


def test_parse_protocol1():
    p, f = parse_protocol(PROTOCOL1_DOC)
    assert p == protocol1()
    assert f == xor3


def test_parse_five_card_trick_constant():
    p, _ = parse_protocol((DOCS / "five-card-trick.scfo").read_text())
    assert p.template.literals[2] == const(1)
    assert p == five_card_trick()


def test_fixture_documents_parse_to_fixtures():
    for p, f in all_fixtures():
        q, g = parse_protocol((DOCS / f"{p.name}.scfo").read_text())
        assert (q, g) == (p, f)


def test_wrong_word_length():
    doc = "protocol p\nvars x\ntemplate x !x\noutput 0: CHC\n"
    with pytest.raises(WordLengthError) as err:
        parse_protocol(doc)
    assert (err.value.line, err.value.column) == (4, 11)
    assert err.value.to_dict()["code"] == "word-length"


@pytest.mark.parametrize(
    "doc, exc, pos_",
    [
        ("protocol p\nvars x\ntemplate x !q\noutput 0: CH\n", UnknownVariable, (3, 12)),
        ("protocol p\nvars x x\ntemplate x\noutput 0: C\n", DuplicateVariable, (2, 8)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\noutput 0: CH\n", DuplicateOutput, (5, 8)),
        ("protocol p\nvars x\ntemplate x !x x !x\noutput 0: CHCH\noutput 1: HCHC\n", InvalidRule, (5, 11)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\nfunction nope!\n", DslSyntaxError, (5, 10)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\nfunction xor3\n", FunctionArity, (5, 10)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\nfunction zz\n", UnknownFunction, (5, 10)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\nfunction 1f\n", FunctionArity, (5, 10)),
        ("protocol p\nvars x\ntemplate x !x\noutput 2: CH\n", DslSyntaxError, (4, 8)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0 CH\n", DslSyntaxError, (4, 10)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CX\n", DslSyntaxError, (4, 11)),
        ("protocol p\nvars x\ntemplate x !x\n", DslSyntaxError, (3, 14)),
        ("vars x\n", DslSyntaxError, (1, 1)),
        ("", DslSyntaxError, (1, 1)),
        ("protocol p\nvars x\ntemplate x !x\noutput 0: CH\noutput 1: CC\nextra\n", DslSyntaxError, (6, 1)),
    ],
)
def test_semantic_and_syntax_errors(doc, exc, pos_):
    with pytest.raises(exc) as err:
        parse_document(doc)
    assert type(err.value) is exc
    assert (err.value.line, err.value.column) == pos_


def test_comments_whitespace_and_rotations():
    doc = """
    # leading comment
      protocol   p1   # trailing
    vars x y z

    template x y !x z x !y !x !z
    output 1 : CCCHHCHH
    output 0:HCCHHHCC
    """
    p, f = parse_protocol(doc)
    assert p.template == protocol1().template
    assert p.rule == protocol1().rule
    assert f is None


def test_single_class_document():
    p, _ = parse_protocol("protocol c\nvars x\ntemplate 1 0\noutput 0: CH\n")
    assert len(p.rule.entries) == 1


def test_serialize_round_trip_fixtures():
    for p, f in all_fixtures():
        text = serialize_protocol(p, f)
        assert parse_protocol(text) == (p, f)
        assert serialize_protocol(*parse_protocol(text)) == text


def test_serialize_uses_canonical_words_and_default_names():
    text = serialize_protocol(protocol1(), xor3)
    assert "output 1: CCCHHCHH" in text
    assert "vars x y z\n" in text
    big = Protocol("big", Template(5, (pos(4), pos(0))), OutputRule.from_words({0: "CH"}))
    assert "vars x0 x1 x2 x3 x4" in serialize_protocol(big)


def test_hex_function_spec_round_trip():
    doc = "protocol p\nvars x y\ntemplate x !x y !y\noutput 0: CHCH\noutput 1: CCHH\nfunction 0x6\n"
    p, f = parse_protocol(doc)
    assert f == FUNCTIONS["xor2"]
    assert serialize_protocol(p, f).endswith("function xor2\n")
    odd = "protocol p\nvars x y\ntemplate x !x y !y\noutput 0: CHCH\nfunction 9\n"
    _, g = parse_protocol(odd)
    assert serialize_protocol(*parse_protocol(odd)).endswith("function 9\n")
    assert g.table == (1, 0, 0, 1)


NAMES = "xyzw"


def random_document(rng: random.Random) -> tuple[str, str]:
    """A messy valid document and its normal form, built without the package."""
    n = rng.randint(1, 4)
    m = rng.randint(1, 10)
    tokens = []
    for _ in range(m):
        r = rng.randrange(2 * n + 2)
        tokens.append(str(r) if r < 2 else ("!" if r % 2 else "") + NAMES[(r - 2) // 2])
    w0 = "".join(rng.choice("CH") for _ in range(m))
    classes = [(0, w0)]
    if rng.random() < 0.8:
        w1 = "".join(rng.choice("CH") for _ in range(m))
        if necklace(w1) != necklace(w0):
            classes.append((1, w1))
    rng.shuffle(classes)
    func = None
    if rng.random() < 0.5:
        func = format(rng.randrange(2 ** (2**n)), "x")
    name = rng.choice(["p", "proto_1", "my-protocol", "Q9"])

    def gap():
        return rng.choice([" ", "  ", "\t", " \t "])

    lines = []
    if rng.random() < 0.5:
        lines.append("# generated")
    lines.append(f"protocol{gap()}{name}")
    lines.append("vars" + gap() + gap().join(NAMES[:n]))
    lines.append("template" + gap() + gap().join(tokens) + (" # cards" if rng.random() < 0.3 else ""))
    for bit, w in classes:
        k = rng.randrange(m)
        rot = w[k:] + w[:k]
        sep = rng.choice([": ", " : ", ":", " :"])
        lines.append(f"output{gap()}{bit}{sep}{rot}")
        if rng.random() < 0.2:
            lines.append("")
    if func is not None:
        lines.append(f"function{gap()}{func}")
    messy = "\n".join(rng.choice(["", "  "]) + ln for ln in lines) + rng.choice(["", "\n", "\n\n"])

    normal = [f"protocol {name}", "vars " + " ".join(NAMES[:n]), "template " + " ".join(tokens)]
    for bit, w in sorted(classes):
        normal.append(f"output {bit}: {necklace(w)}")
    if func is not None:
        # named built-ins take precedence in serialization
        width = max(1, 2**n // 4)
        value = int(func, 16)
        named = {(f.n, f.index): nm for nm, f in FUNCTIONS.items()}
        normal.append("function " + named.get((n, value), format(value, f"0{width}x")))
    return messy, "\n".join(normal) + "\n"


def test_random_documents_round_trip():
    rng = random.Random(11)
    for _ in range(1000):
        messy, normal = random_document(rng)
        p, f = parse_protocol(messy)
        assert serialize_protocol(p, f) == normal
        assert parse_protocol(normal) == (p, f)


def corruptions(text: str):
    """Every single-token deletion, duplication and replacement by junk."""
    lines = text.splitlines()
    for tok_line in tokenize(text):
        for tok in tok_line:
            row = lines[tok.line - 1]
            start, end = tok.column - 1, tok.column - 1 + len(tok.text)
            for replacement in ("", tok.text + " " + tok.text, "@@"):
                new = row[:start] + replacement + row[end:]
                yield "\n".join(lines[: tok.line - 1] + [new] + lines[tok.line :]) + "\n"


def test_every_single_token_corruption_is_rejected():
    total = 0
    for p, f in all_fixtures():
        text = serialize_protocol(p, f)
        for bad in corruptions(text):
            total += 1
            with pytest.raises(DslError) as err:
                parse_document(bad)
            assert err.value.line >= 1 and err.value.column >= 1
            assert err.value.code != "error"
    assert total > 100
