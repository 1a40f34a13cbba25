"""The six known single-cut full-open protocols and their target functions."""

from __future__ import annotations

from .core import BooleanFunction, Template, const, neg, pos
from .engine import OutputRule, Protocol

X, Y, Z, W = 0, 1, 2, 3

xor2 = BooleanFunction.from_callable(2, lambda x, y: x ^ y)
and2 = BooleanFunction.from_callable(2, lambda x, y: x & y)
eq3 = BooleanFunction.from_callable(3, lambda x, y, z: x == y == z)
xor3 = BooleanFunction.from_callable(3, lambda x, y, z: x ^ y ^ z)
paper_f2 = BooleanFunction.from_callable(
    4,
    lambda x, y, z, w: ((1 - x) & y & (1 - w))
    | ((1 - y) & z & (1 - w))
    | (x & (1 - y) & w)
    | (y & (1 - z) & w),
)
# x when y = 0, not z when y = 1
if_not = BooleanFunction.from_callable(3, lambda x, y, z: (x & (1 - y)) | (y & (1 - z)))

FUNCTIONS: dict[str, BooleanFunction] = {
    "xor2": xor2,
    "and2": and2,
    "eq3": eq3,
    "xor3": xor3,
    "paper-f2": paper_f2,
    "if-not": if_not,
}


def _protocol(name, n, literals, zero, one):
    return Protocol(name, Template(n, tuple(literals)), OutputRule.from_words({0: zero, 1: one}))


def xor2_protocol() -> Protocol:
    return _protocol("xor2", 2, [pos(X), neg(X), pos(Y), neg(Y)], "HCHC", "HHCC")


def five_card_trick() -> Protocol:
    return _protocol(
        "five-card-trick", 2, [neg(X), pos(X), const(1), pos(Y), neg(Y)], "HCHCH", "HHHCC"
    )


def six_card_trick() -> Protocol:
    # all-equal inputs open to the alternating row, so that row means 1
    return _protocol(
        "six-card-trick",
        3,
        [pos(X), neg(Y), pos(Z), neg(X), pos(Y), neg(Z)],
        "HHHCCC",
        "HCHCHC",
    )


def protocol1() -> Protocol:
    return _protocol(
        "protocol1",
        3,
        [pos(X), pos(Y), neg(X), pos(Z), pos(X), neg(Y), neg(X), neg(Z)],
        "CCHCCHHH",
        "HHCHHCCC",
    )


def protocol2() -> Protocol:
    return _protocol(
        "protocol2",
        4,
        [pos(X), pos(Y), pos(Z), pos(W), neg(X), neg(Y), neg(Z), neg(W)],
        "HHHHCCCC",
        "CCHCHHCH",
    )


def protocol3() -> Protocol:
    return _protocol(
        "protocol3",
        3,
        [pos(X), pos(Y), pos(Z), const(1), neg(X), neg(Y), neg(Z), const(0)],
        "HHHHCCCC",
        "CCHCHHCH",
    )


# protocol name -> (constructor, target function name)
PROTOCOLS = {
    "xor2": (xor2_protocol, "xor2"),
    "five-card-trick": (five_card_trick, "and2"),
    "six-card-trick": (six_card_trick, "eq3"),
    "protocol1": (protocol1, "xor3"),
    "protocol2": (protocol2, "paper-f2"),
    "protocol3": (protocol3, "if-not"),
}

# function name -> protocol name computing it
PROTOCOL_FOR_FUNCTION = {fn: name for name, (_, fn) in PROTOCOLS.items()}


def all_fixtures() -> list[tuple[Protocol, BooleanFunction]]:
    return [(ctor(), FUNCTIONS[fn]) for ctor, fn in PROTOCOLS.values()]


def lookup_protocol(name: str) -> tuple[Protocol, BooleanFunction] | None:
    """Resolve a protocol name, or a function name to its fixture protocol."""
    if name in PROTOCOLS:
        ctor, fn = PROTOCOLS[name]
        return ctor(), FUNCTIONS[fn]
    if name in PROTOCOL_FOR_FUNCTION:
        return lookup_protocol(PROTOCOL_FOR_FUNCTION[name])
    return None
