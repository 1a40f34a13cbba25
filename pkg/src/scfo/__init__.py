"""Model, verify and search single-cut full-open card protocols."""

from .core import (
    BooleanFunction,
    Literal,
    Necklace,
    StructuralError,
    Symbol,
    Template,
    Word,
    canonical,
    const,
    eval_function,
    eval_literal,
    instantiate,
    neg,
    open_distribution,
    pos,
    rotate,
)
from .engine import (
    IndistinguishableClasses,
    NonConstantClass,
    OutputRule,
    Protocol,
    UnknownClass,
    decode,
    derive_output_rule,
    restrict,
    run,
    security_by_distribution,
    verify,
)

__version__ = "0.1.0"
