from itertools import product

import pytest

from oracles import instantiate_text, necklace
from scfo.core import BooleanFunction, Template, all_assignments, const, format_assignment, neg, pos, rotate_template
from scfo.dsl import format_template
from scfo.engine import check_template, verify
from scfo.fixtures import and2, eq3, five_card_trick, protocol1, protocol2, paper_f2, xor2, xor2_protocol, xor3
from scfo.search import (
    FREE,
    SearchBudgetError,
    SearchConfig,
    canonical_template,
    classify,
    deck_ok,
    naive_search,
    search,
)

ZERO2 = BooleanFunction(2, (0, 0, 0, 0))


def contains_up_to_rotation(result, t: Template) -> bool:
    target = canonical_template(t)
    return any(canonical_template(x) == target for x in result.templates)


def test_check_template():
    p = check_template(xor2_protocol().template, xor2)
    assert p is not None
    assert p.rule == xor2_protocol().rule
    assert check_template(xor2_protocol().template, and2) is None
    zeros = Template(2, (const(0),) * 4)
    assert check_template(zeros, xor2) is None


def test_search_xor2_four_cards():
    cfg = SearchConfig(4)
    result = search(xor2, cfg)
    assert contains_up_to_rotation(result, xor2_protocol().template)
    assert contains_up_to_rotation(naive_search(xor2, cfg), xor2_protocol().template)
    assert result.status == "complete"


def test_search_five_card_trick():
    cfg = SearchConfig(5, deck_mode=FREE, allow_constants=True, constant_budget=1)
    result = search(and2, cfg)
    assert contains_up_to_rotation(result, five_card_trick().template)
    assert result.templates == naive_search(and2, cfg).templates


def test_search_protocol1():
    result = search(xor3, SearchConfig(8, max_pair_multiplicity=2))
    assert contains_up_to_rotation(result, protocol1().template)


def test_naive_constant_function_two_cards():
    cfg = SearchConfig(2, deck_mode=FREE, allow_constants=True, constant_budget=2, dedup_rotation=False)
    result = naive_search(ZERO2, cfg)
    tokens = ["0", "1", "x", "!x", "y", "!y"]
    expected = sorted(
        tuple(tokens.index(a) for a in pair)
        for pair in product(tokens, repeat=2)
        if len({necklace(instantiate_text(list(pair), format_assignment(a))) for a in all_assignments(2)}) == 1
    )
    assert [t.codes for t in result.templates] == expected
    assert len(expected) == 8
    assert all(len(p.rule.entries) == 1 for p in result.protocols)
    assert search(ZERO2, cfg).templates == result.templates


def test_committed_odd_length_is_empty():
    cfg = SearchConfig(3)
    assert naive_search(xor2, cfg).protocols == []
    assert search(xor2, cfg).protocols == []


def test_canonical_template():
    t = protocol1().template
    reps = {canonical_template(rotate_template(t, k)) for k in range(t.m)}
    assert len(reps) == 1
    c = canonical_template(t)
    assert canonical_template(c) == c
    x = xor2_protocol().template
    comp = Template(2, tuple(lit.complement() for lit in x.literals))
    assert canonical_template(x).codes != canonical_template(comp).codes
    assert canonical_template(x, color=True) == canonical_template(comp, color=True)


@pytest.mark.parametrize(
    "cfg",
    [
        SearchConfig(4),
        SearchConfig(4, deck_mode=FREE, allow_constants=True, constant_budget=1),
        SearchConfig(5, deck_mode=FREE, allow_constants=True, constant_budget=2, dedup_color=True),
        SearchConfig(4, deck_mode=FREE, dedup_rotation=False, max_pair_multiplicity=1),
        SearchConfig(5, deck_mode=FREE, prune_classes=False),
        SearchConfig(4, allow_constants=True, constant_budget=2, max_pair_multiplicity=1),
    ],
)
def test_search_matches_naive(cfg):
    for fid in range(16):
        f = BooleanFunction.from_index(2, fid)
        a = search(f, cfg)
        b = naive_search(f, cfg)
        assert a.templates == b.templates
        assert [p.rule for p in a.protocols] == [p.rule for p in b.protocols]


def test_deck_law_and_soundness():
    result = search(paper_f2, SearchConfig(8))
    assert contains_up_to_rotation(result, protocol2().template)
    for p in result.protocols:
        assert verify(p, paper_f2).ok
        assert deck_ok(p.template.codes, 4, SearchConfig(8))
        for v in range(4):
            lits = p.template.literals
            assert sum(l == pos(v) for l in lits) == sum(l == neg(v) for l in lits)


def test_multiplicity_cap():
    for p in search(xor3, SearchConfig(8, max_pair_multiplicity=2)).protocols:
        for v in range(3):
            assert sum(l == pos(v) for l in p.template.literals) <= 2
    assert search(xor3, SearchConfig(8, max_pair_multiplicity=1)).protocols == []


def test_rotation_dedup_is_safe():
    base = dict(deck_mode=FREE, allow_constants=True, constant_budget=1)
    full = search(and2, SearchConfig(5, dedup_rotation=False, **base))
    dedup = search(and2, SearchConfig(5, **base))
    assert {canonical_template(t) for t in full.templates} == set(dedup.templates)
    assert len(full.templates) > len(dedup.templates)


def test_color_dedup_halves_or_keeps():
    plain = search(xor3, SearchConfig(8, max_pair_multiplicity=2))
    color = search(xor3, SearchConfig(8, max_pair_multiplicity=2, dedup_color=True))
    assert {canonical_template(t, color=True) for t in plain.templates} == set(color.templates)


def test_parallel_search_is_deterministic():
    cfg = SearchConfig(8, max_pair_multiplicity=2)
    one = search(xor3, cfg, jobs=1)
    two = search(xor3, cfg, jobs=3)
    assert one.templates == two.templates
    assert [p.rule for p in one.protocols] == [p.rule for p in two.protocols]
    assert one.examined == two.examined


def test_limit_and_partial_results():
    cfg = SearchConfig(8, limit=2)
    limited = search(paper_f2, cfg)
    assert len(limited.protocols) == 2
    assert limited.status == "limited"
    assert limited.templates == search(paper_f2, SearchConfig(8)).templates[:2]
    assert search(paper_f2, SearchConfig(8, limit=2), jobs=2).templates == limited.templates

    tiny = search(paper_f2, SearchConfig(8, max_nodes=50))
    assert not tiny.complete
    assert tiny.status == "partial"


def test_naive_guard():
    with pytest.raises(SearchBudgetError):
        naive_search(paper_f2, SearchConfig(8))


def test_classify_two_variables():
    report = classify(2, 6, SearchConfig(1))
    by_hex = {r.function.to_hex(): r for r in report.records}
    assert len(report.records) == 16
    assert by_hex[xor2.to_hex()].minimal_m == 4
    for m in range(1, 4):
        assert search(xor2, SearchConfig(m)).protocols == []
    for r in report.records:
        if r.witness is None:
            continue
        assert verify(r.witness, r.function).ok
        first = search(r.function, SearchConfig(r.minimal_m, limit=1)).protocols[0]
        assert first.template == r.witness.template
        for m in range(1, r.minimal_m):
            assert search(r.function, SearchConfig(m)).protocols == []


def test_classify_three_variables():
    report = classify(3, 8, SearchConfig(1))
    by_hex = {r.function.to_hex(): r for r in report.records}
    assert by_hex[xor3.to_hex()].minimal_m <= 8
    assert by_hex[eq3.to_hex()].minimal_m <= 6
    assert all(verify(r.witness, r.function).ok for r in report.records if r.witness)


def test_classify_np_reduction():
    full = classify(2, 5, SearchConfig(1, allow_constants=True, constant_budget=1))
    reduced = classify(2, 5, SearchConfig(1, allow_constants=True, constant_budget=1), reduce_np=True)
    assert len(reduced.records) < len(full.records)
    minimal = {r.function: r.minimal_m for r in full.records}
    for r in reduced.records:
        assert minimal[r.function] == r.minimal_m


def test_classify_guards():
    with pytest.raises(SearchBudgetError):
        classify(5, 4, SearchConfig(1))
    with pytest.raises(SearchBudgetError):
        classify(2, 13, SearchConfig(1))


def test_classification_report_lines():
    report = classify(2, 4, SearchConfig(1))
    lines = dict(line.split(" ", 1) for line in report.lines())
    assert lines["6"] == "4 " + format_template(xor2_protocol().template)
    assert lines["1"] == "NONE"
