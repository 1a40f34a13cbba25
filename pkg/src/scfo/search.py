"""Exhaustive synthesis of single-cut full-open protocols.

Templates are literal sequences over the alphabet
``const 0 < const 1 < x0 < !x0 < x1 < !x1 < ...`` (see :attr:`Literal.code`),
enumerated depth first in lexicographic order.  Two deck modes are offered:

``committed``
    every variable appears as balanced ``(x, !x)`` pairs;
``free``
    any literal may appear any number of times.

Rotating a template rotates every opened row by the same amount, so only the
least rotation of each template is kept when ``dedup_rotation`` is set.
"""

from __future__ import annotations

import itertools
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .core import (
    BooleanFunction,
    Literal,
    Necklace,
    StructuralError,
    Template,
    Word,
    all_assignments,
    canonical_table,
    eval_literal,
    least_rotation,
    smallest_period,
)
from .engine import OutputRule, Protocol, check_template, verify

COMMITTED = "committed"
FREE = "free"

SEARCH_RAW_GUARD = 10**8
NAIVE_RAW_GUARD = 10**7


class SearchBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    m: int
    deck_mode: str = COMMITTED
    max_pair_multiplicity: int | None = None
    allow_constants: bool = False
    constant_budget: int = 0
    dedup_color: bool = False
    dedup_rotation: bool = True
    limit: int | None = None
    # weight-difference early exit; only has an effect in free mode
    prune_classes: bool = True
    # nodes visited per first-literal partition before giving up
    max_nodes: int = SEARCH_RAW_GUARD

    def __post_init__(self):
        if self.m < 1:
            raise StructuralError("card count must be at least 1")
        if self.deck_mode not in (COMMITTED, FREE):
            raise StructuralError(f"unknown deck mode {self.deck_mode!r}")
        if self.max_pair_multiplicity is not None and self.max_pair_multiplicity < 1:
            raise StructuralError("pair multiplicity cap must be positive")
        if not 0 <= self.constant_budget <= self.m:
            raise StructuralError("constant budget must lie in [0, m]")
        if self.limit is not None and self.limit < 1:
            raise StructuralError("limit must be positive")

    @property
    def constants(self) -> int:
        return self.constant_budget if self.allow_constants else 0


@dataclass
class SearchResult:
    protocols: list[Protocol]
    examined: int = 0
    pruned: int = 0
    wall_time: float = 0.0
    complete: bool = True
    truncated: bool = False

    @property
    def status(self) -> str:
        if not self.complete:
            return "partial"
        return "limited" if self.truncated else "complete"

    @property
    def templates(self) -> list[Template]:
        return [p.template for p in self.protocols]


def deck_ok(codes: Sequence[int], n: int, cfg: SearchConfig) -> bool:
    """Deck constraints on a complete template, checked from scratch."""
    consts = sum(c < 2 for c in codes)
    if consts > cfg.constants:
        return False
    cap = cfg.max_pair_multiplicity
    for var in range(n):
        p = sum(c == 2 + 2 * var for c in codes)
        q = sum(c == 3 + 2 * var for c in codes)
        if cfg.deck_mode == COMMITTED and p != q:
            return False
        if cap is not None and max(p, q) > cap:
            return False
    return all(c < 2 * n + 2 for c in codes)


def _least_rotation_codes(codes: tuple[int, ...]) -> tuple[int, ...]:
    s = least_rotation(codes)
    return codes[s:] + codes[:s]


def _complement_codes(codes: tuple[int, ...]) -> tuple[int, ...]:
    # const 0 <-> const 1, x <-> !x: flip the low bit of every code
    return tuple(c ^ 1 for c in codes)


def canonical_codes(codes: tuple[int, ...], rotation: bool = True, color: bool = False) -> tuple[int, ...]:
    best = _least_rotation_codes(codes) if rotation else codes
    if color:
        comp = _complement_codes(codes)
        comp = _least_rotation_codes(comp) if rotation else comp
        best = min(best, comp)
    return best


def canonical_template(t: Template, rotation: bool = True, color: bool = False) -> Template:
    """Least rotation of the literal list (optionally also over the colour swap)."""
    return Template.from_codes(t.n, canonical_codes(t.codes, rotation, color))


# -- pruned depth-first enumeration -----------------------------------------


class _Stop(Exception):
    pass


class _OutOfBudget(Exception):
    pass


@dataclass
class _Walk:
    examined: int = 0
    pruned: int = 0
    nodes: int = 0
    complete: bool = True


def _enumerate(
    n: int,
    cfg: SearchConfig,
    first: int,
    leaf: Callable[[tuple[int, ...], list[int]], bool],
    classes: Sequence[int] | None = None,
) -> _Walk:
    """Walk every deck-feasible representative template starting with ``first``.

    ``leaf(codes, words)`` receives the literal codes and the packed opened
    row for every assignment; returning True stops the walk.  ``classes``
    (the truth table) enables the weight-difference early exit.
    """
    m = cfg.m
    assignments = all_assignments(n)
    alphabet = [c for c in range(2 * n + 2) if c >= 2 or cfg.constants > 0]
    cols = {c: [eval_literal(Literal.from_code(c), a) for a in assignments] for c in alphabet}
    committed = cfg.deck_mode == COMMITTED
    cap = cfg.max_pair_multiplicity
    budget = cfg.constants
    weigh = classes is not None and cfg.prune_classes and not committed and not classes_constant(classes)
    idx0 = [i for i, b in enumerate(classes or ()) if b == 0]
    idx1 = [i for i, b in enumerate(classes or ()) if b == 1]

    pcount = [0] * n
    ncount = [0] * n
    state = {"consts": 0, "imbalance": 0}
    walk = _Walk()
    codes: list[int] = []

    def feasible(rem: int) -> bool:
        if not committed:
            return True
        d = state["imbalance"]
        if d > rem:
            return False
        slack = rem - d
        cb = budget - state["consts"]
        if cap is None:
            return slack % 2 == 0 or cb >= 1
        room = sum(cap - max(pcount[v], ncount[v]) for v in range(n))
        for c in range(min(cb, slack) + 1):
            if (slack - c) % 2 == 0 and (slack - c) // 2 <= room:
                return True
        return False

    def spread(hearts: list[int], idx: list[int]) -> int:
        if not idx:
            return 0
        vals = [hearts[i] for i in idx]
        return max(vals) - min(vals)

    def rec(k: int, words: list[int], hearts: list[int]) -> None:
        walk.nodes += 1
        if walk.nodes > cfg.max_nodes:
            raise _OutOfBudget
        if k == m:
            t = tuple(codes)
            if cfg.dedup_rotation or cfg.dedup_color:
                if canonical_codes(t, cfg.dedup_rotation, cfg.dedup_color) != t:
                    walk.pruned += 1
                    return
            walk.examined += 1
            if leaf(t, words):
                raise _Stop
            return
        rem = m - k - 1
        choices = (first,) if k == 0 else alphabet
        for c in choices:
            if k > 0 and cfg.dedup_rotation and c < first:
                walk.pruned += 1
                continue
            saved = state["imbalance"]
            if c < 2:
                if state["consts"] >= budget:
                    continue
                state["consts"] += 1
            else:
                v, is_neg = divmod(c - 2, 2)
                before = abs(pcount[v] - ncount[v])
                if is_neg:
                    ncount[v] += 1
                else:
                    pcount[v] += 1
                state["imbalance"] += abs(pcount[v] - ncount[v]) - before
            ok = True
            if c >= 2 and cap is not None and max(pcount[v], ncount[v]) > cap:
                ok = False
            elif not feasible(rem):
                ok = False
            if ok:
                col = cols[c]
                new_words = [(w << 1) | b for w, b in zip(words, col)]
                new_hearts = [h + b for h, b in zip(hearts, col)] if weigh else hearts
                if weigh and (spread(new_hearts, idx0) > rem or spread(new_hearts, idx1) > rem):
                    ok = False
                if ok:
                    codes.append(c)
                    rec(k + 1, new_words, new_hearts)
                    codes.pop()
            if not ok:
                walk.pruned += 1
            if c < 2:
                state["consts"] -= 1
            else:
                if is_neg:
                    ncount[v] -= 1
                else:
                    pcount[v] -= 1
                state["imbalance"] = saved

    if first not in alphabet:
        return walk
    try:
        rec(0, [0] * len(assignments), [0] * len(assignments))
    except _Stop:
        pass
    except _OutOfBudget:
        walk.complete = False
    return walk


def classes_constant(table: Sequence[int]) -> bool:
    return len(set(table)) <= 1


def _rule_from_packed(entries: dict[int, int], m: int) -> OutputRule:
    out = []
    for bit, packed in entries.items():
        w = Word.from_int(packed, m)
        out.append((Necklace(w, smallest_period(w.symbols)), bit))
    return OutputRule(tuple(out))


def _search_partition(args) -> tuple[list[tuple[tuple[int, ...], dict[int, int]]], int, int, bool, bool]:
    f, cfg, first = args
    table = canonical_table(cfg.m)
    truth = f.table
    found: list[tuple[tuple[int, ...], dict[int, int]]] = []
    hit_limit = [False]

    def leaf(codes, words):
        seen = {}
        for bit, w in zip(truth, words):
            nk = table[w]
            prev = seen.get(bit)
            if prev is None:
                seen[bit] = nk
            elif prev != nk:
                return False
        if len(seen) == 2 and seen[0] == seen[1]:
            return False
        found.append((codes, seen))
        if cfg.limit is not None and len(found) >= cfg.limit:
            hit_limit[0] = True
            return True
        return False

    walk = _enumerate(f.n, cfg, first, leaf, truth)
    return found, walk.examined, walk.pruned, walk.complete, hit_limit[0]


def search(f: BooleanFunction, cfg: SearchConfig, jobs: int = 1, recheck: bool = True) -> SearchResult:
    """All representative templates of ``cfg.m`` cards that compute ``f``.

    Results are ordered by literal codes, independent of ``jobs``.
    """
    if f.n < 1:
        raise StructuralError("search needs at least one variable")
    start = time.perf_counter()
    parts = [(f, cfg, first) for first in range(2 * f.n + 2)]
    outputs = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(_search_partition, parts))
    else:
        total = 0
        for part in parts:
            out = _search_partition(part)
            outputs.append(out)
            total += len(out[0])
            if cfg.limit is not None and total >= cfg.limit:
                break

    found = []
    result = SearchResult([])
    for hits, examined, pruned, complete, hit_limit in outputs:
        found.extend(hits)
        result.examined += examined
        result.pruned += pruned
        result.complete &= complete
        result.truncated |= hit_limit
    found.sort(key=lambda h: h[0])
    if cfg.limit is not None and len(found) >= cfg.limit:
        result.truncated = True
        found = found[: cfg.limit]

    for i, (codes, entries) in enumerate(found):
        p = Protocol(f"found-{i + 1}", Template.from_codes(f.n, codes), _rule_from_packed(entries, cfg.m))
        if recheck and not verify(p, f).ok:
            raise AssertionError(f"search emitted a protocol that fails verification: {codes}")
        result.protocols.append(p)
    result.wall_time = time.perf_counter() - start
    return result


def _brute_necklace(bits: tuple[int, ...]) -> tuple[int, ...]:
    return min(bits[k:] + bits[:k] for k in range(len(bits)))


def _naive_rule(codes: tuple[int, ...], f: BooleanFunction, cols) -> bool:
    """Rule derivation from scratch: brute-force necklaces per output class."""
    classes: dict[int, tuple[int, ...]] = {}
    for i, bit in enumerate(f.table):
        nk = _brute_necklace(tuple(cols[c][i] for c in codes))
        if classes.setdefault(bit, nk) != nk:
            return False
    return len(classes) < 2 or classes[0] != classes[1]


def naive_search(f: BooleanFunction, cfg: SearchConfig) -> SearchResult:
    """Reference enumeration of every literal tuple, no pruning at all."""
    size = (2 * f.n + 2) ** cfg.m
    if size > NAIVE_RAW_GUARD:
        raise SearchBudgetError(f"naive enumeration of {size} templates exceeds {NAIVE_RAW_GUARD}")
    start = time.perf_counter()
    assignments = all_assignments(f.n)
    cols = [[eval_literal(Literal.from_code(c), a) for a in assignments] for c in range(2 * f.n + 2)]
    keys = set()
    examined = 0
    for codes in itertools.product(range(2 * f.n + 2), repeat=cfg.m):
        examined += 1
        if deck_ok(codes, f.n, cfg) and _naive_rule(codes, f, cols):
            keys.add(canonical_codes(codes, cfg.dedup_rotation, cfg.dedup_color))
    ordered = sorted(keys)
    truncated = cfg.limit is not None and len(ordered) >= cfg.limit
    if cfg.limit is not None:
        ordered = ordered[: cfg.limit]
    protocols = []
    for i, key in enumerate(ordered):
        p = check_template(Template.from_codes(f.n, key), f, name=f"found-{i + 1}")
        if p is None:
            raise AssertionError(f"representative {key} does not compute the function")
        protocols.append(p)
    return SearchResult(
        protocols,
        examined=examined,
        pruned=0,
        wall_time=time.perf_counter() - start,
        truncated=truncated,
    )


# -- classification ----------------------------------------------------------


@dataclass
class Classification:
    function: BooleanFunction
    minimal_m: int | None = None
    witness: Protocol | None = None


@dataclass
class ClassificationReport:
    n: int
    m_max: int
    records: list[Classification] = field(default_factory=list)
    complete: bool = True

    def lines(self) -> list[str]:
        from .dsl import format_template

        out = []
        for r in self.records:
            if r.witness is None:
                out.append(f"{r.function.to_hex()} NONE")
            else:
                out.append(f"{r.function.to_hex()} {r.minimal_m} {format_template(r.witness.template)}")
        return out


def _input_transforms(n: int):
    for perm in itertools.permutations(range(n)):
        for flips in itertools.product((0, 1), repeat=n):
            yield perm, flips


def np_representative(f: BooleanFunction) -> int:
    """Least truth-table id over input permutations and input negations."""
    best = None
    assignments = all_assignments(f.n)
    for perm, flips in _input_transforms(f.n):
        v = 0
        for a in assignments:
            src = [0] * f.n
            for i in range(f.n):
                src[perm[i]] = a[i] ^ flips[i]
            idx = 0
            for b in src:
                idx = (idx << 1) | b
            v = (v << 1) | f.table[idx]
        if best is None or v < best:
            best = v
    return best


def classify(n: int, m_max: int, cfg: SearchConfig, reduce_np: bool = False) -> ClassificationReport:
    """Least card count (up to ``m_max``) realizing each n-variable function.

    ``cfg.m`` is ignored; every other knob applies at each card count.  The
    witness is the least representative template at the minimal count, i.e.
    the first protocol :func:`search` returns there.
    """
    if not 1 <= n <= 4:
        raise SearchBudgetError("classification supports 1 <= n <= 4")
    if not 1 <= m_max <= 12:
        raise SearchBudgetError("classification supports 1 <= m_max <= 12")
    rows = 1 << (1 << n)
    targets = list(range(rows))
    if reduce_np:
        targets = sorted({np_representative(BooleanFunction.from_index(n, i)) for i in targets})
    pending = set(targets)
    best: dict[int, tuple[int, tuple[int, ...]]] = {}
    full = (1 << (1 << n)) - 1
    report = ClassificationReport(n, m_max)

    for m in range(1, m_max + 1):
        if not pending:
            break
        mcfg = replace(cfg, m=m, constant_budget=min(cfg.constant_budget, m), limit=None)
        table = canonical_table(m)

        def leaf(codes, words):
            necks = [table[w] for w in words]
            distinct = set(necks)
            if len(distinct) > 2:
                return False
            hi = max(distinct)
            ind = 0
            for nk in necks:
                ind = (ind << 1) | (nk == hi)
            realized = (ind, full ^ ind)
            for fid in realized:
                if fid in pending:
                    pending.discard(fid)
                    best[fid] = (m, codes)
            return not pending

        for first in range(2 * n + 2):
            walk = _enumerate(n, mcfg, first, leaf)
            report.complete &= walk.complete
            if not pending:
                break

    for fid in targets:
        f = BooleanFunction.from_index(n, fid)
        rec = Classification(f)
        if fid in best:
            m, codes = best[fid]
            p = check_template(Template.from_codes(n, codes), f, name=f"witness-{f.to_hex()}")
            if p is None or not verify(p, f).ok:
                raise AssertionError(f"classification witness for {f.to_hex()} fails verification")
            rec.minimal_m, rec.witness = m, p
        report.records.append(rec)
    return report
