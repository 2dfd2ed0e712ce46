"""Reference interpreters used to cross-check the packrat engine.

Three independent evaluation strategies, deliberately kept separate
from the engine and from each other:

* :func:`naive_parse` - a direct recursive-descent interpreter with no
  memoization.  Same ordered-choice semantics as the engine, but it
  re-evaluates rules freely, so its call count exposes the redundancy
  that memoization removes (exponential on crafted grammars).
* :func:`tabular_parse` - fills the whole rule-by-position matrix from
  the rightmost column leftwards, callees before callers inside each
  column.  This only works when no rule can invoke another at the same
  position cyclically, and it has no way to schedule unbounded
  repetition, so Star/Plus are rejected outright.
* :func:`cfg_all_ends` - reads the grammar as a context-free grammar
  (unordered choice) and computes, per rule and start position, the set
  of all reachable end positions by exhaustive memoized search.  Only
  Seq/Choice/Char/Literal/Ref/Empty are meaningful under CFG reading;
  everything else is rejected.

Verdicts are end positions (int) or None for failure; oracle results
carry no parse trees.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import DepthExceeded, InvalidGrammarError, LeftRecursion
from .grammar import (
    And,
    AnyChar,
    Char,
    Choice,
    Class,
    Empty,
    Grammar,
    Literal,
    Not,
    Opt,
    PegExpr,
    Plus,
    Ref,
    Seq,
    Star,
    nullable,
    validation_errors,
)

DEFAULT_CALL_BUDGET = 10**8


class CallBudgetExceeded(Exception):
    def __init__(self, budget: int):
        super().__init__(f"naive interpreter exceeded its call budget of {budget}")
        self.budget = budget


class SamePositionCycle(Exception):
    """Rules that can call each other without consuming input cannot be
    ordered callee-first within a column."""

    def __init__(self, cycle: tuple[int, ...], names: tuple[str, ...]):
        trail = " -> ".join(names[r] for r in cycle)
        super().__init__(f"same-position call cycle: {trail}")
        self.cycle = cycle


class UnsupportedConstruct(Exception):
    def __init__(self, what: str, rule: str, oracle: str):
        super().__init__(f"{oracle} cannot interpret {what} (in rule {rule!r})")
        self.what = what
        self.rule = rule


def _require_valid(g: Grammar) -> None:
    errors = validation_errors(g)
    if errors:
        raise InvalidGrammarError(errors)


@dataclass(frozen=True, slots=True)
class NaiveReport:
    """Outcome plus the work profile of a naive run.

    ``outcome`` is the end position or None.  ``calls`` counts every
    rule invocation, including redundant re-evaluations; the per-cell
    breakdown lives in ``calls_by_cell`` keyed by (rule, position).
    """

    outcome: int | None
    calls: int
    max_depth: int
    calls_by_cell: dict[tuple[int, int], int] = field(default_factory=dict)


def naive_parse(
    g: Grammar,
    rule: int,
    pos: int,
    text: str,
    *,
    call_budget: int = DEFAULT_CALL_BUDGET,
    depth_limit: int = 100_000,
) -> NaiveReport:
    """Backtracking interpretation with no memo table.

    Verdict-identical to the engine on any grammar both accept; left
    recursion is cut off by an active-call cycle guard and reported as
    :class:`LeftRecursion` rather than looping.
    """
    _require_valid(g)
    n = len(text)
    state = {"calls": 0, "max_depth": 0}
    by_cell: dict[tuple[int, int], int] = {}
    active: list[tuple[int, int]] = []
    active_set: set[tuple[int, int]] = set()

    def call_rule(r: int, p: int) -> int | None:
        state["calls"] += 1
        key = (r, p)
        by_cell[key] = by_cell.get(key, 0) + 1
        if state["calls"] > call_budget:
            raise CallBudgetExceeded(call_budget)
        if key in active_set:
            first = active.index(key)
            raise LeftRecursion(tuple(active[first:]) + (key,), g.names)
        if len(active) >= depth_limit:
            raise DepthExceeded(depth_limit, f"naive interpreter at rule {r}, pos {p}")
        active.append(key)
        active_set.add(key)
        if len(active) > state["max_depth"]:
            state["max_depth"] = len(active)
        try:
            return walk(g.rules[r].body, p)
        finally:
            active.pop()
            active_set.discard(key)

    def walk(e: PegExpr, p: int) -> int | None:
        if isinstance(e, Ref):
            return call_rule(e.rule, p)
        if isinstance(e, Char):
            return p + 1 if p < n and text[p] == e.char else None
        if isinstance(e, Class):
            return p + 1 if p < n and text[p] in e.chars else None
        if isinstance(e, AnyChar):
            return p + 1 if p < n else None
        if isinstance(e, Literal):
            return p + len(e.text) if text.startswith(e.text, p) else None
        if isinstance(e, Empty):
            return p
        if isinstance(e, Seq):
            q: int | None = p
            for part in e.parts:
                q = walk(part, q)
                if q is None:
                    return None
            return q
        if isinstance(e, Choice):
            for alt in e.alts:
                q = walk(alt, p)
                if q is not None:
                    return q
            return None
        if isinstance(e, Star):
            q = p
            while True:
                step = walk(e.body, q)
                if step is None:
                    return q
                q = step
        if isinstance(e, Plus):
            q = walk(e.body, p)
            if q is None:
                return None
            while True:
                step = walk(e.body, q)
                if step is None:
                    return q
                q = step
        if isinstance(e, Opt):
            q = walk(e.body, p)
            return p if q is None else q
        if isinstance(e, And):
            return p if walk(e.body, p) is not None else None
        if isinstance(e, Not):
            return p if walk(e.body, p) is None else None
        raise TypeError(f"not a PegExpr: {e!r}")

    try:
        outcome = call_rule(rule, pos)
    except RecursionError:
        raise DepthExceeded(depth_limit, "interpreter frame budget exhausted") from None
    return NaiveReport(outcome, state["calls"], state["max_depth"], by_cell)


_UNFILLED = object()


@dataclass(frozen=True, slots=True)
class TabularMatrix:
    """Fully materialized verdict table.

    ``ends[r][p]`` is the end position or None.  ``fill_order`` records
    the exact evaluation sequence: columns right to left, callees
    before callers within a column; every cell appears exactly once.
    """

    ends: tuple[tuple[int | None, ...], ...]
    fill_order: tuple[tuple[int, int], ...]

    def verdict(self, rule: int, pos: int) -> int | None:
        return self.ends[rule][pos]

    @property
    def cells_filled(self) -> int:
        return len(self.fill_order)


def _same_position_refs(g: Grammar, e: PegExpr, acc: set[int]) -> None:
    # rules reachable from e before any input is consumed
    if isinstance(e, Ref):
        acc.add(e.rule)
    elif isinstance(e, Seq):
        for part in e.parts:
            _same_position_refs(g, part, acc)
            if not nullable(g, part):
                break
    elif isinstance(e, Choice):
        for alt in e.alts:
            _same_position_refs(g, alt, acc)
    elif isinstance(e, (Star, Plus, Opt, And, Not)):
        _same_position_refs(g, e.body, acc)


def _topological_rules(g: Grammar) -> tuple[int, ...]:
    graph: dict[int, set[int]] = {}
    for rid, rule in enumerate(g.rules):
        acc: set[int] = set()
        _same_position_refs(g, rule.body, acc)
        graph[rid] = acc
    order: list[int] = []
    color = {}  # 1 = on stack, 2 = done

    def visit(r: int, trail: list[int]) -> None:
        if color.get(r) == 2:
            return
        if color.get(r) == 1:
            cycle = trail[trail.index(r):] + [r]
            raise SamePositionCycle(tuple(cycle), g.names)
        color[r] = 1
        trail.append(r)
        for s in sorted(graph[r]):
            visit(s, trail)
        trail.pop()
        color[r] = 2
        order.append(r)

    for r in range(len(g.rules)):
        visit(r, [])
    return tuple(order)


def tabular_parse(g: Grammar, text: str) -> TabularMatrix:
    """Fill every (rule, position) verdict right-to-left.

    Rejects Star/Plus (no tabulation schedule exists for unbounded
    repetition) with :class:`UnsupportedConstruct` and grammars whose
    same-position call graph is cyclic with :class:`SamePositionCycle`.
    """
    _require_valid(g)

    def check(e: PegExpr, rule_name: str) -> None:
        if isinstance(e, (Star, Plus)):
            raise UnsupportedConstruct(
                "Star/Plus repetition", rule_name, "tabular_parse"
            )
        if isinstance(e, Seq):
            for p in e.parts:
                check(p, rule_name)
        elif isinstance(e, Choice):
            for a in e.alts:
                check(a, rule_name)
        elif isinstance(e, (Opt, And, Not)):
            check(e.body, rule_name)

    for rule in g.rules:
        check(rule.body, rule.name)

    order = _topological_rules(g)
    n = len(text)
    table: list[list] = [[_UNFILLED] * (n + 1) for _ in g.rules]
    fill_order: list[tuple[int, int]] = []

    def walk(e: PegExpr, p: int) -> int | None:
        if isinstance(e, Ref):
            cell = table[e.rule][p]
            if cell is _UNFILLED:
                raise RuntimeError(
                    f"tabular fill order violated: rule {e.rule} at {p} unfilled"
                )
            return cell
        if isinstance(e, Char):
            return p + 1 if p < n and text[p] == e.char else None
        if isinstance(e, Class):
            return p + 1 if p < n and text[p] in e.chars else None
        if isinstance(e, AnyChar):
            return p + 1 if p < n else None
        if isinstance(e, Literal):
            return p + len(e.text) if text.startswith(e.text, p) else None
        if isinstance(e, Empty):
            return p
        if isinstance(e, Seq):
            q: int | None = p
            for part in e.parts:
                q = walk(part, q)
                if q is None:
                    return None
            return q
        if isinstance(e, Choice):
            for alt in e.alts:
                q = walk(alt, p)
                if q is not None:
                    return q
            return None
        if isinstance(e, Opt):
            q = walk(e.body, p)
            return p if q is None else q
        if isinstance(e, And):
            return p if walk(e.body, p) is not None else None
        if isinstance(e, Not):
            return p if walk(e.body, p) is None else None
        raise TypeError(f"unexpected construct in tabular walk: {e!r}")

    for pos in range(n, -1, -1):
        for rid in order:
            table[rid][pos] = walk(g.rules[rid].body, pos)
            fill_order.append((rid, pos))

    return TabularMatrix(
        tuple(tuple(row) for row in table), tuple(fill_order)
    )


def check_cfg_compatible(g: Grammar) -> None:
    """Raise UnsupportedConstruct unless the grammar stays inside the
    CFG-friendly fragment (Seq/Choice/Char/Literal/Ref/Empty only)."""
    def check(e: PegExpr, rule_name: str) -> None:
        if isinstance(e, (Star, Plus, Opt)):
            raise UnsupportedConstruct("repetition", rule_name, "cfg_all_ends")
        if isinstance(e, (And, Not)):
            raise UnsupportedConstruct("predicates", rule_name, "cfg_all_ends")
        if isinstance(e, (Class, AnyChar)):
            raise UnsupportedConstruct(
                "character classes / wildcards", rule_name, "cfg_all_ends"
            )
        if isinstance(e, Seq):
            for p in e.parts:
                check(p, rule_name)
        elif isinstance(e, Choice):
            for a in e.alts:
                check(a, rule_name)

    for rule in g.rules:
        check(rule.body, rule.name)


def cfg_end_table(g: Grammar, text: str) -> dict[tuple[int, int], frozenset[int]]:
    """All-end-sets for every (rule, position) under CFG reading.

    Kleene iteration on a monotone table, so (unlike the PEG engines)
    left-recursive grammars converge to their full end-sets.
    """
    _require_valid(g)
    check_cfg_compatible(g)
    n = len(text)
    nrules = len(g.rules)
    table: list[list[set[int]]] = [[set() for _ in range(n + 1)] for _ in range(nrules)]

    def ends(e: PegExpr, p: int) -> set[int]:
        if isinstance(e, Ref):
            return set(table[e.rule][p])
        if isinstance(e, Char):
            return {p + 1} if p < n and text[p] == e.char else set()
        if isinstance(e, Literal):
            return {p + len(e.text)} if text.startswith(e.text, p) else set()
        if isinstance(e, Empty):
            return {p}
        if isinstance(e, Seq):
            front = {p}
            for part in e.parts:
                nxt: set[int] = set()
                for q in front:
                    nxt |= ends(part, q)
                if not nxt:
                    return set()
                front = nxt
            return front
        if isinstance(e, Choice):
            out: set[int] = set()
            for alt in e.alts:
                out |= ends(alt, p)
            return out
        raise TypeError(f"unexpected construct in CFG walk: {e!r}")

    changed = True
    while changed:
        changed = False
        for rid in range(nrules):
            body = g.rules[rid].body
            for p in range(n + 1):
                new = ends(body, p)
                if not new <= table[rid][p]:
                    table[rid][p] |= new
                    changed = True

    return {
        (rid, p): frozenset(table[rid][p])
        for rid in range(nrules)
        for p in range(n + 1)
    }


def cfg_all_ends(g: Grammar, rule: int, pos: int, text: str) -> frozenset[int]:
    """End-set for one (rule, position); see :func:`cfg_end_table`."""
    return cfg_end_table(g, text)[(rule, pos)]
