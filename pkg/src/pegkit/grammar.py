"""Parsing expression grammar intermediate representation.

A grammar is a dense, immutable table of named rules over a small
expression algebra:

    Empty            match nothing, consume nothing
    AnyChar          consume exactly one character
    Char(c)          consume the character c
    Class(chars)     consume one character drawn from a set
    Literal(text)    consume a fixed string
    Seq(parts)       match parts in order
    Choice(alts)     ordered choice: first alternative that matches wins
    Star(body)       zero or more repetitions, greedy
    Plus(body)       one or more repetitions, greedy
    Opt(body)        zero or one repetition, greedy
    And(body)        positive lookahead, consumes nothing
    Not(body)        negative lookahead, consumes nothing
    Ref(rule)        invoke another rule of the enclosing grammar

Expressions are frozen dataclasses and compare structurally.  Rules are
indexed densely from 0; ``Ref`` normally carries an integer index, but a
string name is tolerated before resolution so grammars can be assembled
by name (see :func:`make_grammar`).  Static analysis lives here too:
:func:`nullable` computes the least fixed point of the can-match-empty
relation across rules, and :func:`validate` reports structural issues
without mutating the grammar.
"""

from __future__ import annotations

import functools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True, slots=True)
class Empty:
    pass


@dataclass(frozen=True, slots=True)
class AnyChar:
    pass


@dataclass(frozen=True, slots=True)
class Char:
    char: str

    def __post_init__(self) -> None:
        if len(self.char) != 1:
            raise ValueError(f"Char expects a single character, got {self.char!r}")


@dataclass(frozen=True, slots=True)
class Class:
    chars: frozenset[str]

    def __post_init__(self) -> None:
        for c in self.chars:
            if len(c) != 1:
                raise ValueError(f"Class members must be single characters, got {c!r}")


@dataclass(frozen=True, slots=True)
class Literal:
    text: str


@dataclass(frozen=True, slots=True)
class Seq:
    parts: tuple["PegExpr", ...]


@dataclass(frozen=True, slots=True)
class Choice:
    alts: tuple["PegExpr", ...]


@dataclass(frozen=True, slots=True)
class Star:
    body: "PegExpr"


@dataclass(frozen=True, slots=True)
class Plus:
    body: "PegExpr"


@dataclass(frozen=True, slots=True)
class Opt:
    body: "PegExpr"


@dataclass(frozen=True, slots=True)
class And:
    body: "PegExpr"


@dataclass(frozen=True, slots=True)
class Not:
    body: "PegExpr"


@dataclass(frozen=True, slots=True)
class Ref:
    rule: Union[int, str]


PegExpr = Union[
    Empty, AnyChar, Char, Class, Literal, Seq, Choice, Star, Plus, Opt, And, Not, Ref
]

EMPTY = Empty()
ANY = AnyChar()


def char(c: str) -> Char:
    return Char(c)


def lit(text: str) -> Literal:
    return Literal(text)


def charclass(chars: Iterable[str]) -> Class:
    """Character set from any iterable of single characters."""
    return Class(frozenset(chars))


def seq(*parts: PegExpr) -> Seq:
    return Seq(tuple(parts))


def choice(*alts: PegExpr) -> Choice:
    return Choice(tuple(alts))


def star(body: PegExpr) -> Star:
    return Star(body)


def plus(body: PegExpr) -> Plus:
    return Plus(body)


def opt(body: PegExpr) -> Opt:
    return Opt(body)


def and_(body: PegExpr) -> And:
    return And(body)


def not_(body: PegExpr) -> Not:
    return Not(body)


def ref(rule: Union[int, str]) -> Ref:
    return Ref(rule)


@dataclass(frozen=True, slots=True)
class Rule:
    name: str
    body: PegExpr


@dataclass(frozen=True, slots=True)
class Grammar:
    """Immutable rule table.  ``start`` indexes into ``rules``."""

    rules: tuple[Rule, ...]
    start: int = 0

    def __post_init__(self) -> None:
        if not self.rules:
            raise ValueError("a grammar needs at least one rule")
        if not 0 <= self.start < len(self.rules):
            raise ValueError(f"start rule index {self.start} out of range")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rules)

    def rule_id(self, name: str) -> int:
        for i, r in enumerate(self.rules):
            if r.name == name:
                return i
        raise KeyError(name)

    def rule_name(self, rid: int) -> str:
        return self.rules[rid].name

    def body(self, rid: int) -> PegExpr:
        return self.rules[rid].body


def _children(e: PegExpr) -> tuple[PegExpr, ...]:
    if isinstance(e, Seq):
        return e.parts
    if isinstance(e, Choice):
        return e.alts
    if isinstance(e, (Star, Plus, Opt, And, Not)):
        return (e.body,)
    return ()


def walk_exprs(g: Grammar) -> Iterator[PegExpr]:
    """Every expression node in every rule body, preorder."""
    stack = [r.body for r in reversed(g.rules)]
    while stack:
        e = stack.pop()
        yield e
        stack.extend(reversed(_children(e)))


def _resolve(e: PegExpr, index: dict[str, int]) -> PegExpr:
    if isinstance(e, Ref):
        if isinstance(e.rule, str) and e.rule in index:
            return Ref(index[e.rule])
        return e
    if isinstance(e, Seq):
        return Seq(tuple(_resolve(p, index) for p in e.parts))
    if isinstance(e, Choice):
        return Choice(tuple(_resolve(a, index) for a in e.alts))
    if isinstance(e, Star):
        return Star(_resolve(e.body, index))
    if isinstance(e, Plus):
        return Plus(_resolve(e.body, index))
    if isinstance(e, Opt):
        return Opt(_resolve(e.body, index))
    if isinstance(e, And):
        return And(_resolve(e.body, index))
    if isinstance(e, Not):
        return Not(_resolve(e.body, index))
    return e


def make_grammar(
    rules: Sequence[tuple[str, PegExpr]], start: str | None = None
) -> Grammar:
    """Build a grammar from (name, body) pairs, resolving name refs.

    Rule names must be unique.  ``Ref`` nodes carrying known names are
    rewritten to dense indices; unknown names are left in place for
    :func:`validate` to report.  The start rule defaults to the first.
    """
    names = [name for name, _ in rules]
    for name in names:
        if names.count(name) > 1:
            raise ValueError(f"duplicate rule name {name!r}")
    index = {name: i for i, name in enumerate(names)}
    resolved = tuple(Rule(name, _resolve(body, index)) for name, body in rules)
    start_id = index[start] if start is not None else 0
    return Grammar(resolved, start_id)


@functools.lru_cache(maxsize=None)
def _rule_nullability(g: Grammar) -> tuple[bool, ...]:
    # Least fixed point: start from all-False and iterate monotonically.
    table = [False] * len(g.rules)

    def expr_nullable(e: PegExpr) -> bool:
        if isinstance(e, (Empty, Star, Opt, And, Not)):
            return True
        if isinstance(e, (Char, Class, AnyChar)):
            return False
        if isinstance(e, Literal):
            return e.text == ""
        if isinstance(e, Seq):
            return all(expr_nullable(p) for p in e.parts)
        if isinstance(e, Choice):
            return any(expr_nullable(a) for a in e.alts)
        if isinstance(e, Plus):
            return expr_nullable(e.body)
        if isinstance(e, Ref):
            if isinstance(e.rule, int) and 0 <= e.rule < len(table):
                return table[e.rule]
            return False
        raise TypeError(f"not a PegExpr: {e!r}")

    changed = True
    while changed:
        changed = False
        for i, rule in enumerate(g.rules):
            if not table[i] and expr_nullable(rule.body):
                table[i] = True
                changed = True
    return tuple(table)


def nullable(g: Grammar, e: PegExpr) -> bool:
    """Can ``e`` succeed while consuming zero characters?

    Predicates count as nullable: when they succeed they consume
    nothing.  Unresolved refs are treated as non-nullable so the
    analysis stays total on grammars that have not validated yet.
    """
    table = _rule_nullability(g)

    def walk(e: PegExpr) -> bool:
        if isinstance(e, (Empty, Star, Opt, And, Not)):
            return True
        if isinstance(e, (Char, Class, AnyChar)):
            return False
        if isinstance(e, Literal):
            return e.text == ""
        if isinstance(e, Seq):
            return all(walk(p) for p in e.parts)
        if isinstance(e, Choice):
            return any(walk(a) for a in e.alts)
        if isinstance(e, Plus):
            return walk(e.body)
        if isinstance(e, Ref):
            if isinstance(e.rule, int) and 0 <= e.rule < len(table):
                return table[e.rule]
            return False
        raise TypeError(f"not a PegExpr: {e!r}")

    return walk(e)


@dataclass(frozen=True, slots=True)
class ValidationIssue:
    """One finding from :func:`validate`.

    ``path`` is the child-index trail from the rule body to the
    offending subexpression; severity is ``"error"`` or ``"warning"``.
    """

    severity: str
    code: str
    rule: str | None
    path: tuple[int, ...]
    message: str


def validate(g: Grammar) -> tuple[ValidationIssue, ...]:
    """Structural checks, in deterministic rule-then-preorder order.

    Errors: UnknownRef (ref to a missing rule), EmptyChoice (Choice or
    Seq with no elements), NullableRepetition (Star/Plus whose body can
    match empty, which would loop without consuming).  Warnings:
    UnreachableRule (never reachable from the start rule).
    """
    issues: list[ValidationIssue] = []
    nrules = len(g.rules)

    def walk(rule_name: str, e: PegExpr, path: tuple[int, ...]) -> None:
        if isinstance(e, Ref):
            target = e.rule
            known = isinstance(target, int) and 0 <= target < nrules
            if not known:
                issues.append(
                    ValidationIssue(
                        "error",
                        "UnknownRef",
                        rule_name,
                        path,
                        f"reference to unknown rule {target!r}",
                    )
                )
            return
        if isinstance(e, (Seq, Choice)):
            kids = _children(e)
            if not kids:
                kind = "Choice" if isinstance(e, Choice) else "Seq"
                issues.append(
                    ValidationIssue(
                        "error",
                        "EmptyChoice",
                        rule_name,
                        path,
                        f"{kind} with no elements",
                    )
                )
            for i, kid in enumerate(kids):
                walk(rule_name, kid, path + (i,))
            return
        if isinstance(e, (Star, Plus)):
            if nullable(g, e.body):
                op = "Star" if isinstance(e, Star) else "Plus"
                issues.append(
                    ValidationIssue(
                        "error",
                        "NullableRepetition",
                        rule_name,
                        path,
                        f"{op} body can match empty and would repeat forever",
                    )
                )
            walk(rule_name, e.body, path + (0,))
            return
        if isinstance(e, (Opt, And, Not)):
            walk(rule_name, e.body, path + (0,))

    for rule in g.rules:
        walk(rule.name, rule.body, ())

    reachable = {g.start}
    frontier = [g.start]
    while frontier:
        rid = frontier.pop()
        stack = [g.rules[rid].body]
        while stack:
            e = stack.pop()
            if isinstance(e, Ref):
                t = e.rule
                if isinstance(t, int) and 0 <= t < nrules and t not in reachable:
                    reachable.add(t)
                    frontier.append(t)
            else:
                stack.extend(_children(e))
    for rid, rule in enumerate(g.rules):
        if rid not in reachable:
            issues.append(
                ValidationIssue(
                    "warning",
                    "UnreachableRule",
                    rule.name,
                    (),
                    f"rule {rule.name!r} is not reachable from the start rule",
                )
            )

    return tuple(issues)


def validation_errors(g: Grammar) -> tuple[ValidationIssue, ...]:
    """Just the error-severity issues of :func:`validate`."""
    return tuple(i for i in validate(g) if i.severity == "error")
