"""Textual grammar notation: a loader and a formatter.

Grammar files are rule definitions terminated by semicolons::

    # line comment
    @start Additive ;
    Additive  <- Multitive '+' Additive / Multitive ;
    Multitive <- Primary '*' Multitive / Primary ;
    Primary   <- '(' Additive ')' / Decimal ;
    Decimal   <- [0-9] ;

Juxtaposition is sequencing, ``/`` is ordered choice, ``* + ?`` are
greedy postfix repetition, ``& !`` are prefix lookahead predicates,
``'c'`` is a character, ``"str"`` a literal string, ``[a-z0-9]`` a
character class, ``.`` any character, ``()`` the empty expression, and
parentheses group.  Escapes ``\\n \\r \\t \\\\ \\' \\" \\[ \\] \\-``
and ``\\xHH`` work inside quotes and classes.  The start rule is the
first rule unless ``@start`` says otherwise.

:func:`load_grammar` reports syntax problems with line and column and
refuses grammars with validation errors; :func:`format_grammar` renders
a grammar back to this notation so that reloading yields a structurally
equal grammar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammar import (
    ANY,
    EMPTY,
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
    Rule,
    Seq,
    Star,
    ValidationIssue,
    make_grammar,
    validation_errors,
)


class GrammarSyntaxError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class GrammarValidationError(Exception):
    def __init__(self, issues: tuple[ValidationIssue, ...]):
        lines = [f"{i.code} in rule {i.rule!r}: {i.message}" for i in issues]
        super().__init__("grammar failed validation:\n  " + "\n  ".join(lines))
        self.issues = issues


_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_CONT = _IDENT_START | set("0123456789")

_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "\\": "\\", "'": "'", '"': '"',
            "[": "[", "]": "]", "-": "-"}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    value: object
    line: int
    col: int


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str, line: int | None = None, col: int | None = None):
        raise GrammarSyntaxError(
            message, self.line if line is None else line, self.col if col is None else col
        )

    def _advance(self, c: str) -> None:
        if c == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        self.pos += 1

    def _take(self) -> str:
        c = self.text[self.pos]
        self._advance(c)
        return c

    def _skip_blank(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c in " \t\r\n":
                self._advance(c)
            elif c == "#":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance(self.text[self.pos])
            else:
                return

    def _escape(self) -> str:
        # positioned just after the backslash
        if self.pos >= len(self.text):
            self.error("escape at end of input")
        c = self._take()
        if c in _ESCAPES:
            return _ESCAPES[c]
        if c == "x":
            if self.pos + 2 > len(self.text):
                self.error("truncated \\x escape")
            hh = self.text[self.pos] + self.text[self.pos + 1]
            try:
                code = int(hh, 16)
            except ValueError:
                self.error(f"bad \\x escape {hh!r}")
            self._take()
            self._take()
            return chr(code)
        self.error(f"unknown escape \\{c}")
        raise AssertionError  # unreachable

    def _quoted(self, quote: str, line: int, col: int) -> str:
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated quoted literal", line, col)
            c = self._take()
            if c == quote:
                return "".join(out)
            if c == "\n":
                self.error("newline inside quoted literal", line, col)
            if c == "\\":
                out.append(self._escape())
            else:
                out.append(c)

    def _charclass(self, line: int, col: int) -> frozenset[str]:
        items: list[str] = []

        def read_one() -> str:
            if self.pos >= len(self.text):
                self.error("unterminated character class", line, col)
            c = self._take()
            if c == "\n":
                self.error("newline inside character class", line, col)
            if c == "\\":
                return self._escape()
            return c

        members: set[str] = set()
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated character class", line, col)
            if self.text[self.pos] == "]":
                self._take()
                members.update(items)
                return frozenset(members)
            c = read_one()
            # 'a-z' forms a range; a literal '-' must be escaped
            if (
                c != "-"
                and self.pos + 1 < len(self.text)
                and self.text[self.pos] == "-"
                and self.text[self.pos + 1] != "]"
            ):
                self._take()
                hi = read_one()
                if ord(hi) < ord(c):
                    self.error(f"reversed range {c!r}-{hi!r} in character class")
                members.update(chr(o) for o in range(ord(c), ord(hi) + 1))
            else:
                items.append(c)

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        while True:
            self._skip_blank()
            if self.pos >= len(self.text):
                out.append(_Token("eof", None, self.line, self.col))
                return out
            line, col = self.line, self.col
            c = self._take()
            if c in _IDENT_START:
                name = [c]
                while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CONT:
                    name.append(self._take())
                out.append(_Token("ident", "".join(name), line, col))
            elif c == "@":
                name = []
                while self.pos < len(self.text) and self.text[self.pos] in _IDENT_CONT:
                    name.append(self._take())
                out.append(_Token("directive", "".join(name), line, col))
            elif c == "<":
                if self.pos < len(self.text) and self.text[self.pos] == "-":
                    self._take()
                    out.append(_Token("arrow", "<-", line, col))
                else:
                    self.error("expected '<-'", line, col)
            elif c == "'":
                out.append(_Token("charlit", self._quoted("'", line, col), line, col))
            elif c == '"':
                out.append(_Token("strlit", self._quoted('"', line, col), line, col))
            elif c == "[":
                out.append(_Token("class", self._charclass(line, col), line, col))
            elif c in "/*+?&!().;":
                kinds = {
                    "/": "slash", "*": "star", "+": "plus", "?": "quest",
                    "&": "amp", "!": "bang", "(": "lparen", ")": "rparen",
                    ".": "dot", ";": "semi",
                }
                out.append(_Token(kinds[c], c, line, col))
            else:
                self.error(f"unexpected character {c!r}", line, col)


_PRIMARY_STARTS = {"ident", "charlit", "strlit", "class", "dot", "lparen", "amp", "bang"}


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.i = 0
        self.ref_sites: list[tuple[str, int, int]] = []

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        t = tok or self.tok
        raise GrammarSyntaxError(message, t.line, t.col)

    def eat(self, kind: str, what: str) -> _Token:
        t = self.tok
        if t.kind != kind:
            self.error(f"expected {what}, found {t.value!r}" if t.kind != "eof"
                       else f"expected {what}, found end of input")
        self.i += 1
        return t

    def parse_file(self) -> tuple[list[tuple[str, PegExpr]], str | None]:
        rules: list[tuple[str, PegExpr]] = []
        seen: dict[str, _Token] = {}
        start: str | None = None
        while self.tok.kind != "eof":
            if self.tok.kind == "directive":
                t = self.tok
                self.i += 1
                if t.value != "start":
                    self.error(f"unknown directive @{t.value}", t)
                if start is not None:
                    self.error("duplicate @start directive", t)
                start = str(self.eat("ident", "a rule name").value)
                self.eat("semi", "';'")
                continue
            name_tok = self.eat("ident", "a rule name")
            name = str(name_tok.value)
            if name in seen:
                self.error(f"duplicate rule name {name!r}", name_tok)
            seen[name] = name_tok
            self.eat("arrow", "'<-'")
            body = self.parse_expr()
            self.eat("semi", "';'")
            rules.append((name, body))
        if not rules:
            self.error("no rules defined")
        if start is not None and start not in seen:
            self.error(f"@start names unknown rule {start!r}")
        for name, line, col in self.ref_sites:
            if name not in seen:
                raise GrammarSyntaxError(f"reference to unknown rule {name!r}", line, col)
        return rules, start

    def parse_expr(self) -> PegExpr:
        alts = [self.parse_seq()]
        while self.tok.kind == "slash":
            self.i += 1
            alts.append(self.parse_seq())
        return alts[0] if len(alts) == 1 else Choice(tuple(alts))

    def parse_seq(self) -> PegExpr:
        parts = [self.parse_prefix()]
        while self.tok.kind in _PRIMARY_STARTS:
            parts.append(self.parse_prefix())
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))

    def parse_prefix(self) -> PegExpr:
        if self.tok.kind == "amp":
            self.i += 1
            return And(self.parse_prefix())
        if self.tok.kind == "bang":
            self.i += 1
            return Not(self.parse_prefix())
        return self.parse_suffix()

    def parse_suffix(self) -> PegExpr:
        e = self.parse_primary()
        while self.tok.kind in ("star", "plus", "quest"):
            kind = self.tok.kind
            self.i += 1
            e = Star(e) if kind == "star" else Plus(e) if kind == "plus" else Opt(e)
        return e

    def parse_primary(self) -> PegExpr:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            self.ref_sites.append((str(t.value), t.line, t.col))
            return Ref(str(t.value))
        if t.kind == "charlit":
            self.i += 1
            text = str(t.value)
            return Char(text) if len(text) == 1 else Literal(text)
        if t.kind == "strlit":
            self.i += 1
            return Literal(str(t.value))
        if t.kind == "class":
            self.i += 1
            chars = t.value
            assert isinstance(chars, frozenset)
            if not chars:
                self.error("empty character class", t)
            return Class(chars)
        if t.kind == "dot":
            self.i += 1
            return ANY
        if t.kind == "lparen":
            self.i += 1
            if self.tok.kind == "rparen":
                self.i += 1
                return EMPTY
            e = self.parse_expr()
            self.eat("rparen", "')'")
            return e
        self.error("expected an expression")
        raise AssertionError  # unreachable


def parse_grammar(text: str) -> Grammar:
    """Parse grammar notation without semantic validation.

    Raises :class:`GrammarSyntaxError` with line/column on malformed
    input; the result may still carry validation issues (see
    :func:`pegkit.grammar.validate`).
    """
    tokens = _Scanner(text).tokens()
    rules, start = _Parser(tokens).parse_file()
    return make_grammar(rules, start=start)


def load_grammar(text: str) -> Grammar:
    """Parse grammar notation into a validated :class:`Grammar`.

    Raises :class:`GrammarSyntaxError` with line/column on malformed
    input and :class:`GrammarValidationError` when the parsed grammar
    has error-severity validation issues.
    """
    g = parse_grammar(text)
    errors = validation_errors(g)
    if errors:
        raise GrammarValidationError(errors)
    return g


_CHOICE, _SEQ, _PREFIX, _SUFFIX, _ATOM = range(5)


def _escape_text(text: str, specials: str) -> str:
    out = []
    for c in text:
        if c == "\\" or c in specials:
            out.append("\\" + c)
        elif c == "\n":
            out.append("\\n")
        elif c == "\r":
            out.append("\\r")
        elif c == "\t":
            out.append("\\t")
        elif c.isprintable():
            out.append(c)
        else:
            out.append(f"\\x{ord(c):02x}")
    return "".join(out)


def _render_class(chars: frozenset[str]) -> str:
    ordered = sorted(chars)
    out = []
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and ord(ordered[j + 1]) == ord(ordered[j]) + 1:
            j += 1
        if j - i >= 2:
            out.append(_escape_text(ordered[i], "[]-") + "-" + _escape_text(ordered[j], "[]-"))
            i = j + 1
        else:
            out.append(_escape_text(ordered[i], "[]-"))
            i += 1
    return "[" + "".join(out) + "]"


def render_expr(e: PegExpr, names: tuple[str, ...] = ()) -> str:
    """Render one expression; ``names`` supplies rule names for refs."""
    return _render(e, names, _CHOICE)


def _render(e: PegExpr, names: tuple[str, ...], level: int) -> str:
    text, mine = _render_inner(e, names)
    if mine < level:
        return "(" + text + ")"
    return text


def _render_inner(e: PegExpr, names: tuple[str, ...]) -> tuple[str, int]:
    if isinstance(e, Empty):
        return "()", _ATOM
    if isinstance(e, AnyChar):
        return ".", _ATOM
    if isinstance(e, Char):
        return "'" + _escape_text(e.char, "'") + "'", _ATOM
    if isinstance(e, Literal):
        return '"' + _escape_text(e.text, '"') + '"', _ATOM
    if isinstance(e, Class):
        return _render_class(e.chars), _ATOM
    if isinstance(e, Ref):
        if isinstance(e.rule, int) and 0 <= e.rule < len(names):
            return names[e.rule], _ATOM
        return str(e.rule), _ATOM
    if isinstance(e, Seq):
        return " ".join(_render(p, names, _PREFIX) for p in e.parts), _SEQ
    if isinstance(e, Choice):
        return " / ".join(_render(a, names, _SEQ) for a in e.alts), _CHOICE
    if isinstance(e, And):
        return "&" + _render(e.body, names, _PREFIX), _PREFIX
    if isinstance(e, Not):
        return "!" + _render(e.body, names, _PREFIX), _PREFIX
    if isinstance(e, Star):
        return _render(e.body, names, _ATOM) + "*", _SUFFIX
    if isinstance(e, Plus):
        return _render(e.body, names, _ATOM) + "+", _SUFFIX
    if isinstance(e, Opt):
        return _render(e.body, names, _ATOM) + "?", _SUFFIX
    raise TypeError(f"not a PegExpr: {e!r}")


def format_grammar(g: Grammar) -> str:
    """Render a grammar so that :func:`load_grammar` reproduces it."""
    names = g.names
    width = max(len(n) for n in names)
    lines = []
    if g.start != 0:
        lines.append(f"@start {names[g.start]} ;")
    for rule in g.rules:
        lines.append(f"{rule.name.ljust(width)} <- {render_expr(rule.body, names)} ;")
    return "\n".join(lines) + "\n"
