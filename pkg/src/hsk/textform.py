"""Concrete text format for terms and formulas.

Grammar (``->`` is right-associative; precedence ``!`` > ``&`` > ``|`` > ``->``)::

    term    := VAR | UNKNOWN | IDENT | IDENT "(" term ("," term)* ")"
    VAR     := "?" IDENT
    UNKNOWN := "*" (IDENT | NAT)
    atom    := term "=" term | IDENT | IDENT "(" term ("," term)* ")"
    formula := "!" formula | formula "&" formula | formula "|" formula
             | formula "->" formula | "exists" VAR "." formula
             | "forall" VAR "." formula | "(" formula ")"

Reserved names: ``z``, ``zh``, ``zt``, ``k``, ``kt`` (and ``z_1``, ``zh_1``, ...
for the indexed languages) are the special constants; ``s`` is the unary
successor and ``pair`` the binary pairing function.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    And,
    Application,
    Equality,
    Exists,
    Forall,
    Formula,
    FunctionSymbol,
    Implies,
    Not,
    Or,
    PAIR,
    PredApp,
    PredicateSymbol,
    SUCC,
    SpecialBase,
    Term,
    Unknown,
    Variable,
    special_constant,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line} col {column}: {message}")
        self.line = line
        self.column = column


_TOKEN_RE = re.compile(
    r"""
    (?P<WS>\s+)
  | (?P<ARROW>->)
  | (?P<NAT>[0-9]+)
  | (?P<IDENT>[A-Za-z][A-Za-z0-9_\#@]*)
  | (?P<PUNCT>[()=,.&|!*?])
    """,
    re.VERBOSE,
)

_SPECIAL_RE = re.compile(r"^(zh|zt|kt|z|k)(?:_([0-9]+))?$")
_SPECIAL_BY_TOKEN = {b.value: b for b in SpecialBase}


@dataclass(frozen=True)
class _Token:
    kind: str  # ARROW | NAT | IDENT | one of the punct characters | EOF
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group(0)
        kind = m.lastgroup or ""
        if kind == "PUNCT":
            kind = chunk
        if kind != "WS":
            tokens.append(_Token(kind, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


def special_of_name(name: str) -> FunctionSymbol | None:
    """The special constant a reserved name denotes, or None."""
    m = _SPECIAL_RE.match(name)
    if m is None:
        return None
    base = _SPECIAL_BY_TOKEN[m.group(1)]
    index = int(m.group(2)) if m.group(2) is not None else 0
    if m.group(2) is not None and index == 0:
        return None  # `z_0` is rejected later; the plain form spells index 0
    return special_constant(base, index)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.fn_arity: dict[str, int] = {}
        self.pred_arity: dict[str, int] = {}

    # -- token plumbing

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}",
                             tok.line, tok.column)
        return self.next()

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    # -- symbol table

    def _function_symbol(self, name: str, arity: int, tok: _Token) -> FunctionSymbol:
        if re.match(r"^(zh|zt|kt|z|k)_0$", name):
            raise ParseError("special constant index 0 is spelled without suffix",
                             tok.line, tok.column)
        sym = special_of_name(name)
        if sym is not None:
            if arity != 0:
                raise ParseError(f"special constant {name} takes no arguments",
                                 tok.line, tok.column)
            return sym
        if name == SUCC.name:
            if arity != 1:
                raise ParseError("reserved function s takes exactly 1 argument",
                                 tok.line, tok.column)
            return SUCC
        if name == PAIR.name:
            if arity != 2:
                raise ParseError("reserved function pair takes exactly 2 arguments",
                                 tok.line, tok.column)
            return PAIR
        if name in self.pred_arity:
            raise ParseError(f"{name} already used as a predicate", tok.line, tok.column)
        seen = self.fn_arity.setdefault(name, arity)
        if seen != arity:
            raise ParseError(
                f"arity mismatch for {name}: first seen with {seen}, now {arity}",
                tok.line, tok.column)
        return FunctionSymbol(name, arity)

    def _predicate_symbol(self, name: str, arity: int, tok: _Token) -> PredicateSymbol:
        if special_of_name(name) is not None or name in (SUCC.name, PAIR.name):
            raise ParseError(f"{name} is a reserved function name", tok.line, tok.column)
        if name in self.fn_arity:
            raise ParseError(f"{name} already used as a function", tok.line, tok.column)
        seen = self.pred_arity.setdefault(name, arity)
        if seen != arity:
            raise ParseError(
                f"arity mismatch for {name}: first seen with {seen}, now {arity}",
                tok.line, tok.column)
        return PredicateSymbol(name, arity)

    # -- terms

    def parse_variable(self) -> Variable:
        self.expect("?")
        tok = self.expect("IDENT")
        return Variable(tok.text)

    def parse_unknown(self) -> Unknown:
        self.expect("*")
        tok = self.peek()
        if tok.kind == "NAT":
            self.next()
            return Unknown(int(tok.text))
        if tok.kind == "IDENT":
            self.next()
            return Unknown(tok.text)
        raise self.error("expected an index or name after '*'")

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "?":
            return self.parse_variable()
        if tok.kind == "*":
            return self.parse_unknown()
        if tok.kind == "IDENT":
            self.next()
            args = self._parse_optional_args()
            symbol = self._function_symbol(tok.text, len(args), tok)
            return Application(symbol, tuple(args))
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def _parse_optional_args(self) -> list[Term]:
        if self.peek().kind != "(":
            return []
        self.next()
        args = [self.parse_term()]
        while self.peek().kind == ",":
            self.next()
            args.append(self.parse_term())
        self.expect(")")
        return args

    # -- formulas

    def parse_formula(self) -> Formula:
        if self.peek().kind == "IDENT" and self.peek().text in ("exists", "forall"):
            return self._parse_quantifier()
        lhs = self.parse_or()
        if self.peek().kind == "ARROW":
            self.next()
            rhs = self.parse_formula()  # right-associative
            return Implies(lhs, rhs)
        return lhs

    def _parse_quantifier(self) -> Formula:
        tok = self.next()
        var = self.parse_variable()
        self.expect(".")
        body = self.parse_formula()
        return Exists(var, body) if tok.text == "exists" else Forall(var, body)

    def parse_or(self) -> Formula:
        out = self.parse_and()
        while self.peek().kind == "|":
            self.next()
            out = Or(out, self.parse_and())
        return out

    def parse_and(self) -> Formula:
        out = self.parse_unary()
        while self.peek().kind == "&":
            self.next()
            out = And(out, self.parse_unary())
        return out

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "IDENT" and tok.text in ("exists", "forall"):
            return self._parse_quantifier()
        if tok.kind == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        return self.parse_atom()

    def parse_atom(self) -> Formula:
        tok = self.peek()
        if tok.kind in ("?", "*"):
            lhs = self.parse_term()
            self.expect("=")
            return Equality(lhs, self.parse_term())
        if tok.kind != "IDENT":
            raise self.error(f"expected an atom, found {tok.text or 'end of input'!r}")
        self.next()
        args = self._parse_optional_args()
        if self.peek().kind == "=":
            self.next()
            symbol = self._function_symbol(tok.text, len(args), tok)
            return Equality(Application(symbol, tuple(args)), self.parse_term())
        return PredApp(self._predicate_symbol(tok.text, len(args), tok), tuple(args))


def parse_formula(text: str) -> Formula:
    """Parse one formula; reports syntax errors with line/column."""
    parser = _Parser(text)
    formula = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return formula


def parse_term(text: str) -> Term:
    parser = _Parser(text)
    term = parser.parse_term()
    tok = parser.peek()
    if tok.kind != "EOF":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    return term


# ---------------------------------------------------------------------------
# Printing

_LEVEL_IMPLIES, _LEVEL_OR, _LEVEL_AND, _LEVEL_NOT = 0, 1, 2, 3


def print_term(t: Term) -> str:
    if isinstance(t, Variable):
        return f"?{t.name}"
    if isinstance(t, Unknown):
        return f"*{t.index}"
    if isinstance(t, Application):
        if not t.args:
            return t.symbol.name
        return f"{t.symbol.name}({', '.join(print_term(a) for a in t.args)})"
    raise ValueError(f"not a term: {t!r}")


def _print(f: Formula, level: int) -> str:
    if isinstance(f, Equality):
        return f"{print_term(f.lhs)} = {print_term(f.rhs)}"
    if isinstance(f, PredApp):
        if not f.args:
            return f.symbol.name
        return f"{f.symbol.name}({', '.join(print_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return _wrap(f"!{_print(f.body, _LEVEL_NOT)}", _LEVEL_NOT, level)
    if isinstance(f, And):
        text = f"{_print(f.lhs, _LEVEL_AND)} & {_print(f.rhs, _LEVEL_AND + 1)}"
        return _wrap(text, _LEVEL_AND, level)
    if isinstance(f, Or):
        text = f"{_print(f.lhs, _LEVEL_OR)} | {_print(f.rhs, _LEVEL_OR + 1)}"
        return _wrap(text, _LEVEL_OR, level)
    if isinstance(f, Implies):
        text = f"{_print(f.lhs, _LEVEL_IMPLIES + 1)} -> {_print(f.rhs, _LEVEL_IMPLIES)}"
        return _wrap(text, _LEVEL_IMPLIES, level)
    if isinstance(f, (Exists, Forall)):
        word = "exists" if isinstance(f, Exists) else "forall"
        text = f"{word} ?{f.var.name}. {_print(f.body, _LEVEL_IMPLIES)}"
        return _wrap(text, _LEVEL_IMPLIES, level)
    raise ValueError(f"not a formula: {f!r}")


def _wrap(text: str, own: int, required: int) -> str:
    return f"({text})" if own < required else text


def print_formula(f: Formula) -> str:
    """Render f with minimal parentheses; parse(print_formula(f)) == f."""
    return _print(f, _LEVEL_IMPLIES)
