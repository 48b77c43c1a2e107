"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr     := ['-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' uint)?
    base     := rational | ident | '(' expr ')'
    rational := int ('/' uint)?
    ident    := letter (letter | digit | '_')*

Implicit multiplication is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polynomial import Polynomial


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[Token]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], i))
            i = j
        elif ch.isalpha():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], i))
            i = j
        elif ch in "+-*/^()":
            tokens.append(Token("op", ch, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", *_line_col(text, i))
    tokens.append(Token("end", "", n))
    return tokens


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str, variables: Sequence[str], line_offset: int = 0, col_offset: int = 0):
        self.text = text
        self.variables = tuple(variables)
        self.tokens = _tokenize_with_offsets(text, line_offset, col_offset)
        self.i = 0
        self.line_offset = line_offset
        self.col_offset = col_offset

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        line, col = _line_col(self.text, tok.pos)
        if line == 1:
            col += self.col_offset
        raise ParseError(message, line + self.line_offset, col)

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def accept(self, op: str) -> bool:
        tok = self.peek()
        if tok.kind == "op" and tok.text == op:
            self.i += 1
            return True
        return False

    def parse(self) -> Polynomial:
        if self.peek().kind == "end":
            self.error("empty expression")
        result = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            if tok.kind in ("int", "ident") or (tok.kind == "op" and tok.text == "("):
                self.error(f"implicit multiplication is not supported before {tok.text!r}")
            self.error(f"unexpected {tok.text!r}")
        return result

    def expr(self) -> Polynomial:
        negate = self.accept("-")
        result = self.term()
        if negate:
            result = -result
        while True:
            if self.accept("+"):
                result = result + self.term()
            elif self.accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while self.accept("*"):
            result = result * self.factor()
        return result

    def factor(self) -> Polynomial:
        base = self.base()
        if self.accept("^"):
            tok = self.peek()
            if tok.kind == "op" and tok.text == "-":
                self.error("negative exponent")
            if tok.kind != "int":
                self.error("expected a non-negative integer exponent")
            self.next()
            base = base ** int(tok.text)
        return base

    def base(self) -> Polynomial:
        tok = self.next()
        if tok.kind == "int":
            value = Fraction(int(tok.text))
            if self.accept("/"):
                den = self.peek()
                if den.kind != "int":
                    self.error("expected an integer denominator")
                self.next()
                if int(den.text) == 0:
                    self.error("zero denominator", den)
                value = value / int(den.text)
            return Polynomial.constant(value, self.variables)
        if tok.kind == "ident":
            if tok.text not in self.variables:
                self.error(f"unknown identifier {tok.text!r}", tok)
            return Polynomial.var(tok.text, self.variables)
        if tok.kind == "op" and tok.text == "(":
            inner = self.expr()
            if not self.accept(")"):
                self.error("expected ')'")
            return inner
        if tok.kind == "end":
            self.error("unexpected end of expression", tok)
        self.error(f"unexpected {tok.text!r}", tok)


def _tokenize_with_offsets(text: str, line_offset: int, col_offset: int) -> list[Token]:
    try:
        return _tokenize(text)
    except ParseError as exc:
        col = exc.column + (col_offset if exc.line == 1 else 0)
        raise ParseError(exc.message, exc.line + line_offset, col) from None


def parse_expr(text: str, variables: Sequence[str], *, line: int = 1, column: int = 1) -> Polynomial:
    """Parse ``text`` into a :class:`Polynomial` over ``variables``.

    ``line``/``column`` locate the text inside a larger file for error messages.
    """
    return _Parser(text, variables, line - 1, column - 1).parse()


def parse_rational(text: str) -> Fraction:
    """Parse a constant expression such as ``-1/2`` into a Fraction."""
    p = parse_expr(text, ())
    return p.constant_term()


def parse_rational_list(text: str) -> tuple[Fraction, ...]:
    """Comma-separated rational constants, e.g. ``1/2,0,-3``."""
    items = [s for s in text.split(",")]
    if any(not s.strip() for s in items):
        raise ParseError(f"empty entry in list {text!r}")
    return tuple(parse_rational(s) for s in items)
