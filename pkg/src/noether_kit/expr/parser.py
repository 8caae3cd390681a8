"""Pratt parser for the expression grammar.

Binding powers, loosest first: ``+ -`` (left), ``* /`` (left), unary ``-``,
``^`` (right).  A unary minus is accepted directly after ``^`` so that
``x^-2`` reads as ``x^(-2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .nodes import Add, Expr, ExprError, Func, Mul, Num, Pow, Sym
from .normal import canonical
from .symbols import SymbolTable

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_ARITY_ONE = ("exp", "log", "sin", "cos", "sqrt")
_BP = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_BP = 30


class ParseError(ExprError):
    def __init__(self, message: str, position: int, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m or m.end() == pos:
            bad = len(src[pos:]) - len(src[pos:].lstrip())
            raise ParseError(f"unexpected character {src[pos + bad]!r}", pos + bad, src)
        kind = m.lastgroup
        out.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(_Tok("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str, ctx: SymbolTable):
        self.src = src
        self.ctx = ctx
        self.toks = tokenize(src)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.advance()
        if tok.text != text:
            found = tok.text or "end of input"
            raise ParseError(f"expected {text!r}, found {found!r}", tok.pos, self.src)
        return tok

    def expression(self, rbp: int = 0) -> Expr:
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BP or _BP[tok.text] <= rbp:
                break
            self.advance()
            if tok.text == "^":
                # right associative
                right = self.expression(_BP["^"] - 1)
                left = Pow(left, self.constant_exponent(right, tok.pos))
            else:
                right = self.expression(_BP[tok.text])
                if tok.text == "+":
                    left = Add((left, right))
                elif tok.text == "-":
                    left = Add((left, Mul((Num(-1), right))))
                elif tok.text == "*":
                    left = Mul((left, right))
                else:
                    left = Mul((left, Pow(right, -1)))
        return left

    def constant_exponent(self, e: Expr, pos: int) -> Fraction:
        c = canonical(e)
        if not isinstance(c, Num):
            raise ParseError("exponent must be a rational constant", pos, self.src)
        return c.value

    def prefix(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Num(Fraction(tok.text))
        if tok.kind == "name":
            if self.peek().text == "(":
                return self.call(tok)
            sym = self.ctx.lookup(tok.text)
            if sym is None:
                raise ParseError(f"undeclared identifier {tok.text!r}", tok.pos, self.src)
            return Sym(sym)
        if tok.text == "-":
            return Mul((Num(-1), self.expression(_UNARY_BP)))
        if tok.text == "+":
            return self.expression(_UNARY_BP)
        if tok.text == "(":
            inner = self.expression(0)
            self.expect(")")
            return inner
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.pos, self.src)

    def call(self, name: _Tok) -> Expr:
        if name.text not in _ARITY_ONE:
            raise ParseError(f"unknown function {name.text!r}", name.pos, self.src)
        self.expect("(")
        args = []
        if self.peek().text != ")":
            args.append(self.expression(0))
            while self.peek().text == ",":
                self.advance()
                args.append(self.expression(0))
        self.expect(")")
        if len(args) != 1:
            raise ParseError(
                f"{name.text} expects 1 argument, got {len(args)}", name.pos, self.src)
        if name.text == "sqrt":
            return Pow(args[0], Fraction(1, 2))
        return Func(name.text, args[0])


def parse_raw(src: str, ctx: SymbolTable) -> Expr:
    p = _Parser(src, ctx)
    if p.peek().kind == "end":
        raise ParseError("empty expression", 0, src)
    e = p.expression(0)
    tok = p.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.text!r}", tok.pos, src)
    return e


def parse(src: str, ctx: SymbolTable) -> Expr:
    e = parse_raw(src, ctx)
    try:
        return canonical(e)
    except ParseError:
        raise
    except ExprError as exc:
        raise ParseError(str(exc), 0, src) from exc
