"""Text grammar for ring elements, polynomials and vector-polynomials.

Literals: a decimal integer ``n`` denotes ``n*1`` in the ring, ``t`` and
``a<i>`` are the generators of an extension ring, ``[i]`` is a raw canonical
index (the only way to name most elements of a product ring).  Variables are
``x<i>``; a bare ``x`` means ``x1``.  Operators ``+ - * ^`` with parentheses.
"""
from __future__ import annotations

import re

from .errors import ParseError, RingError
from .poly import MultiPoly
from .ring import Ring

_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(x)|(t)|a(\d+)|\[(\d+)\]|([-+*^(),]))")


def _tokenize(text: str) -> list[tuple[str, object]]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        num, xi, xbare, t, ai, idx, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif xi is not None:
            out.append(("var", int(xi)))
        elif xbare is not None:
            out.append(("var", 1))
        elif t is not None:
            out.append(("gen", "t"))
        elif ai is not None:
            out.append(("gen", f"a{ai}"))
        elif idx is not None:
            out.append(("idx", int(idx)))
        else:
            out.append(("op", op))
    return out


class _Parser:
    def __init__(self, ring: Ring, tokens, nvars: int):
        self.R, self.toks, self.k, self.i = ring, tokens, nvars, 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op: str) -> None:
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def expr(self) -> MultiPoly:
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            acc = self.term()
            if val == "-":
                acc = -acc
        else:
            acc = self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> MultiPoly:
        acc = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> MultiPoly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer")
            base = base ** val
        return base

    def atom(self) -> MultiPoly:
        kind, val = self.take()
        R, k = self.R, self.k
        try:
            if kind == "num":
                return MultiPoly.const(R, k, R.from_int(val))
            if kind == "var":
                if not 1 <= val <= k:
                    raise ParseError(f"x{val} is outside the {k} declared variables")
                return MultiPoly.var(R, k, val)
            if kind == "gen":
                return MultiPoly.const(R, k, R.generator(val))
            if kind == "idx":
                if val >= R.size:
                    raise ParseError(f"[{val}] out of range for {R.name}")
                return MultiPoly.const(R, k, val)
        except RingError as e:
            raise ParseError(str(e)) from None
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and val == "-":
            return -self.factor()
        raise ParseError(f"unexpected token {val!r}")


def _max_var(tokens) -> int:
    return max((v for kind, v in tokens if kind == "var"), default=0)


def parse_poly(ring: Ring, text: str, nvars: int | None = None) -> MultiPoly:
    """Parse a polynomial; ``nvars`` defaults to the largest variable index used."""
    toks = _tokenize(text)
    if not toks:
        raise ParseError("empty polynomial")
    k = _max_var(toks) if nvars is None else nvars
    p = _Parser(ring, toks, k)
    out = p.expr()
    if p.i != len(toks):
        raise ParseError(f"trailing input in {text!r}")
    return out


def parse_element(ring: Ring, text: str) -> int:
    p = parse_poly(ring, text, 0)
    return p.constant_term


def split_top_level(text: str) -> list[str]:
    """Split ``"(p1, p2, ...)"`` (outer parentheses optional) at depth-0 commas."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += ch == "("
            depth -= ch == ")"
            if depth == 0 and i < len(s) - 1:
                break
        else:
            s = s[1:-1]
    parts, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parentheses")
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError("unbalanced parentheses")
    parts.append("".join(cur))
    if any(not p.strip() for p in parts):
        raise ParseError(f"empty component in {text!r}")
    return parts


def parse_vec(ring: Ring, text: str, n: int | None = None) -> list[MultiPoly]:
    """Parse a vector-polynomial; every component lives in n variables."""
    parts = split_top_level(text)
    if n is None:
        n = len(parts)
    if len(parts) != n:
        raise ParseError(f"expected {n} components, got {len(parts)}")
    return [parse_poly(ring, p, n) for p in parts]
