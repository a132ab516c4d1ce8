"""Complex-valued scalar expressions in t.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := atom ('^' unary)?          # right-associative
    atom    := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are the variable ``t``, the constants ``i`` and ``pi``, the functions
sin, cos, exp, sqrt, abs, and any extra constants supplied at evaluation
time.  Every error carries the byte offset where it was detected.
"""
from __future__ import annotations

import cmath
import re
from dataclasses import dataclass

from .errors import DivisionByZero, ExpressionSyntaxError, UnknownFunction, UnknownIdentifier

FUNCTIONS = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "exp": cmath.exp,
    "sqrt": cmath.sqrt,
    "abs": lambda z: complex(abs(z)),
}
CONSTANTS = {"i": 1j, "pi": complex(cmath.pi)}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(.))")


@dataclass(frozen=True)
class Num:
    value: complex
    pos: int = 0


@dataclass(frozen=True)
class Name:
    name: str
    pos: int = 0


@dataclass(frozen=True)
class Neg:
    operand: "ExpressionAst"
    pos: int = 0


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExpressionAst"
    right: "ExpressionAst"
    pos: int = 0


@dataclass(frozen=True)
class Call:
    func: str
    arg: "ExpressionAst"
    pos: int = 0


ExpressionAst = Num | Name | Neg | BinOp | Call


def _tokenize(src: str):
    toks = []
    pos = 0
    # byte offsets: the grammar is ASCII, anything else is rejected below
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", m.group(1), start))
        elif m.group(2):
            toks.append(("name", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExpressionSyntaxError(f"unexpected character {ch!r}", len(src[:start].encode()))
            toks.append(("op", ch, start))
        pos = m.end()
    toks.append(("end", "", len(src)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.k = 0

    def offset(self, pos):
        return len(self.src[:pos].encode())

    def peek(self):
        return self.toks[self.k]

    def take(self):
        tok = self.toks[self.k]
        self.k += 1
        return tok

    def expect(self, ch):
        kind, val, pos = self.take()
        if val != ch or kind != "op":
            raise ExpressionSyntaxError(f"expected {ch!r}", self.offset(pos))

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", self.offset(pos))
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.term(), self.offset(pos))
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            node = BinOp(op, node, self.unary(), self.offset(pos))
        return node

    def unary(self):
        kind, val, pos = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            operand = self.unary()
            return Neg(operand, self.offset(pos)) if val == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary(), self.offset(pos))
        return base

    def atom(self):
        kind, val, pos = self.take()
        off = self.offset(pos)
        if kind == "num":
            return Num(complex(float(val)), off)
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                if val not in FUNCTIONS:
                    raise UnknownFunction(f"unknown function {val!r}", off)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Call(val, arg, off)
            return Name(val, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"unexpected {what}", off)


def parse_expression(src: str) -> ExpressionAst:
    if not isinstance(src, str):
        raise ExpressionSyntaxError("expression must be a string", 0)
    return _Parser(src).parse()


def free_names(ast: ExpressionAst) -> set:
    if isinstance(ast, Name):
        return {ast.name}
    if isinstance(ast, Neg):
        return free_names(ast.operand)
    if isinstance(ast, BinOp):
        return free_names(ast.left) | free_names(ast.right)
    if isinstance(ast, Call):
        return free_names(ast.arg)
    return set()


def eval_expression(ast: ExpressionAst, t: float = 0.0, env: dict | None = None) -> complex:
    """Evaluate at time t; ``env`` supplies extra named constants."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Name):
        if ast.name == "t":
            return complex(t)
        if env and ast.name in env:
            return complex(env[ast.name])
        if ast.name in CONSTANTS:
            return CONSTANTS[ast.name]
        raise UnknownIdentifier(f"unknown identifier {ast.name!r}", ast.pos)
    if isinstance(ast, Neg):
        # subtract from zero so -1 stays on the principal branch cut of sqrt
        return 0j - eval_expression(ast.operand, t, env)
    if isinstance(ast, Call):
        return FUNCTIONS[ast.func](eval_expression(ast.arg, t, env))
    a = eval_expression(ast.left, t, env)
    b = eval_expression(ast.right, t, env)
    if ast.op == "+":
        return a + b
    if ast.op == "-":
        return a - b
    if ast.op == "*":
        return a * b
    if ast.op == "/":
        if b == 0:
            raise DivisionByZero("division by zero", ast.pos)
        return a / b
    if a == 0 and (b.real < 0 or (b.real == 0 and b.imag != 0)):
        raise DivisionByZero("zero raised to a non-positive power", ast.pos)
    if b.imag == 0 and b.real == int(b.real) and abs(b.real) <= 64:
        # integer powers by repeated multiplication keep real inputs real
        return a ** int(b.real)
    return a ** b


def _num_src(z: complex) -> str:
    re_, im = z.real, z.imag
    if im == 0:
        return repr(re_)
    return f"({repr(re_)}+{repr(im)}*i)"


def to_source(ast: ExpressionAst) -> str:
    """Fully parenthesised source text that parses back to an equivalent tree."""
    if isinstance(ast, Num):
        return _num_src(ast.value)
    if isinstance(ast, Name):
        return ast.name
    if isinstance(ast, Neg):
        return f"(-{to_source(ast.operand)})"
    if isinstance(ast, Call):
        return f"{ast.func}({to_source(ast.arg)})"
    return f"({to_source(ast.left)}{ast.op}{to_source(ast.right)})"


def compile_expression(src, env: dict | None = None):
    """Parse once and return f(t) -> complex.  Numbers are accepted as constants."""
    if isinstance(src, (int, float, complex)) and not isinstance(src, bool):
        value = complex(src)
        return lambda t: value
    ast = parse_expression(src)
    unknown = free_names(ast) - {"t"} - set(CONSTANTS) - set(env or {})
    if unknown:
        name = sorted(unknown)[0]
        raise UnknownIdentifier(f"unknown identifier {name!r}", _first_pos(ast, name))
    return lambda t: eval_expression(ast, t, env)


def _first_pos(ast, name):
    if isinstance(ast, Name) and ast.name == name:
        return ast.pos
    for child in (getattr(ast, "operand", None), getattr(ast, "left", None),
                  getattr(ast, "right", None), getattr(ast, "arg", None)):
        if child is not None:
            p = _first_pos(child, name)
            if p is not None:
                return p
    return None
