"""Recursive-descent parser and evaluator for real functions of one variable t.

Grammar (whitespace insensitive)::

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := unary ('^' factor)?          -- '^' is right-associative
    unary   := '-' unary | primary
    primary := number | 't' | ident '(' expr (',' expr)? ')' | '(' expr ')'

Numbers are decimal literals with an optional exponent.  The callable set is
fixed: abs, sqrt, exp, log, sin, cos take one argument; min, max take two.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Union

from .errors import ChoquetKitError

__all__ = [
    "ParseError",
    "EvalError",
    "ExprAst",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse",
    "evaluate",
    "to_text",
    "sample",
    "evaluator",
]

UNARY_FUNCTIONS = ("abs", "sqrt", "exp", "log", "sin", "cos")
BINARY_FUNCTIONS = ("min", "max")

_NUMBER_RE = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT_RE = re.compile(r"[A-Za-z]+")


class ParseError(ChoquetKitError, ValueError):
    """Syntax error with the byte offset of the first violation."""

    def __init__(self, offset: int, expected: str):
        super().__init__(f"expected {expected} at offset {offset}")
        self.offset = offset
        self.expected = expected


class EvalError(ChoquetKitError, ValueError):
    """Domain fault during evaluation, tied to the offending AST node."""

    def __init__(self, offset: int, reason: str, at: float | None = None):
        where = f" at t={at!r}" if at is not None else ""
        super().__init__(f"{reason} (node at offset {offset}){where}")
        self.offset = offset
        self.reason = reason
        self.at = at


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "ExprAst"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "ExprAst"
    right: "ExprAst"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["ExprAst", ...]
    offset: int = field(default=0, compare=False)


ExprAst = Union[Num, Var, Neg, BinOp, Call]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, ch: str) -> None:
        if self.peek() != ch:
            raise ParseError(self.pos, f"'{ch}'")
        self.pos += 1

    def parse(self) -> ExprAst:
        node = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise ParseError(self.pos, "end of input")
        return node

    def expr(self) -> ExprAst:
        node = self.term()
        while self.peek() in ("+", "-"):
            offset = self.pos
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term(), offset=offset)
        return node

    def term(self) -> ExprAst:
        node = self.factor()
        while self.peek() in ("*", "/"):
            offset = self.pos
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.factor(), offset=offset)
        return node

    def factor(self) -> ExprAst:
        node = self.unary()
        if self.peek() == "^":
            offset = self.pos
            self.pos += 1
            node = BinOp("^", node, self.factor(), offset=offset)
        return node

    def unary(self) -> ExprAst:
        if self.peek() == "-":
            offset = self.pos
            self.pos += 1
            return Neg(self.unary(), offset=offset)
        return self.primary()

    def primary(self) -> ExprAst:
        ch = self.peek()
        offset = self.pos
        if ch == "(":
            self.pos += 1
            node = self.expr()
            self.take(")")
            return node
        number = _NUMBER_RE.match(self.text, self.pos)
        if number:
            self.pos = number.end()
            return Num(float(number.group()), offset=offset)
        ident = _IDENT_RE.match(self.text, self.pos)
        if ident:
            name = ident.group()
            self.pos = ident.end()
            if name == "t":
                return Var(offset=offset)
            if name in UNARY_FUNCTIONS or name in BINARY_FUNCTIONS:
                self.take("(")
                args = [self.expr()]
                if self.peek() == ",":
                    self.pos += 1
                    args.append(self.expr())
                self.take(")")
                want = 2 if name in BINARY_FUNCTIONS else 1
                if len(args) != want:
                    raise ParseError(offset, f"{want} argument(s) for {name}")
                return Call(name, tuple(args), offset=offset)
            raise ParseError(offset, "a known function or 't'")
        raise ParseError(offset, "a number, 't', a function call, or '('")


def parse(text: str) -> ExprAst:
    """Parse an expression, raising ParseError with the failing offset."""
    return _Parser(text).parse()


def evaluate(ast: ExprAst, t: float) -> float:
    """Evaluate an AST at a point; domain faults raise EvalError."""
    if isinstance(ast, Num):
        return ast.value
    if isinstance(ast, Var):
        return float(t)
    if isinstance(ast, Neg):
        return -evaluate(ast.operand, t)
    if isinstance(ast, BinOp):
        left = evaluate(ast.left, t)
        right = evaluate(ast.right, t)
        if ast.op == "+":
            return left + right
        if ast.op == "-":
            return left - right
        if ast.op == "*":
            return left * right
        if ast.op == "/":
            if right == 0.0:
                raise EvalError(ast.offset, "division by zero")
            return left / right
        # '^'
        if left == 0.0 and right < 0:
            raise EvalError(ast.offset, "zero raised to a negative power")
        integral = math.isfinite(right) and right == int(right)
        if left < 0 and not integral:
            raise EvalError(ast.offset, "fractional power of a negative base")
        try:
            return float(left**right)
        except OverflowError:
            negative = left < 0 and integral and int(right) % 2 == 1
            return -math.inf if negative else math.inf
    if isinstance(ast, Call):
        args = [evaluate(a, t) for a in ast.args]
        if ast.name == "abs":
            return abs(args[0])
        if ast.name == "sqrt":
            if args[0] < 0:
                raise EvalError(ast.offset, "square root of a negative number")
            return math.sqrt(args[0])
        if ast.name == "exp":
            try:
                return math.exp(args[0])
            except OverflowError:
                return math.inf
        if ast.name == "log":
            if args[0] <= 0:
                raise EvalError(ast.offset, "logarithm of a nonpositive number")
            return math.log(args[0])
        if ast.name == "sin":
            return math.sin(args[0])
        if ast.name == "cos":
            return math.cos(args[0])
        if ast.name == "min":
            return min(args)
        return max(args)
    raise TypeError(f"not an AST node: {ast!r}")


def to_text(ast: ExprAst) -> str:
    """Unparse an AST; reparsing yields a structurally equal tree."""
    if isinstance(ast, Num):
        return repr(ast.value)
    if isinstance(ast, Var):
        return "t"
    if isinstance(ast, Neg):
        return f"(-{to_text(ast.operand)})"
    if isinstance(ast, BinOp):
        return f"({to_text(ast.left)}{ast.op}{to_text(ast.right)})"
    return f"{ast.name}({', '.join(to_text(a) for a in ast.args)})"


def evaluator(ast: ExprAst):
    """Bind an AST into a plain callable of t."""

    def fn(t: float) -> float:
        return evaluate(ast, t)

    return fn


def sample(ast: ExprAst, interval: tuple[float, float], size: int):
    """Sample an expression on a uniform grid into a SampledFunction.

    Evaluation faults are re-raised with the failing node coordinate.
    """
    from .choquet import SampledFunction  # local import to avoid a cycle

    a, b = float(interval[0]), float(interval[1])
    if size < 1:
        raise ValueError("grid size must be at least 1")
    values = []
    for i in range(size + 1):
        ti = a + (b - a) * i / size
        try:
            values.append(evaluate(ast, ti))
        except EvalError as exc:
            raise EvalError(exc.offset, exc.reason, at=ti) from exc
    import numpy as np

    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise EvalError(0, "non-finite sample", at=a + (b - a) * bad / size)
    nonneg = bool(arr.min() >= 0)
    return SampledFunction((a, b), arr, nonnegative=nonneg or None)
