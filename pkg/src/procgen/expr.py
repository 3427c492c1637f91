"""Arithmetic expression language for L-system parameters and conditions.

Grammar (loosest binding first)::

    expr    := or
    or      := and ("or" and)*
    and     := not ("and" not)*
    not     := "not" not | cmp
    cmp     := sum (("<" | "<=" | ">" | ">=" | "==" | "~=") sum)*
    sum     := prod (("+" | "-") prod)*
    prod    := pow (("*" | "/") pow)*
    pow     := unary ("^" pow)?              # right associative
    unary   := "-" unary | atom
    atom    := NUMBER | NAME | NAME "(" [expr ("," expr)*] ")" | "(" expr ")"

Every value is a float; comparisons and logical operators produce 1.0 or 0.0
and treat any nonzero value as true.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .errors import ProcgenError
from .noise import noise

MAX_DEPTH = 64      # parenthesis/prefix nesting
MAX_HEIGHT = 400    # tree height, bounds recursion in eval/print


class ExprSyntaxError(ProcgenError):
    def __init__(self, message: str, source: str, offset: int):
        super().__init__(f"{message} at offset {offset} in {source!r}")
        self.source = source
        self.offset = offset


class ExprEvalError(ProcgenError):
    pass


# -- tree ------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Not:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Expr = Union[Num, Name, Neg, Not, BinOp, Call]


# -- lexer -------------------------------------------------------------------------

_SYMBOLS = ("<=", ">=", "==", "~=", "<", ">", "+", "-", "*", "/", "^", "(", ")", ",")
KEYWORDS = ("and", "or", "not")


@dataclass(frozen=True)
class Token:
    kind: str   # "num", "name", "op", "end"
    text: str
    pos: int


_DIGITS = frozenset("0123456789")  # str.isdigit also accepts superscripts and other scripts


def tokenize(src: str) -> list[Token]:
    toks = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c in _DIGITS or (c == "." and i + 1 < n and src[i + 1] in _DIGITS):
            j = i
            while j < n and src[j] in _DIGITS:
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j] in _DIGITS:
                    j += 1
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k] in _DIGITS:
                    while k < n and src[k] in _DIGITS:
                        k += 1
                    j = k
            toks.append(Token("num", src[i:j], i))
            i = j
            continue
        if c.isascii() and (c.isalpha() or c == "_"):
            j = i
            while j < n and src[j].isascii() and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            toks.append(Token("op" if word in KEYWORDS else "name", word, i))
            i = j
            continue
        for sym in _SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("op", sym, i))
                i += len(sym)
                break
        else:
            raise ExprSyntaxError(f"unexpected character {c!r}", src, i)
    toks.append(Token("end", "", n))
    return toks


# -- parser ----------------------------------------------------------------------------

_CMP = ("<", "<=", ">", ">=", "==", "~=")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0
        self.depth = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def accept(self, *ops: str) -> Token | None:
        t = self.peek()
        if t.kind == "op" and t.text in ops:
            self.i += 1
            return t
        return None

    def expect(self, op: str) -> Token:
        t = self.peek()
        if t.kind == "op" and t.text == op:
            self.i += 1
            return t
        raise self.error(f"expected {op!r}")

    def error(self, message: str) -> ExprSyntaxError:
        t = self.peek()
        found = "end of input" if t.kind == "end" else repr(t.text)
        return ExprSyntaxError(f"{message}, found {found}", self.src, t.pos)

    def nest(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise self.error("expression nested too deeply")

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise self.error("expected an expression")
        e = self.or_()
        if self.peek().kind != "end":
            raise self.error("expected an operator or end of input")
        return e

    def or_(self) -> Expr:
        e = self.and_()
        while self.accept("or"):
            e = BinOp("or", e, self.and_())
        return e

    def and_(self) -> Expr:
        e = self.not_()
        while self.accept("and"):
            e = BinOp("and", e, self.not_())
        return e

    def not_(self) -> Expr:
        if self.accept("not"):
            self.nest()
            e = Not(self.not_())
            self.depth -= 1
            return e
        return self.cmp()

    def cmp(self) -> Expr:
        e = self.sum()
        while (t := self.accept(*_CMP)) is not None:
            e = BinOp(t.text, e, self.sum())
        return e

    def sum(self) -> Expr:
        e = self.prod()
        while (t := self.accept("+", "-")) is not None:
            e = BinOp(t.text, e, self.prod())
        return e

    def prod(self) -> Expr:
        e = self.pow()
        while (t := self.accept("*", "/")) is not None:
            e = BinOp(t.text, e, self.pow())
        return e

    def pow(self) -> Expr:
        base = self.unary()
        if self.accept("^"):
            self.nest()
            e = BinOp("^", base, self.pow())
            self.depth -= 1
            return e
        return base

    def unary(self) -> Expr:
        if self.accept("-"):
            self.nest()
            e = Neg(self.unary())
            self.depth -= 1
            return e
        return self.atom()

    def atom(self) -> Expr:
        t = self.peek()
        if t.kind == "num":
            self.take()
            v = float(t.text)
            if not math.isfinite(v):
                raise ExprSyntaxError(f"number {t.text!r} out of range", self.src, t.pos)
            return Num(v)
        if t.kind == "name":
            self.take()
            if self.accept("("):
                self.nest()
                args = []
                if not self.accept(")"):
                    args.append(self.or_())
                    while self.accept(","):
                        args.append(self.or_())
                    self.expect(")")
                self.depth -= 1
                return Call(t.text, tuple(args))
            return Name(t.text)
        if self.accept("("):
            self.nest()
            e = self.or_()
            self.expect(")")
            self.depth -= 1
            return e
        raise self.error("expected a number, name or '('")


def parse_expr(src: str) -> Expr:
    e = _Parser(src).parse()
    if _height(e) > MAX_HEIGHT:
        raise ExprSyntaxError("expression too deep", src, 0)
    return e


def _children(e: Expr) -> tuple:
    if isinstance(e, (Neg, Not)):
        return (e.operand,)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, Call):
        return e.args
    return ()


def _height(e: Expr) -> int:
    best = 0
    stack = [(e, 1)]
    while stack:
        node, h = stack.pop()
        best = max(best, h)
        stack.extend((c, h + 1) for c in _children(node))
    return best


# -- printing ----------------------------------------------------------------------------

def to_source(e: Expr) -> str:
    """Fully parenthesised source that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, Not):
        return f"(not {to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({', '.join(to_source(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


def free_names(e: Expr) -> set[str]:
    """Identifiers referenced as values (not as called functions)."""
    if isinstance(e, Name):
        return {e.id}
    if isinstance(e, (Neg, Not)):
        return free_names(e.operand)
    if isinstance(e, BinOp):
        return free_names(e.left) | free_names(e.right)
    if isinstance(e, Call):
        out: set[str] = set()
        for a in e.args:
            out |= free_names(a)
        return out
    return set()


def called_names(e: Expr) -> set[str]:
    if isinstance(e, (Neg, Not)):
        return called_names(e.operand)
    if isinstance(e, BinOp):
        return called_names(e.left) | called_names(e.right)
    if isinstance(e, Call):
        out = {e.func}
        for a in e.args:
            out |= called_names(a)
        return out
    return set()


# -- evaluation ------------------------------------------------------------------------------

CONSTANTS: dict[str, float] = {"pi": math.pi}

# name -> (callable, min arity, max arity or None)
FUNCTIONS: dict[str, tuple[Callable[..., float], int, int | None]] = {
    "sin": (math.sin, 1, 1),
    "cos": (math.cos, 1, 1),
    "abs": (abs, 1, 1),
    "min": (lambda *a: min(a), 1, None),
    "max": (lambda *a: max(a), 1, None),
    "noise": (noise, 1, 3),
}


def _truth(x: float) -> bool:
    return x != 0.0


def eval_expr(e: Expr, env: Mapping[str, float] | None = None, context: str = "") -> float:
    """Evaluate ``e`` with ``env`` bindings layered over the builtin constants."""
    env = env or {}
    try:
        return _eval(e, env)
    except ExprEvalError as err:
        if context:
            raise ExprEvalError(f"{err} (in {context})") from None
        raise


def _eval(e: Expr, env: Mapping[str, float]) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Name):
        if e.id in env:
            return float(env[e.id])
        if e.id in CONSTANTS:
            return CONSTANTS[e.id]
        raise ExprEvalError(f"unbound identifier {e.id!r}")
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Not):
        return 0.0 if _truth(_eval(e.operand, env)) else 1.0
    if isinstance(e, BinOp):
        op = e.op
        if op == "and":
            return 1.0 if _truth(_eval(e.left, env)) and _truth(_eval(e.right, env)) else 0.0
        if op == "or":
            return 1.0 if _truth(_eval(e.left, env)) or _truth(_eval(e.right, env)) else 0.0
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                raise ExprEvalError("division by zero")
            return a / b
        if op == "^":
            try:
                r = math.pow(a, b)
            except (OverflowError, ValueError) as exc:
                raise ExprEvalError(f"bad power {a!r} ^ {b!r}: {exc}") from None
            return r
        if op == "<":
            return float(a < b)
        if op == "<=":
            return float(a <= b)
        if op == ">":
            return float(a > b)
        if op == ">=":
            return float(a >= b)
        if op == "==":
            return float(a == b)
        if op == "~=":
            return float(a != b)
        raise ExprEvalError(f"unknown operator {op!r}")
    if isinstance(e, Call):
        if e.func not in FUNCTIONS:
            raise ExprEvalError(f"unknown function {e.func!r}")
        fn, lo, hi = FUNCTIONS[e.func]
        n = len(e.args)
        if n < lo or (hi is not None and n > hi):
            want = str(lo) if hi == lo else f"{lo}..{hi if hi is not None else ''}"
            raise ExprEvalError(f"{e.func}() takes {want} arguments, got {n}")
        return float(fn(*(_eval(a, env) for a in e.args)))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(src: str, env: Mapping[str, float] | None = None) -> float:
    return eval_expr(parse_expr(src), env)
