"""Independent reference implementations used by the tests.

Nothing here imports the package's parser or rewriter: the expression
oracle is a shunting-yard evaluator over its own tokenizer, and the
L-system oracle rewrites with Python callables generated alongside the
rule text.
"""

from __future__ import annotations

import math
import random
import re

# -- expressions ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|([A-Za-z_]\w*)|(<=|>=|==|~=|[-+*/^(),<>]))")

BINARY = {  # op: (precedence, right associative)
    "or": (1, False), "and": (2, False),
    "<": (4, False), "<=": (4, False), ">": (4, False), ">=": (4, False), "==": (4, False), "~=": (4, False),
    "+": (5, False), "-": (5, False), "*": (6, False), "/": (6, False), "^": (7, True),
}
PREFIX = {"not": 3, "neg": 8}
FUNCS = {"sin": math.sin, "cos": math.cos, "abs": abs, "min": lambda *a: min(a), "max": lambda *a: max(a)}


class OracleError(Exception):
    pass


ERR = object()  # poisoned value: an error that a short-circuit may still discard


def _tokens(src: str) -> list[tuple[str, str]]:
    out, i = [], 0
    src = src.rstrip()
    while i < len(src):
        m = _TOKEN.match(src, i)
        if not m or m.end() == i:
            raise OracleError(f"bad char at {i}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("op" if name in ("and", "or", "not") else "name", name))
        else:
            out.append(("op", op))
        i = m.end()
    return out


def _apply(op: str, a, b):
    if op == "and":
        if a is ERR or a == 0:
            return a if a is ERR else 0.0
        return ERR if b is ERR else (1.0 if b != 0 else 0.0)
    if op == "or":
        if a is ERR or a != 0:
            return a if a is ERR else 1.0
        return ERR if b is ERR else (1.0 if b != 0 else 0.0)
    if a is ERR or b is ERR:
        return ERR
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return ERR if b == 0.0 else a / b
    if op == "^":
        try:
            return math.pow(a, b)
        except (OverflowError, ValueError):
            return ERR
    return float({"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "==": a == b, "~=": a != b}[op])


def shunting_yard_eval(src: str, env: dict[str, float]) -> float:
    """Evaluate with Dijkstra's operator-precedence algorithm (values computed on the fly)."""
    toks = _tokens(src)
    vals: list[float] = []
    ops: list = []        # operator names, "(" markers, ("call", name) entries
    argc: list[int] = []  # argument counters for open calls
    expect_operand = True

    def reduce_one():
        op = ops.pop()
        if op in PREFIX:
            a = vals.pop()
            vals.append(ERR if a is ERR else (-a if op == "neg" else float(a == 0)))
        else:
            b, a = vals.pop(), vals.pop()
            vals.append(_apply(op, a, b))

    def prec(op):
        return PREFIX[op] if op in PREFIX else BINARY[op][0]

    i = 0
    while i < len(toks):
        kind, text = toks[i]
        if expect_operand:
            if kind == "num":
                vals.append(float(text))
                expect_operand = False
            elif kind == "name":
                if i + 1 < len(toks) and toks[i + 1] == ("op", "("):
                    ops.append(("call", text))
                    ops.append("(")
                    argc.append(0)
                    i += 1
                    if i + 1 < len(toks) and toks[i + 1] == ("op", ")"):
                        raise OracleError("empty call")
                else:
                    vals.append(math.pi if text == "pi" and text not in env else float(env[text]))
                    expect_operand = False
            elif text == "-":
                ops.append("neg")
            elif text == "not":
                ops.append("not")
            elif text == "(":
                ops.append("(")
                argc.append(-1)  # plain grouping
            else:
                raise OracleError(f"unexpected {text}")
        else:
            if text in BINARY:
                p, right = BINARY[text]
                while ops and ops[-1] != "(" and not isinstance(ops[-1], tuple):
                    q = prec(ops[-1])
                    if q > p or (q == p and not right):
                        reduce_one()
                    else:
                        break
                ops.append(text)
                expect_operand = True
            elif text in (",", ")"):
                while ops[-1] != "(":
                    reduce_one()
                if text == ",":
                    argc[-1] += 1
                    expect_operand = True
                else:
                    ops.pop()
                    n = argc.pop()
                    if n >= 0:
                        name = ops.pop()[1]
                        args = vals[len(vals) - (n + 1):]
                        del vals[len(vals) - (n + 1):]
                        bad = any(a is ERR for a in args)
                        vals.append(ERR if bad else float(FUNCS[name](*args)))
            else:
                raise OracleError(f"unexpected {text}")
        i += 1
    while ops:
        reduce_one()
    if len(vals) != 1:
        raise OracleError("leftover values")
    if vals[0] is ERR:
        raise OracleError("evaluation error")
    return vals[0]


def random_expr(rng: random.Random, depth: int = 4) -> str:
    """A grammatical expression with minimal parentheses, so precedence does the work."""

    def num():
        return rng.choice(["0", "1", "2", "3", "0.5", "1.5", "2.25", "10", ".75", "1e-1"])

    def atom(d):
        r = rng.random()
        if d <= 0 or r < 0.35:
            return num()
        if r < 0.55:
            return rng.choice(["x", "y", "pi"])
        if r < 0.75:
            f = rng.choice(["sin", "cos", "abs", "min", "max"])
            n = 1 if f in ("sin", "cos", "abs") else rng.randint(1, 3)
            return f"{f}(" + ", ".join(lor(d - 1) for _ in range(n)) + ")"
        return "(" + lor(d - 1) + ")"

    def unary(d):
        return ("-" + unary(d - 1)) if d > 0 and rng.random() < 0.2 else atom(d)

    def power(d):
        base = unary(d)
        return f"{base} ^ {power(d - 1)}" if d > 0 and rng.random() < 0.25 else base

    def chain(d, sub, ops, p):
        s = sub(d)
        while d > 0 and rng.random() < p:
            s += f" {rng.choice(ops)} {sub(d - 1)}"
        return s

    def prod(d):
        return chain(d, power, ["*", "/"], 0.35)

    def total(d):
        return chain(d, prod, ["+", "-"], 0.4)

    def cmp(d):
        return chain(d, total, ["<", "<=", ">", ">=", "==", "~="], 0.15)

    def lnot(d):
        return ("not " + lnot(d - 1)) if d > 0 and rng.random() < 0.1 else cmp(d)

    def land(d):
        return chain(d, lnot, ["and"], 0.1)

    def lor(d):
        return chain(d, land, ["or"], 0.1)

    return lor(depth)


# -- L-systems ----------------------------------------------------------------------------

def random_lsystem(rng: random.Random):
    """A small random parametric system as ``(axiom text, rule texts, python rules)``.

    Python rules are ``(symbol, condition(x), successors(x))`` where
    successors returns ``[(symbol, (param,)), ...]``.
    """
    symbols = ["A", "B", "C"]
    rules_txt, rules_py = [], []
    for _ in range(rng.randint(1, 5)):
        sym = rng.choice(symbols)
        k = rng.choice([0, 1, 2, 3])
        op = rng.choice([">", "<=", "~="])
        cond_txt = f"x {op} {k}"
        cond = {">": lambda x, k=k: x > k, "<=": lambda x, k=k: x <= k, "~=": lambda x, k=k: x != k}[op]
        succ_txt, succ_py = [], []
        for _ in range(rng.randint(0, 3)):
            s = rng.choice(symbols)
            a, b = rng.choice([0.5, 1.0, 2.0]), rng.choice([-1.0, 0.0, 1.0])
            succ_txt.append(f"{s}(x*{a}+{b})")
            succ_py.append((s, a, b))
        if rng.random() < 0.3:
            succ_txt = ["["] + succ_txt + ["]"]
        rules_txt.append(f"{sym}(x) : {cond_txt} -> " + " ".join(succ_txt))
        bracket = succ_txt[:1] == ["["]

        def successors(x, succ_py=succ_py, bracket=bracket):
            out = [(s, (x * a + b,)) for s, a, b in succ_py]
            return [("[", ())] + out + [("]", ())] if bracket else out

        rules_py.append((sym, cond, successors))
    axiom = [(rng.choice(symbols), (float(rng.randint(0, 4)),)) for _ in range(rng.randint(1, 5))]
    axiom_txt = " ".join(f"{s}({p[0]:g})" for s, p in axiom)
    return axiom_txt, rules_txt, rules_py, axiom


def brute_force_step(string, rules_py):
    out = []
    for sym, params in string:
        for psym, cond, succ in rules_py:
            if psym == sym and len(params) == 1 and cond(params[0]):
                out.extend(succ(params[0]))
                break
        else:
            out.append((sym, params))
    return out
