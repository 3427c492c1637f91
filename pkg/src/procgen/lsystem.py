"""Parametric L-systems with timed (age-driven) productions.

Module strings are written as whitespace-separated modules::

    B(2) A(4,pi+1)               untimed modules with parameters
    (f(6),0)                     timed module f(6) with age 0
    [ \\(2.39996*n) Gs ]          brackets are modules of their own

Symbol names are any run of characters other than whitespace and ``()[],``,
so ``G#``, ``\\``, ``^`` and ``∧`` are ordinary names.

Productions::

    PRED(formals) [: COND] -> SUCCESSORS
    (PRED(formals), TERMINAL_AGE) [@min=MIN_AGE] [: COND] -> SUCCESSORS
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .errors import ProcgenError
from .expr import (
    CONSTANTS,
    FUNCTIONS,
    Expr,
    ExprEvalError,
    ExprSyntaxError,
    called_names,
    eval_expr,
    free_names,
    parse_expr,
)

MAX_PASSES = 10_000
AGE_EPS = 1e-9  # absorbs drift from summing many small dt values
_STOP = set("()[],")


class LSystemSyntaxError(ProcgenError):
    def __init__(self, message: str, source: str, offset: int | None = None):
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"{message}{where} in {source!r}")
        self.source = source
        self.offset = offset


class DerivationError(ProcgenError):
    pass


class RunawayProductionError(DerivationError):
    pass


@dataclass(frozen=True)
class Module:
    symbol: str
    params: tuple = ()
    age: Optional[float] = None

    @property
    def timed(self) -> bool:
        return self.age is not None

    def __str__(self) -> str:
        return format_module(self)


@dataclass(frozen=True)
class Successor:
    symbol: str
    params: tuple = ()          # Expr per parameter
    age: Optional[Expr] = None  # initial age; None for untimed successors


@dataclass
class Production:
    pred: str
    formals: tuple
    successors: tuple
    condition: Optional[Expr] = None
    terminal_age: Optional[float] = None
    min_age: Optional[float] = None
    source: str = ""

    @property
    def timed(self) -> bool:
        return self.terminal_age is not None or self.min_age is not None

    def gate(self) -> float:
        """Age a module must reach before this production may fire."""
        return max(a for a in (self.terminal_age, self.min_age) if a is not None)

    def matches(self, mod: Module) -> bool:
        return mod.symbol == self.pred and len(mod.params) == len(self.formals)


# -- formatting ----------------------------------------------------------------------------

def fmt_number(x: float) -> str:
    s = "%.6g" % x
    return "0" if s == "-0" else s


def format_module(m: Module) -> str:
    s = m.symbol
    if m.params:
        s += "(" + ",".join(fmt_number(p) for p in m.params) + ")"
    if m.age is not None:
        s = f"({s},{fmt_number(m.age)})"
    return s


def format_string(mods: Iterable[Module]) -> str:
    return " ".join(format_module(m) for m in mods)


# -- scanning ------------------------------------------------------------------------------

@dataclass
class _RawModule:
    symbol: str
    args: list            # parameter source strings
    age: Optional[str]    # age source string for timed modules
    offset: int


class _Scanner:
    def __init__(self, src: str):
        self.src = src
        self.i = 0

    def error(self, msg: str, at: int | None = None) -> LSystemSyntaxError:
        return LSystemSyntaxError(msg, self.src, self.i if at is None else at)

    def skip_ws(self) -> None:
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1

    def at_end(self) -> bool:
        self.skip_ws()
        return self.i >= len(self.src)

    def name(self) -> str:
        j = self.i
        while j < len(self.src) and not self.src[j].isspace() and self.src[j] not in _STOP:
            j += 1
        if j == self.i:
            raise self.error("expected a symbol name")
        out = self.src[self.i:j]
        self.i = j
        return out

    def balanced_until(self, stops: str) -> str:
        """Text up to the first of ``stops`` at paren depth 0 (not consumed)."""
        start = self.i
        depth = 0
        while self.i < len(self.src):
            c = self.src[self.i]
            if c == "(":
                depth += 1
            elif c == ")":
                if depth == 0:
                    if ")" in stops:
                        return self.src[start:self.i]
                    raise self.error("unbalanced ')'")
                depth -= 1
            elif c in stops and depth == 0:
                return self.src[start:self.i]
            self.i += 1
        raise self.error("unterminated parameter list", start)

    def arglist(self) -> list[str]:
        assert self.src[self.i] == "("
        self.i += 1
        args = []
        self.skip_ws()
        if self.i < len(self.src) and self.src[self.i] == ")":
            self.i += 1
            return args
        while True:
            a = self.balanced_until(",)")
            if not a.strip():
                raise self.error("empty parameter")
            args.append(a)
            c = self.src[self.i]
            self.i += 1
            if c == ")":
                return args

    def plain_module(self) -> _RawModule:
        self.skip_ws()
        at = self.i
        sym = self.name()
        args = []
        if self.i < len(self.src) and self.src[self.i] == "(":
            args = self.arglist()
        return _RawModule(sym, args, None, at)

    def module(self) -> _RawModule:
        self.skip_ws()
        at = self.i
        c = self.src[self.i]
        if c in "[]":
            self.i += 1
            return _RawModule(c, [], None, at)
        if c == "(":
            self.i += 1
            raw = self.plain_module()
            self.skip_ws()
            if self.i >= len(self.src) or self.src[self.i] != ",":
                raise self.error("expected ',' before the age of a timed module")
            self.i += 1
            age = self.balanced_until(")")
            self.i += 1
            if not age.strip():
                raise self.error("empty age")
            raw.age = age
            raw.offset = at
            return raw
        if c in "),":
            raise self.error(f"unexpected {c!r}")
        return self.plain_module()

    def modules(self) -> list[_RawModule]:
        out = []
        while not self.at_end():
            out.append(self.module())
        return out


def _parse_expr_at(text: str, whole: str, offset: int) -> Expr:
    try:
        return parse_expr(text)
    except ExprSyntaxError as err:
        raise LSystemSyntaxError(f"bad expression {text.strip()!r}: {err}", whole, offset) from None


def _check_brackets(mods, src: str) -> None:
    depth = 0
    for m in mods:
        if m.symbol == "[":
            depth += 1
        elif m.symbol == "]":
            depth -= 1
            if depth < 0:
                raise LSystemSyntaxError("unbalanced ']'", src)
    if depth:
        raise LSystemSyntaxError("unbalanced '['", src)


def parse_axiom(src: str) -> list[Module]:
    """Parse and evaluate a module string (parameters may use builtins only)."""
    out = []
    raws = _Scanner(src).modules()
    _check_brackets(raws, src)
    for raw in raws:
        try:
            params = tuple(eval_expr(_parse_expr_at(a, src, raw.offset)) for a in raw.args)
            age = None if raw.age is None else eval_expr(_parse_expr_at(raw.age, src, raw.offset))
        except ExprEvalError as err:
            raise LSystemSyntaxError(str(err), src, raw.offset) from None
        if age is not None and age < 0:
            raise LSystemSyntaxError("module age must be >= 0", src, raw.offset)
        out.append(Module(raw.symbol, params, age))
    return out


def _split_top(src: str, sep: str) -> tuple[str, str] | None:
    depth = 0
    for i, c in enumerate(src):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and src.startswith(sep, i):
            return src[:i], src[i + len(sep):]
    return None


def parse_rule(src: str) -> Production:
    parts = _split_top(src, "->")
    if parts is None:
        raise LSystemSyntaxError("production is missing '->'", src)
    lhs, rhs = parts
    cond_src = None
    split = _split_top(lhs, ":")
    if split is not None:
        lhs, cond_src = split
    min_age = None
    if "@min=" in lhs:
        lhs, _, tail = lhs.partition("@min=")
        try:
            min_age = float(eval_expr(parse_expr(tail)))
        except (ExprSyntaxError, ExprEvalError):
            raise LSystemSyntaxError(f"bad minimum age {tail.strip()!r}", src) from None

    sc = _Scanner(lhs)
    if sc.at_end():
        raise LSystemSyntaxError("missing predecessor", src)
    pred = sc.module()
    if pred.symbol in "[]":
        raise LSystemSyntaxError("brackets cannot be rewritten", src)
    if not sc.at_end():
        raise LSystemSyntaxError("predecessor must be a single module (context is not supported)", src)
    formals = tuple(a.strip() for a in pred.args)
    for f in formals:
        if not (f.isidentifier() and f.isascii()):
            raise LSystemSyntaxError(f"formal parameter {f!r} is not a name", src)
        if f in CONSTANTS or f in FUNCTIONS:
            raise LSystemSyntaxError(f"formal parameter {f!r} shadows a builtin", src)
    if len(set(formals)) != len(formals):
        raise LSystemSyntaxError("duplicate formal parameters", src)
    terminal = None
    if pred.age is not None:
        try:
            terminal = float(eval_expr(parse_expr(pred.age)))
        except (ExprSyntaxError, ExprEvalError):
            raise LSystemSyntaxError(f"bad terminal age {pred.age.strip()!r}", src) from None
        if terminal < 0:
            raise LSystemSyntaxError("terminal age must be >= 0", src)

    known = set(formals) | set(CONSTANTS)

    def checked(text: str, offset: int) -> Expr:
        e = _parse_expr_at(text, src, offset)
        unknown = free_names(e) - known
        if unknown:
            raise LSystemSyntaxError(f"unknown name(s) {sorted(unknown)} in {text.strip()!r}", src, offset)
        bad = called_names(e) - set(FUNCTIONS)
        if bad:
            raise LSystemSyntaxError(f"unknown function(s) {sorted(bad)} in {text.strip()!r}", src, offset)
        return e

    condition = None
    if cond_src is not None:
        if not cond_src.strip():
            raise LSystemSyntaxError("empty condition", src)
        condition = checked(cond_src, 0)

    raws = _Scanner(rhs).modules()
    _check_brackets(raws, src)
    succ = []
    for raw in raws:
        params = tuple(checked(a, raw.offset) for a in raw.args)
        age = None if raw.age is None else checked(raw.age, raw.offset)
        succ.append(Successor(raw.symbol, params, age))
    return Production(pred.symbol, formals, tuple(succ), condition, terminal, min_age, src.strip())


# -- rewriting -----------------------------------------------------------------------------

@dataclass
class LSystem:
    modules: list
    productions: list
    derivations: int = 0
    clock: float = 0.0
    _by_symbol: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for p in self.productions:
            self._by_symbol.setdefault(p.pred, []).append(p)

    def __str__(self) -> str:
        return format_string(self.modules)

    def candidates(self, mod: Module) -> list[Production]:
        return [p for p in self._by_symbol.get(mod.symbol, ()) if len(p.formals) == len(mod.params)]

    def _condition(self, p: Production, env: dict, mod: Module) -> bool:
        if p.condition is None:
            return True
        return eval_expr(p.condition, env, context=f"condition of {p.source!r} at {format_module(mod)}") != 0.0

    def _expand(self, p: Production, mod: Module, env: dict, excess: float | None) -> list[Module]:
        out = []
        for s in p.successors:
            ctx = f"successor {s.symbol} of {p.source!r} at {format_module(mod)}"
            params = tuple(eval_expr(e, env, context=ctx) for e in s.params)
            age = None
            if s.age is not None:
                age = eval_expr(s.age, env, context=ctx)
                if excess is not None:
                    age += excess
            out.append(Module(s.symbol, params, age))
        return out

    def derive(self) -> None:
        """One parallel rewrite; the first applicable production (in listed order) wins."""
        new: list[Module] = []
        for mod in self.modules:
            for p in self.candidates(mod):
                env = dict(zip(p.formals, mod.params))
                if self._condition(p, env, mod):
                    new.extend(self._expand(p, mod, env, None))
                    break
            else:
                new.append(mod)
        self.modules = new
        self.derivations += 1

    def derive_timed(self, dt: float) -> None:
        """Age timed modules by ``dt`` and apply every production whose age gate is reached.

        Successors inherit the predecessor's excess age, so a large ``dt`` can
        trigger several generations in one call.
        """
        if not dt > 0:
            raise ValueError("dt must be positive")
        mods = [Module(m.symbol, m.params, m.age + dt) if m.age is not None else m for m in self.modules]
        for _ in range(MAX_PASSES):
            changed = False
            new: list[Module] = []
            for mod in mods:
                rewritten = None
                if mod.age is not None:
                    for p in self.candidates(mod):
                        if not p.timed or mod.age < p.gate() - AGE_EPS:
                            continue
                        env = dict(zip(p.formals, mod.params))
                        if self._condition(p, env, mod):
                            rewritten = self._expand(p, mod, env, max(mod.age - p.gate(), 0.0))
                            break
                if rewritten is None:
                    new.append(mod)
                else:
                    new.extend(rewritten)
                    changed = True
            mods = new
            if not changed:
                break
        else:
            raise RunawayProductionError(f"more than {MAX_PASSES} rewrite passes in one step")
        self.modules = mods
        self.clock += dt
        self.derivations += 1

    def terminal_age(self, mod: Module) -> Optional[float]:
        for p in self.candidates(mod):
            if p.terminal_age is not None:
                return p.terminal_age
        return None

    def growth(self, mod: Module) -> float:
        """Development fraction of ``mod``: 1 for untimed modules."""
        if mod.age is None:
            return 1.0
        terminal = self.terminal_age(mod)
        if terminal is None or terminal <= 0:   # a zero-age rule holding back on its condition
            return 1.0
        return growth_factor(mod, terminal)


def growth_factor(mod: Module, terminal: float) -> float:
    if terminal <= 0:
        raise ValueError("terminal age must be positive")
    if mod.age is None:
        return 1.0
    return min(mod.age / terminal, 1.0)


def new_lsystem(axiom: str, rules: Iterable[str]) -> LSystem:
    return LSystem(parse_axiom(axiom), [parse_rule(r) for r in rules])


# -- files ------------------------------------------------------------------------------------

def parse_lsys_text(text: str, path: str = "<string>") -> tuple[str, list[str]]:
    axiom = None
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, value = s.partition(":")
        key = key.strip()
        if not sep or key not in ("axiom", "rule"):
            raise LSystemSyntaxError(f"{path}:{lineno}: expected 'axiom:' or 'rule:'", s)
        if key == "axiom":
            if axiom is not None:
                raise LSystemSyntaxError(f"{path}:{lineno}: duplicate axiom", s)
            axiom = value.strip()
        else:
            rules.append(value.strip())
    if axiom is None:
        raise LSystemSyntaxError(f"{path}: no axiom", "")
    return axiom, rules


def load_lsystem(path) -> LSystem:
    path = Path(path)
    axiom, rules = parse_lsys_text(path.read_text(encoding="utf-8"), str(path))
    return new_lsystem(axiom, rules)


def bundled_lsys(name: str) -> Path:
    """Path of an ``.lsys`` file shipped with the package."""
    p = Path(__file__).parent / "data" / f"{name}.lsys"
    if not p.exists():
        raise FileNotFoundError(f"no bundled L-system named {name!r}")
    return p
