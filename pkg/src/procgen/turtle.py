"""Turtle interpretation of module strings into generalised-cylinder meshes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional

import numpy as np

from .cylinder import GeneralisedCylinder, cylinder_mesh
from .errors import ProcgenError
from .geom import lerp
from .lsystem import Module
from .mesh.kernel import Mesh

GROWTH_FLOOR = 1e-3


class InterpretationError(ProcgenError):
    pass


def default_frame() -> np.ndarray:
    """Columns are left (+X), heading (+Y) and up (+Z)."""
    return np.eye(3)


@dataclass
class TurtleState:
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    frame: np.ndarray = field(default_factory=default_frame)
    scale: float = 1.0
    section: int = 0
    builder: Optional[GeneralisedCylinder] = None

    def copy(self) -> "TurtleState":
        return replace(self, position=self.position.copy(), frame=self.frame.copy())


class Turtle:
    def __init__(self, samples_around: int = 16, samples_along: int = 8):
        self.state = TurtleState()
        self.stack: list[TurtleState] = []
        self.meshes: list[Mesh] = []
        self.cylinders: list[GeneralisedCylinder] = []
        self.samples_around = samples_around
        self.samples_along = samples_along
        self.max_drift = 0.0  # largest orthonormality error seen before re-orthonormalising

    @property
    def heading(self) -> np.ndarray:
        return self.state.frame[:, 1]

    @property
    def left(self) -> np.ndarray:
        return self.state.frame[:, 0]

    @property
    def up(self) -> np.ndarray:
        return self.state.frame[:, 2]

    def _set_frame(self, L, H, U) -> None:
        F = np.column_stack([L, H, U])
        self.max_drift = max(self.max_drift, float(np.abs(F.T @ F - np.eye(3)).max()))
        H = H / np.linalg.norm(H)
        U = U - np.dot(U, H) * H
        U = U / np.linalg.norm(U)
        self.state.frame = np.column_stack([np.cross(H, U), H, U])

    def move(self, d: float) -> None:
        self.state.position = self.state.position + self.heading * d

    def pitch(self, a: float) -> None:
        """Rotate about left: positive angles tip the heading toward -up."""
        c, s = math.cos(a), math.sin(a)
        H, U = self.heading, self.up
        self._set_frame(self.left, H * c - U * s, U * c + H * s)

    def roll(self, a: float) -> None:
        """Rotate about the heading."""
        c, s = math.cos(a), math.sin(a)
        L, U = self.left, self.up
        self._set_frame(L * c + U * s, self.heading, U * c - L * s)

    def yaw(self, a: float) -> None:
        """Rotate about up."""
        c, s = math.cos(a), math.sin(a)
        H, L = self.heading, self.left
        self._set_frame(L * c - H * s, H * c + L * s, self.up)

    def push(self) -> None:
        self.stack.append(self.state.copy())

    def pop(self) -> None:
        if not self.stack:
            raise InterpretationError("']' without a matching '['")
        self.state = self.stack.pop()

    def set_section(self, i: int) -> None:
        self.state.section = int(i)

    def set_scale(self, x: float) -> None:
        self.state.scale = float(x)

    def begin_cylinder(self) -> None:
        self.state.builder = GeneralisedCylinder()
        self.add_point()

    def add_point(self) -> None:
        b = self.state.builder
        if b is None:
            raise InterpretationError("control point added outside a cylinder")
        b.add(self.state.position, self.state.frame, self.state.scale, self.state.section)

    def end_cylinder(self) -> None:
        b = self.state.builder
        if b is None:
            raise InterpretationError("cylinder ended without a begin")
        if np.linalg.norm(b.points[-1].position - self.state.position) > 0:
            self.add_point()
        self.state.builder = None
        if len(b) >= 2:
            self.cylinders.append(b)
            self.meshes.append(cylinder_mesh(b, self.samples_around, self.samples_along))


# handler(turtle, params, growth)
Command = Callable[[Turtle, tuple, float], None]


def _arity(symbol: str, params: tuple, n: int) -> None:
    if len(params) != n:
        raise InterpretationError(f"{symbol} expects {n} parameter(s), got {len(params)}")


def _segment(t: Turtle, p: tuple, g: float) -> None:
    _arity("S", p, 3)
    length, bend, width = p
    t.pitch(bend * g)
    t.set_scale(lerp(t.state.scale, width, g))
    t.move(length * g)
    t.add_point()


def _bracket(fn) -> Command:
    def run(t: Turtle, p: tuple, g: float) -> None:
        _arity("bracket", p, 0)
        fn(t)
    return run


def _angle(method: str, sign: float = 1.0) -> Command:
    def run(t: Turtle, p: tuple, g: float) -> None:
        if len(p) != 1:
            raise InterpretationError(f"turn command expects 1 parameter, got {len(p)}")
        getattr(t, method)(sign * p[0])
    return run


def _move(t: Turtle, p: tuple, g: float) -> None:
    _arity("f", p, 1)
    t.move(p[0] * g)


def _scale(t: Turtle, p: tuple, g: float) -> None:
    _arity("Gsc", p, 1)
    t.set_scale(p[0] * g)


def _section(t: Turtle, p: tuple, g: float) -> None:
    _arity("G#", p, 1)
    t.set_section(int(round(p[0])))


def _begin(t: Turtle, p: tuple, g: float) -> None:
    t.begin_cylinder()


def _end(t: Turtle, p: tuple, g: float) -> None:
    t.end_cylinder()


DEFAULT_COMMANDS: dict[str, Command] = {
    "[": _bracket(Turtle.push),
    "]": _bracket(Turtle.pop),
    "^": _angle("pitch"),
    "∧": _angle("pitch"),
    "&": _angle("pitch", -1.0),
    "\\": _angle("roll"),
    "/": _angle("roll", -1.0),
    "+": _angle("yaw"),
    "-": _angle("yaw", -1.0),
    "f": _move,
    "S": _segment,
    "Gs": _begin,
    "Ge": _end,
    "Gsc": _scale,
    "G#": _section,
}


@dataclass
class InterpretationMap:
    commands: dict = field(default_factory=lambda: dict(DEFAULT_COMMANDS))
    ignore: frozenset = frozenset()

    def lookup(self, mod: Module) -> Optional[Command]:
        cmd = self.commands.get(mod.symbol)
        if cmd is None and mod.params and mod.symbol not in self.ignore:
            raise InterpretationError(f"no interpretation for symbol {mod.symbol!r}")
        return cmd


def interpret(modules: Iterable[Module], imap: InterpretationMap | None = None,
              growth: Callable[[Module], float] | None = None,
              samples_around: int = 16, samples_along: int = 8,
              turtle: Turtle | None = None) -> list[Mesh]:
    """Run the turtle over ``modules`` left to right; one mesh per completed cylinder.

    ``growth`` maps a module to its development fraction in ``[0, 1]``; it
    scales lengths, bends and widths and is floored at ``GROWTH_FLOOR``.
    """
    imap = imap or InterpretationMap()
    t = turtle or Turtle(samples_around, samples_along)
    for mod in modules:
        cmd = imap.lookup(mod)
        if cmd is None:
            continue
        g = 1.0 if growth is None else max(float(growth(mod)), GROWTH_FLOOR)
        cmd(t, mod.params, g)
    if t.stack:
        raise InterpretationError(f"{len(t.stack)} unclosed '['")
    if t.state.builder is not None:
        raise InterpretationError("cylinder begun but never ended")
    return t.meshes
