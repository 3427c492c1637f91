"""Scene graph, fixed-step simulation loop and frame export."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .errors import ProcgenError
from .geom import transform_normals, transform_points
from .mesh.io import obj_text, ply_bytes
from .mesh.kernel import Mesh
from .mesh.subdivide import smooth_subdivide
from .noise import noise_seed, set_noise_seed


class HierarchyError(ProcgenError):
    pass


class SceneError(ProcgenError):
    def __init__(self, scene: str, frame: int | None, cause: BaseException):
        where = "setup" if frame is None else f"frame {frame}"
        super().__init__(f"scene {scene!r} failed during {where}: {cause}")
        self.scene = scene
        self.frame = frame


_ids = itertools.count()


@dataclass(eq=False)
class Node:
    mesh: Optional[Mesh] = None
    local: np.ndarray = field(default_factory=lambda: np.eye(4))
    parent: Optional["Node"] = None
    name: str = ""
    id: int = field(default_factory=lambda: next(_ids))

    @property
    def is_mesh(self) -> bool:
        return self.mesh is not None


def meshnode(m: Mesh, name: str = "") -> Node:
    return Node(mesh=m, name=name)


def abstract_node(name: str = "") -> Node:
    return Node(name=name)


class Universe:
    def __init__(self):
        self.nodes: list[Node] = []
        self.t = 0.0
        self.dt = 0.0

    def add(self, n: Node) -> Node:
        if any(x.id == n.id for x in self.nodes):
            raise HierarchyError(f"node {n.id} already in the universe")
        self.nodes.append(n)
        return n

    def remove(self, n: Node) -> None:
        """Drop ``n``; its children become roots."""
        self.nodes = [x for x in self.nodes if x is not n]
        for x in self.nodes:
            if x.parent is n:
                x.parent = None

    def _owns(self, n: Node) -> bool:
        return any(x is n for x in self.nodes)

    def make_child_of(self, parent: Node, child: Node) -> None:
        if not (self._owns(parent) and self._owns(child)):
            raise HierarchyError("both nodes must belong to this universe")
        p = parent
        while p is not None:
            if p is child:
                raise HierarchyError("reparenting would create a cycle")
            p = p.parent
        child.parent = parent

    def world(self, n: Node) -> np.ndarray:
        m = n.local
        p = n.parent
        while p is not None:
            m = p.local @ m
            p = p.parent
        return m

    def mesh_nodes(self) -> list[Node]:
        return [n for n in self.nodes if n.is_mesh]


def bake(u: Universe, subdivide: int = 0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All mesh nodes merged in world space: ``(positions, normals, faces)``."""
    vs, ns, fs = [], [], []
    base = 0
    for node in u.mesh_nodes():
        m = node.mesh
        if subdivide:
            m = m.copy()
            smooth_subdivide(m, subdivide)
        if m.dirty:
            m = m.copy()
            m.sync()
        p, n, f = m.arrays()
        W = u.world(node)
        vs.append(transform_points(W, p))
        ns.append(transform_normals(W, n))
        fs.append(f + base)
        base += len(p)
    if not vs:
        return np.zeros((0, 3)), np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64)
    return np.concatenate(vs), np.concatenate(ns), np.concatenate(fs)


def export_frame(u: Universe, path, fmt: str = "obj", subdivide: int = 0) -> Path:
    path = Path(path)
    if fmt not in ("obj", "ply"):
        raise ValueError(f"unknown export format {fmt!r}")
    p, n, f = bake(u, subdivide)
    try:
        if fmt == "obj":
            path.write_text(obj_text(p, f, n, header=f"procgen frame t={u.t:.9g}"), encoding="utf-8")
        else:
            path.write_bytes(ply_bytes(p, f))
    except OSError as err:
        raise ProcgenError(f"cannot write {path}: {err.strerror or err}") from err
    return path


def frame_name(index: int, fmt: str) -> str:
    return f"frame_{index:06d}.{fmt}"


@dataclass
class Scene:
    """A named program: ``setup(u, params, rng) -> state`` then ``update(state, u, dt)`` per frame."""

    name: str
    description: str
    params: dict
    setup: Callable[[Universe, dict, random.Random], Any]
    update: Callable[[Any, Universe, float], None]
    required: tuple = ()

    def resolve(self, overrides: dict | None = None) -> dict:
        """Defaults merged with ``overrides``; strings are coerced to the default's type."""
        out = dict(self.params)
        for k, v in (overrides or {}).items():
            if k not in self.params:
                raise KeyError(f"scene {self.name!r} has no parameter {k!r}; known: {sorted(self.params)}")
            out[k] = coerce(v, self.params[k], k)
        for k in self.required:
            if out[k] in ("", None):
                raise KeyError(f"scene {self.name!r} needs --param {k}=...")
        return out


def coerce(value, default, name: str = ""):
    if not isinstance(value, str):
        return value
    try:
        if isinstance(default, bool):
            low = value.lower()
            if low not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return low in ("1", "true", "yes")
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except ValueError:
        raise ValueError(f"parameter {name!r} expects {type(default).__name__}, got {value!r}") from None
    return value


def run_simulation(scene: Scene, frames: int, dt: float, params: dict | None = None, seed: int = 0,
                   on_frame: Callable[[int, Universe], None] | None = None) -> Universe:
    """Setup once, then ``frames`` fixed steps; dirty meshes are synced after each update."""
    if frames < 1:
        raise ValueError("frames must be >= 1")
    if not dt > 0:
        raise ValueError("dt must be positive")
    params = scene.resolve(params)
    previous = noise_seed()
    set_noise_seed(seed)
    try:
        u = Universe()
        u.dt = dt
        try:
            state = scene.setup(u, params, random.Random(seed))
        except ProcgenError as err:
            raise SceneError(scene.name, None, err) from err
        for i in range(frames):
            try:
                scene.update(state, u, dt)
                for n in u.mesh_nodes():
                    if n.mesh.dirty:
                        n.mesh.sync()
            except (ProcgenError, ValueError, ArithmeticError) as err:
                raise SceneError(scene.name, i, err) from err
            u.t = (i + 1) * dt
            if on_frame is not None:
                on_frame(i, u)
        return u
    finally:
        set_noise_seed(previous)
