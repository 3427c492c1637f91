"""Built-in scenes, selectable by name from the command line."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ProcgenError, UnsupportedInputError
from .geom import distribute_points_sphere, lerp, normalized, scale, translate
from .lsystem import LSystem, bundled_lsys, load_lsystem
from .mesh.io import load_obj
from .mesh.kernel import Mesh, VertexHandle, nearbyv
from .mesh.primitives import sphere
from .noise import noise
from .scene import Node, Scene, Universe, abstract_node, meshnode
from .spike import SpikeConfig, SpikeGrower, spike_new
from .turtle import InterpretationMap, interpret


# -- helpers ---------------------------------------------------------------------------------

def interior(m: Mesh, v: VertexHandle) -> bool:
    try:
        ring, _, closed = m.fan(v)
    except UnsupportedInputError:
        return False
    return closed and len(ring) >= 3


def spaced_vertices(m: Mesh, candidates, min_hops: int, limit: int | None = None) -> list[VertexHandle]:
    """Greedy pick from ``candidates`` keeping picks more than ``min_hops`` edges apart."""
    picked: list[VertexHandle] = []
    blocked: set[int] = set()
    for v in candidates:
        s = v.index()
        if s in blocked or not interior(m, v):
            continue
        picked.append(v)
        blocked.update(h.index() for h in nearbyv(v, min_hops))
        if limit is not None and len(picked) >= limit:
            break
    return picked


def nearest_vertices(m: Mesh, points) -> list[VertexHandle]:
    vs = m.vertex_slots()
    p = m._vp[vs]
    out, seen = [], set()
    for q in points:
        s = int(vs[np.argmin(np.linalg.norm(p - q, axis=1))])
        if s not in seen:
            seen.add(s)
            out.append(m.vertex(s))
    return out


@dataclass
class Growth:
    """Shared state of the grower scenes."""

    nodes: list
    growers: list = field(default_factory=list)
    r_stop: float = 0.0

    def step(self, dt: float) -> None:
        for g in self.growers:
            g.update(dt)

    @property
    def active(self) -> int:
        return sum(not g.done for g in self.growers)


def _update_growth(state: Growth, u: Universe, dt: float) -> None:
    state.step(dt)


# -- listing1: sine-perturbed sphere ----------------------------------------------------------

def _listing1_setup(u: Universe, p: dict, rng: random.Random):
    m = sphere(p["level"])
    u.add(meshnode(m, "sphere"))
    return {"mesh": m, "amplitude": p["amplitude"]}


def _listing1_update(state, u: Universe, dt: float) -> None:
    m = state["mesh"]
    vs = m.vertex_slots()
    m._vp[vs, 1] += state["amplitude"] * np.sin(m._vp[vs, 0] + u.t)
    m.dirty = True


# -- spikes: tapered extrusions that curve toward a point above the sphere ---------------------

def _spikes_setup(u: Universe, p: dict, rng: random.Random) -> Growth:
    m = sphere(p["level"])
    node = u.add(meshnode(m, "spiky"))
    m.sync()
    target = np.array([0.0, 0.0, p["target_height"]])
    cands = nearest_vertices(m, distribute_points_sphere(p["count"]))
    state = Growth([node])

    def bend(g: SpikeGrower) -> None:
        to_target = target - g.v.p
        if np.linalg.norm(to_target) > 1e-9:
            g.n = normalized(g.n + p["bend"] * normalized(to_target))

    for v in spaced_vertices(m, cands, 3):
        h = (float(v.p[2]) + 1.0) / 2.0   # 0 at the bottom pole, 1 at the top
        cfg = SpikeConfig(
            speed=p["speed"],
            seg_length=p["seg_length"],
            num_segs=max(1, round(lerp(p["min_segs"], p["max_segs"], h))),
            shrink=p["shrink"],
            on_segment=bend if p["bend"] > 0 else None,
        )
        state.growers.append(spike_new(m, v, cfg))
    return state


# -- suckers: out then in, stopping on contact ------------------------------------------------

def _suckers_setup(u: Universe, p: dict, rng: random.Random) -> Growth:
    m = sphere(p["level"])
    node = u.add(meshnode(m, "suckers"))
    m.sync()
    state = Growth([node])

    def turn_inward(g: SpikeGrower) -> None:
        if g.seg > p["out_segs"]:
            g.speed = -abs(p["speed"]) * p["inward_speed"]
            g.shrink = p["inward_shrink"]

    cands = nearest_vertices(m, distribute_points_sphere(p["count"]))
    for v in spaced_vertices(m, cands, 2):
        cfg = SpikeConfig(speed=p["speed"], seg_length=p["seg_length"],
                          num_segs=p["out_segs"] + p["in_segs"], shrink=p["shrink"],
                          inset_scale=p["inset_scale"], on_segment=turn_inward)
        state.growers.append(spike_new(m, v, cfg))
    state.r_stop = p["r_stop"]
    return state


def touching(growers: list[SpikeGrower], r_stop: float) -> list[int]:
    """Indices of active growers whose tip is within ``r_stop`` of another grower's ring vertex."""
    rings = []
    for g in growers:
        slots = [h.index() for ring in g.rings for h in ring if h.valid()]
        rings.append(g.m._vp[slots] if slots else np.zeros((0, 3)))
    hits = []
    for i, g in enumerate(growers):
        if g.done:
            continue
        tip = g.v.p
        for j, pts in enumerate(rings):
            if j != i and len(pts) and np.linalg.norm(pts - tip, axis=1).min() < r_stop:
                hits.append(i)
                break
    return hits


def _suckers_update(state: Growth, u: Universe, dt: float) -> None:
    state.step(dt)
    for i in touching(state.growers, state.r_stop):
        state.growers[i].stop()


# -- bunny-stalks: growers on a user mesh ------------------------------------------------------

def _stalks_setup(u: Universe, p: dict, rng: random.Random) -> Growth:
    m = load_obj(p["obj"])
    if not m.is_manifold():
        raise UnsupportedInputError(f"{p['obj']} is not a manifold mesh")
    if p["fit"]:
        lo, hi = m.bounds()
        m.transform(scale(2.0 / float(np.max(hi - lo))) @ translate(-(lo + hi) / 2.0))
    m.sync()
    node = u.add(meshnode(m, Path(p["obj"]).stem))
    verts = m.vertexlist()
    rng.shuffle(verts)
    state = Growth([node])
    for v in spaced_vertices(m, verts, 3, limit=p["count"]):
        cfg = SpikeConfig(speed=p["speed"], seg_length=p["seg_length"], num_segs=p["num_segs"],
                          shrink=p["shrink"])
        state.growers.append(spike_new(m, v, cfg))
    return state


# -- calcispongiae: timed L-system re-interpreted every frame -----------------------------------

@dataclass
class Developing:
    lsys: LSystem
    imap: InterpretationMap
    root: Node
    around: int
    along: int
    nodes: list = field(default_factory=list)

    def rebuild(self, u: Universe) -> None:
        for n in self.nodes:
            u.remove(n)
        self.nodes = []
        for k, m in enumerate(interpret(self.lsys.modules, self.imap, self.lsys.growth,
                                        self.around, self.along)):
            m.sync()
            n = u.add(meshnode(m, f"cylinder{k}"))
            u.make_child_of(self.root, n)
            self.nodes.append(n)


def _lsys_path(name: str) -> Path:
    return Path(name) if name else bundled_lsys("calcispongiae")


def _calci_setup(u: Universe, p: dict, rng: random.Random) -> Developing:
    ls = load_lsystem(_lsys_path(p["file"]))
    root = u.add(abstract_node("calcispongiae"))
    st = Developing(ls, InterpretationMap(ignore=frozenset("ABC")), root,
                    p["samples_around"], p["samples_along"])
    st.rebuild(u)
    return st


def _calci_update(state: Developing, u: Universe, dt: float) -> None:
    state.lsys.derive_timed(dt)
    state.rebuild(u)


# -- hybrid: developed L-system with growers on selected surface vertices ------------------------

def _hybrid_setup(u: Universe, p: dict, rng: random.Random) -> Growth:
    ls = load_lsystem(_lsys_path(p["file"]))
    steps = max(1, math.ceil(p["develop"] / p["develop_dt"]))
    for _ in range(steps):
        ls.derive_timed(p["develop"] / steps)
    meshes = interpret(ls.modules, InterpretationMap(ignore=frozenset("ABC")), ls.growth)
    if not meshes:
        raise ProcgenError("the L-system produced no geometry")
    state = Growth([])
    freq = p["noise_freq"]
    picks = []
    for k, m in enumerate(meshes):
        m.sync()
        state.nodes.append(u.add(meshnode(m, f"cylinder{k}")))
        cands = [v for v in m.vertexlist()
                 if v.p[2] >= p["min_height"] and noise(*(v.p * freq)) > p["threshold"]]
        picks.extend((m, v) for v in spaced_vertices(m, cands, 3))
    rng.shuffle(picks)
    for m, v in picks[: p["count"]]:
        h = float(v.p[2])
        cfg = SpikeConfig(speed=p["speed"], seg_length=p["seg_length"] * (1.0 + 0.05 * h),
                          num_segs=p["num_segs"], shrink=p["shrink"])
        state.growers.append(spike_new(m, v, cfg))
    return state


SCENES: dict[str, Scene] = {s.name: s for s in [
    Scene("listing1", "unit sphere whose vertices drift by 0.01*sin(x + t) in y",
          {"level": 3, "amplitude": 0.01}, _listing1_setup, _listing1_update),
    Scene("spikes", "tapered extrusions on a sphere, longer near the top, bending upward",
          {"level": 3, "count": 40, "speed": 4.0, "seg_length": 0.1, "shrink": 0.8,
           "min_segs": 3, "max_segs": 8, "bend": 0.3, "target_height": 3.0},
          _spikes_setup, _update_growth),
    Scene("suckers", "extrude out then in; growers stop when they touch a neighbour",
          {"level": 3, "count": 30, "speed": 2.0, "seg_length": 0.06, "shrink": 0.95,
           "inset_scale": 0.9, "out_segs": 3, "in_segs": 2, "inward_speed": 0.5,
           "inward_shrink": 0.7, "r_stop": 0.05},
          _suckers_setup, _suckers_update),
    Scene("bunny-stalks", "spike growers on a user-supplied OBJ mesh",
          {"obj": "", "count": 30, "fit": True, "speed": 2.0, "seg_length": 0.05, "num_segs": 5,
           "shrink": 0.8},
          _stalks_setup, _update_growth, required=("obj",)),
    Scene("calcispongiae", "timed branching L-system swept into generalised cylinders",
          {"file": "", "samples_around": 16, "samples_along": 8},
          _calci_setup, _calci_update),
    Scene("hybrid", "developed L-system with spikes on high, noise-selected vertices",
          {"file": "", "develop": 40.0, "develop_dt": 0.5, "count": 20, "min_height": 4.0,
           "noise_freq": 2.0, "threshold": 0.0, "speed": 1.0, "seg_length": 0.05, "num_segs": 4,
           "shrink": 0.8},
          _hybrid_setup, _update_growth),
]}


def get_scene(name: str) -> Scene:
    try:
        return SCENES[name]
    except KeyError:
        raise KeyError(f"unknown scene {name!r}; available: {', '.join(sorted(SCENES))}") from None
