"""Continuous extrusion ("spike") grower: a move/inset state machine on one vertex."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ProcgenError, StaleHandleError, UnsupportedInputError
from .geom import length, rotation3
from .mesh.kernel import Mesh, VertexHandle
from .ops import Cap, capov, flattenvl, inset

MOVE, INSET, DONE = "move", "inset", "done"


@dataclass
class SpikeConfig:
    """Grower constants.

    ``shrink_mode="segment"`` tapers each completed ring to ``shrink`` times
    the previous one, spreading the shrink over the segment's travel so the
    result does not depend on ``dt``. ``"frame"`` applies ``shrink`` on every
    move update, exactly like the original per-frame script.
    """

    speed: float = 4.0
    seg_length: float = 0.1
    num_segs: int = 5
    shrink: float = 0.8
    inset_scale: float = 0.99
    shrink_mode: str = "segment"
    roll_per_segment: float = 0.0
    circularise: bool = False
    # called with the grower whenever a segment completes; may edit speed/shrink/n etc.
    on_segment: Optional[Callable[["SpikeGrower"], None]] = None

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("speed must be positive (use on_segment to reverse growth)")
        if not self.seg_length > 0:
            raise ValueError("seg_length must be positive")
        if self.num_segs < 1:
            raise ValueError("num_segs must be >= 1")
        if not 0 < self.shrink <= 1:
            raise ValueError("shrink must be in (0, 1]")
        if not 0 < self.inset_scale <= 1:
            raise ValueError("inset_scale must be in (0, 1]")
        if self.shrink_mode not in ("segment", "frame"):
            raise ValueError("shrink_mode must be 'segment' or 'frame'")


@dataclass
class SpikeGrower:
    m: Mesh
    v: VertexHandle
    n: np.ndarray
    cfg: SpikeConfig
    seg: int = 1
    distance: float = 0.0
    cap: Optional[Cap] = None
    state: str = MOVE
    speed: float = 0.0
    shrink: float = 0.0
    insets: int = 0
    rings: list = field(default_factory=list)
    origin: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def update(self, dt: float) -> bool:
        if self.state == DONE:
            return False
        if dt <= 0:
            raise ValueError("dt must be positive")
        try:
            if self.state == MOVE:
                self._move(dt)
            else:
                self._inset()
        except StaleHandleError:
            self.state = DONE
            return False
        return True

    def stop(self) -> None:
        self.state = DONE

    @property
    def done(self) -> bool:
        return self.state == DONE

    def outer(self) -> list[VertexHandle]:
        return capov(self.cap) if self.cap is not None else []

    def _inset(self) -> None:
        self.cap = inset(self.m, self.v, self.cfg.inset_scale)
        self.insets += 1
        outer = capov(self.cap)
        self.rings.append(outer)
        if self.cfg.roll_per_segment:
            _roll_ring(self.m, outer, self.v.p, self.n, self.cfg.roll_per_segment)
        if self.cfg.circularise:
            _circularise(self.m, outer, self.n)
        self.state = MOVE
        self.distance = 0.0

    def _move(self, dt: float) -> None:
        m = self.m
        step = self.speed * dt
        travel = abs(step)
        off = self.n * step
        tip = self.v.index()
        m._vp[tip] += off
        m.dirty = True
        if self.cap is not None:
            outer = capov(self.cap)
            slots = np.array([h.index() for h in outer])
            pts = m._vp[slots] + off
            centre = pts.mean(axis=0)
            m._vp[slots] = centre + (pts - centre) * self._shrink_factor(travel)
            flattenvl(m, outer, m._vp[tip], self.n)
        self.distance += travel
        if self.distance > self.cfg.seg_length:
            self.seg += 1
            self.state = INSET if self.seg <= self.cfg.num_segs else DONE
            if self.cfg.on_segment is not None:
                self.cfg.on_segment(self)

    def _shrink_factor(self, travel: float) -> float:
        if self.cfg.shrink_mode == "frame":
            return self.shrink
        L = self.cfg.seg_length
        covered = min(self.distance + travel, L) - min(self.distance, L)
        per_segment = self.shrink / self.cfg.inset_scale
        return per_segment ** (covered / L)


def spike_new(m: Mesh, v: VertexHandle, cfg: SpikeConfig | None = None) -> SpikeGrower:
    """Start a grower at ``v``; it extrudes along ``v``'s current normal."""
    cfg = cfg or SpikeConfig()
    v.index()
    if not m.fan(v)[2]:
        raise UnsupportedInputError("spike needs an interior vertex")
    if m.dirty:
        m.sync()
    n = v.n
    if length(n) < 1e-12:
        raise ProcgenError("vertex has no normal (degenerate neighbourhood)")
    return SpikeGrower(m, v, n, cfg, speed=cfg.speed, shrink=cfg.shrink, origin=v.p)


def spike_update(g: SpikeGrower, dt: float) -> bool:
    return g.update(dt)


def _roll_ring(m: Mesh, ring: list[VertexHandle], centre, axis, angle: float) -> None:
    R = rotation3(angle, axis)
    slots = np.array([h.index() for h in ring])
    pts = m._vp[slots]
    c = pts.mean(axis=0)
    m._vp[slots] = (pts - c) @ R.T + c
    m.dirty = True


def _circularise(m: Mesh, ring: list[VertexHandle], axis) -> None:
    """Place ring vertices evenly on a circle of the ring's mean radius (plane ⟂ axis)."""
    slots = np.array([h.index() for h in ring])
    pts = m._vp[slots]
    c = pts.mean(axis=0)
    d = pts[0] - c
    d = d - np.dot(d, axis) * axis
    r = float(np.linalg.norm(pts - c, axis=1).mean())
    if np.linalg.norm(d) < 1e-12 or r < 1e-12:
        return
    u = d / np.linalg.norm(d)
    w = np.cross(axis, u)
    if np.dot(np.cross(pts[0] - c, pts[1] - c), axis) < 0:
        w = -w  # keep the ring's winding
    k = len(slots)
    ang = 2 * math.pi * np.arange(k) / k
    m._vp[slots] = c + r * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), w))
    m.dirty = True
