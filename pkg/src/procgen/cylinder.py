"""Generalised cylinders: cross-section loops swept and morphed along a carrier curve."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ProcgenError
from .geom import Quat, bezier_eval_many, slerp
from .mesh.kernel import Mesh

KAPPA = 0.5523  # quarter-circle handle length


def circle_section() -> np.ndarray:
    """Unit circle as four cubic Bézier segments, shape ``(4, 4, 2)``."""
    segs = []
    for k in range(4):
        a0, a1 = k * math.pi / 2, (k + 1) * math.pi / 2
        p0 = np.array([math.cos(a0), math.sin(a0)])
        p3 = np.array([math.cos(a1), math.sin(a1)])
        t0 = np.array([-math.sin(a0), math.cos(a0)])
        t3 = np.array([-math.sin(a1), math.cos(a1)])
        segs.append([p0, p0 + KAPPA * t0, p3 - KAPPA * t3, p3])
    return np.array(segs)


def closed_catmull_rom(points: np.ndarray) -> np.ndarray:
    """Closed Bézier loop through ``points`` (Catmull-Rom tangents)."""
    p = np.asarray(points, dtype=float)
    prev, nxt, nxt2 = np.roll(p, 1, axis=0), np.roll(p, -1, axis=0), np.roll(p, -2, axis=0)
    return np.stack([p, p + (nxt - prev) / 6.0, nxt - (nxt2 - p) / 6.0, nxt], axis=1)


def lobed_section(lobes: int = 4, inner: float = 0.7) -> np.ndarray:
    """Rounded profile alternating between radius 1 and ``inner``."""
    k = 2 * lobes
    ang = 2 * math.pi * np.arange(k) / k
    r = np.where(np.arange(k) % 2 == 0, 1.0, inner)
    return closed_catmull_rom(np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1))


SECTIONS: list[np.ndarray] = [circle_section(), lobed_section()]


def sample_section(section, n: int) -> np.ndarray:
    """``n`` points at uniform loop parameter; ``section`` is an index or a ``(k, 4, 2)`` loop."""
    loop = SECTIONS[section] if isinstance(section, (int, np.integer)) else np.asarray(section, dtype=float)
    k = len(loop)
    u = np.arange(n) * (k / n)
    seg = np.minimum(u.astype(int), k - 1)
    return bezier_eval_many(loop[seg], u - seg)


@dataclass
class ControlPoint:
    position: np.ndarray
    frame: np.ndarray     # columns: left, heading, up
    scale: float
    section: int


@dataclass
class GeneralisedCylinder:
    points: list = field(default_factory=list)

    def add(self, position, frame, scale: float, section: int) -> None:
        if not 0 <= section < len(SECTIONS):
            raise ProcgenError(f"unknown cross section {section}; have 0..{len(SECTIONS) - 1}")
        self.points.append(ControlPoint(np.array(position, dtype=float), np.array(frame, dtype=float),
                                        float(scale), int(section)))

    def __len__(self) -> int:
        return len(self.points)


def carrier_controls(positions: np.ndarray) -> np.ndarray:
    """Bézier controls ``(n-1, 4, 3)`` of the Catmull-Rom spline through ``positions``.

    End tangents come from reflected phantom points, so a straight run of
    evenly spaced points gives a uniformly parametrised line.
    """
    p = np.asarray(positions, dtype=float)
    ext = np.concatenate([2 * p[:1] - p[1:2], p, 2 * p[-1:] - p[-2:-1]])
    a, b, c, d = ext[:-3], ext[1:-2], ext[2:-1], ext[3:]
    return np.stack([b, b + (c - a) / 6.0, c - (d - b) / 6.0, c], axis=1)


def cylinder_stations(gc: GeneralisedCylinder, samples_around: int = 16, samples_along: int = 8):
    """Ring centres, frames and local 2D loops (already scaled) at every station."""
    pts = gc.points
    if len(pts) < 2:
        raise ProcgenError("a generalised cylinder needs at least 2 control points")
    if samples_around < 3 or samples_along < 2:
        raise ValueError("need samples_around >= 3 and samples_along >= 2")
    nseg = len(pts) - 1
    seg = np.repeat(np.arange(nseg), samples_along)
    t = np.tile(np.arange(samples_along) / samples_along, nseg)
    seg = np.append(seg, nseg - 1)
    t = np.append(t, 1.0)

    centres = bezier_eval_many(carrier_controls(np.array([c.position for c in pts]))[seg], t)
    quats = [Quat.from_matrix(c.frame) for c in pts]
    frames = np.array([slerp(quats[s], quats[s + 1], float(u)).matrix3() for s, u in zip(seg, t)])
    scales = np.array([c.scale for c in pts])
    scale = scales[seg] + (scales[seg + 1] - scales[seg]) * t

    lib = {i: sample_section(i, samples_around) for i in {c.section for c in pts}}
    a = np.array([lib[pts[s].section] for s in seg])
    b = np.array([lib[pts[s + 1].section] for s in seg])
    loops = (a + (b - a) * t[:, None, None]) * scale[:, None, None]
    return centres, frames, loops


def cylinder_mesh(gc: GeneralisedCylinder, samples_around: int = 16, samples_along: int = 8,
                  collapse_eps: float = 1e-12) -> Mesh:
    """Triangulate the swept surface. Ends stay open; zero-scale rings weld to one vertex."""
    centres, frames, loops = cylinder_stations(gc, samples_around, samples_along)
    n = samples_around
    L, U = frames[:, :, 0], frames[:, :, 2]
    rings = centres[:, None, :] + loops[..., :1] * L[:, None, :] + loops[..., 1:] * U[:, None, :]

    collapsed = np.abs(loops).max(axis=(1, 2)) <= collapse_eps
    verts, index = [], []
    for ring, point in zip(rings, collapsed):
        base = sum(len(v) for v in verts)
        if point:
            verts.append(ring[:1])
            index.append(np.full(n, base))
        else:
            verts.append(ring)
            index.append(base + np.arange(n))
    verts = np.concatenate(verts)
    index = np.array(index)

    a, b = index[:-1], index[1:]
    a1, b1 = np.roll(a, -1, axis=1), np.roll(b, -1, axis=1)
    tris = np.concatenate([np.stack([a, b1, a1], -1).reshape(-1, 3), np.stack([a, b, b1], -1).reshape(-1, 3)])
    keep = (tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2]) & (tris[:, 0] != tris[:, 2])
    return Mesh.from_arrays(verts, tris[keep])
