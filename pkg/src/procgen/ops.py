"""Local modelling operations around a single vertex."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedInputError
from .geom import normalized
from .mesh.kernel import Mesh, Pos, VertexHandle


@dataclass
class Cap:
    """Fan of pos'es over the faces around an extrusion tip, in winding order."""

    poses: list[Pos]

    @property
    def tip(self) -> VertexHandle:
        return self.poses[0].v

    def __len__(self) -> int:
        return len(self.poses)


def capov(cap: Cap) -> list[VertexHandle]:
    """Outer vertices of the cap, one per fan face, excluding the tip."""
    return [p.other() for p in cap.poses]


def inset(m: Mesh, v: VertexHandle, s: float) -> Cap:
    """Zero-distance extrusion of the faces around ``v``, then scale the new loop by ``s``.

    The one-ring loop is duplicated; the faces around ``v`` are rewired to the
    copy and a strip of ``2k`` triangles joins old and new loops. The copy is
    scaled toward its centroid. Returns the fan around ``v``.
    """
    if not 0.0 < s <= 1.0:
        raise ValueError(f"inset scale must be in (0, 1], got {s}")
    ring, faces, closed = m.fan(v)
    if not closed:
        raise UnsupportedInputError("inset needs an interior vertex (closed one-ring)")
    k = len(ring)
    if k < 3:
        raise UnsupportedInputError(f"inset needs valence >= 3, got {k}")
    old = np.array(ring, dtype=np.int64)
    pts = m._vp[old].copy()
    centre = pts.mean(axis=0)
    new = np.array(m.add_vertices(centre + (pts - centre) * s), dtype=np.int64)
    m._vc[new] = m._vc[old]
    tip = v.index()
    for i, f in enumerate(faces):
        m._fv[f] = (tip, new[i], new[(i + 1) % k])
    side = []
    for i in range(k):
        j = (i + 1) % k
        side.append((old[i], old[j], new[j]))
        side.append((old[i], new[j], new[i]))
    m.add_faces_indices(side)
    return Cap([Pos(v, 0, m._fhandle(f)) for f in faces])


def extrude(m: Mesh, v: VertexHandle, d, mag: float) -> Cap:
    """Inset at unit scale, then push ``v`` and the new loop along ``d`` by ``mag``."""
    off = normalized(d) * mag
    cap = inset(m, v, 1.0)
    slots = [v.index()] + [h.index() for h in capov(cap)]
    m._vp[slots] += off
    m.dirty = True
    return cap


def flattenvl(m: Mesh, vl: list[VertexHandle], p, n) -> None:
    """Project each vertex along ``n`` onto the plane through ``p``."""
    n = normalized(n)
    p = np.asarray(p, dtype=float)
    for v in vl:
        s = v.index()
        q = m._vp[s]
        m._vp[s] = q - np.dot(q - p, n) * n
    m.dirty = True


def ring_radius(points: np.ndarray) -> float:
    """Mean distance of ``points`` from their centroid."""
    points = np.asarray(points, dtype=float)
    return float(np.linalg.norm(points - points.mean(axis=0), axis=1).mean())
