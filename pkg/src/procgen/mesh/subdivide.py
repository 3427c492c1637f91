"""1-to-4 triangle splitting: plain midpoint split and Loop smoothing."""

from __future__ import annotations

import math

import numpy as np

from ..errors import UnsupportedInputError
from .kernel import Mesh


def split_connectivity(faces: np.ndarray, nv: int):
    """Unique edges of ``faces`` and the 4-way split using edge-midpoint vertices.

    Returns ``(edges, edge_of_corner, new_faces)``. Edge ``k`` becomes the new
    vertex ``nv + k``; ``edge_of_corner[f, i]`` is the edge index of local edge
    ``i`` of face ``f``.
    """
    faces = np.asarray(faces, dtype=np.int64)
    a = faces.reshape(-1)
    b = faces[:, [1, 2, 0]].reshape(-1)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    key = lo * max(nv, 1) + hi
    ukey, inv = np.unique(key, return_inverse=True)
    edges = np.stack([ukey // max(nv, 1), ukey % max(nv, 1)], axis=1)
    eoc = inv.reshape(-1, 3)
    m = nv + eoc  # midpoint vertex of local edges 0 (ab), 1 (bc), 2 (ca)
    v0, v1, v2 = faces[:, 0], faces[:, 1], faces[:, 2]
    new_faces = np.concatenate([
        np.stack([v0, m[:, 0], m[:, 2]], axis=1),
        np.stack([v1, m[:, 1], m[:, 0]], axis=1),
        np.stack([v2, m[:, 2], m[:, 1]], axis=1),
        np.stack([m[:, 0], m[:, 1], m[:, 2]], axis=1),
    ])
    return edges, eoc, new_faces


def midpoint_split(verts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    verts = np.asarray(verts, dtype=float)
    edges, _, new_faces = split_connectivity(faces, len(verts))
    mids = 0.5 * (verts[edges[:, 0]] + verts[edges[:, 1]])
    return np.concatenate([verts, mids]), new_faces


def loop_beta(n: int) -> float:
    """Loop's even-vertex neighbour weight for valence ``n``."""
    return (5.0 / 8.0 - (3.0 / 8.0 + 0.25 * math.cos(2.0 * math.pi / n)) ** 2) / n


def loop_step(verts: np.ndarray, faces: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One level of Loop subdivision on compact arrays (boundaries use the crease masks)."""
    verts = np.asarray(verts, dtype=float)
    faces = np.asarray(faces, dtype=np.int64)
    nv = len(verts)
    edges, eoc, new_faces = split_connectivity(faces, nv)
    ne = len(edges)

    count = np.bincount(eoc.reshape(-1), minlength=ne)
    if np.any(count > 2):
        raise UnsupportedInputError("Loop subdivision needs a manifold mesh (edge with >2 faces)")
    opp_sum = np.zeros((ne, 3))
    for i in range(3):
        np.add.at(opp_sum, eoc[:, i], verts[faces[:, (i + 2) % 3]])
    ends = verts[edges[:, 0]] + verts[edges[:, 1]]
    interior = count == 2
    odd = np.where(interior[:, None], 0.375 * ends + 0.125 * opp_sum, 0.5 * ends)

    nbr_sum = np.zeros((nv, 3))
    valence = np.zeros(nv, dtype=np.int64)
    np.add.at(nbr_sum, edges[:, 0], verts[edges[:, 1]])
    np.add.at(nbr_sum, edges[:, 1], verts[edges[:, 0]])
    np.add.at(valence, edges[:, 0], 1)
    np.add.at(valence, edges[:, 1], 1)
    bnd = edges[~interior]
    bnd_sum = np.zeros((nv, 3))
    bnd_deg = np.zeros(nv, dtype=np.int64)
    np.add.at(bnd_sum, bnd[:, 0], verts[bnd[:, 1]])
    np.add.at(bnd_sum, bnd[:, 1], verts[bnd[:, 0]])
    np.add.at(bnd_deg, bnd[:, 0], 1)
    np.add.at(bnd_deg, bnd[:, 1], 1)

    even = verts.copy()
    inner = (bnd_deg == 0) & (valence > 0)
    beta = np.array([loop_beta(int(n)) if n > 0 else 0.0 for n in valence])
    even[inner] = (1.0 - valence[inner] * beta[inner])[:, None] * verts[inner] + beta[inner, None] * nbr_sum[inner]
    crease = bnd_deg == 2
    even[crease] = 0.75 * verts[crease] + 0.125 * bnd_sum[crease]
    # corner-like boundary vertices (more than two boundary edges) stay put
    return np.concatenate([even, odd]), new_faces


def smooth_subdivide(m: Mesh, levels: int) -> None:
    """Loop-subdivide ``m`` in place.

    Existing vertices keep their handles (with smoothed positions); every old
    face is retired and replaced by four new ones.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    topo = m.topology()
    if not topo.manifold:
        raise UnsupportedInputError("Loop subdivision needs a manifold, consistently oriented mesh")
    vs = m.vertex_slots()
    fs = m.face_slots()
    remap = np.full(m._nv, -1, dtype=np.int64)
    remap[vs] = np.arange(len(vs))
    verts = m._vp[vs]
    faces = remap[m._fv[fs]]
    for _ in range(levels):
        verts, faces = loop_step(verts, faces)
    # write back: original vertices keep slots; new ones are appended
    m._vp[vs] = verts[: len(vs)]
    new_slots = np.asarray(m.add_vertices(verts[len(vs):]), dtype=np.int64)
    slot_of = np.concatenate([vs, new_slots])
    m._falive[fs] = False
    m.add_faces_indices(slot_of[faces])
    m.dirty = True
