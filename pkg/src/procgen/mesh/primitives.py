"""Closed primitive meshes and marching-cubes isosurfaces."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .kernel import Mesh
from .subdivide import midpoint_split


def _orient_outward(verts: np.ndarray, faces: np.ndarray) -> np.ndarray:
    """Flip any face whose normal points toward the origin (convex, centred shapes only)."""
    p = verts[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    inward = np.einsum("ij,ij->i", n, p.mean(axis=1)) < 0
    faces = faces.copy()
    faces[inward] = faces[inward][:, [0, 2, 1]]
    return faces


def icosahedron_arrays() -> tuple[np.ndarray, np.ndarray]:
    t = (1.0 + math.sqrt(5.0)) / 2.0
    v = np.array([
        [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
        [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
        [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
    ], dtype=float)
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    return v, _orient_outward(v, f)


def icosahedron() -> Mesh:
    """Regular icosahedron inscribed in the unit sphere."""
    return Mesh.from_arrays(*icosahedron_arrays())


def cube() -> Mesh:
    """Unit cube (side 1) centred at the origin, two triangles per side."""
    v = np.array([[x, y, z] for x in (-0.5, 0.5) for y in (-0.5, 0.5) for z in (-0.5, 0.5)])
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    f = np.array([t for a, b, c, d in quads for t in ((a, b, c), (a, c, d))], dtype=np.int64)
    return Mesh.from_arrays(v, _orient_outward(v, f))


def sphere(level: int = 3) -> Mesh:
    """Unit icosphere: the icosahedron split ``level`` times, reprojected each time."""
    if level < 0:
        raise ValueError("sphere level must be >= 0")
    v, f = icosahedron_arrays()
    for _ in range(level):
        v, f = midpoint_split(v, f)
        v /= np.linalg.norm(v, axis=1, keepdims=True)
    return Mesh.from_arrays(v, f)


PRIMITIVES = {"sphere": sphere, "cube": cube, "icosahedron": icosahedron}


def create_primitive(kind: str, **params) -> Mesh:
    try:
        ctor = PRIMITIVES[kind]
    except KeyError:
        raise ValueError(f"unknown primitive {kind!r}; expected one of {sorted(PRIMITIVES)}") from None
    return ctor(**params)


def iso(r: int, f: Callable, vectorized: bool = False) -> Mesh:
    """Polygonise ``{f = 0}`` over ``[-1, 1]^3`` sampled on an ``r^3`` lattice.

    ``f`` takes ``(x, y, z)``; with ``vectorized=True`` it receives whole
    coordinate arrays at once. Triangles face the positive side of ``f``.
    """
    from skimage.measure import marching_cubes

    if r < 2:
        raise ValueError("iso resolution must be >= 2")
    g = np.linspace(-1.0, 1.0, r)
    X, Y, Z = np.meshgrid(g, g, g, indexing="ij")
    if vectorized:
        F = np.asarray(f(X, Y, Z), dtype=float)
    else:
        F = np.array([f(float(x), float(y), float(z)) for x, y, z in zip(X.ravel(), Y.ravel(), Z.ravel())],
                     dtype=float).reshape(X.shape)
    if not np.all(np.isfinite(F)):
        raise ValueError("iso field must be finite on the sampling grid")
    if F.min() > 0.0 or F.max() < 0.0 or F.min() == F.max():
        return Mesh()
    h = 2.0 / (r - 1)
    verts, faces, _, _ = marching_cubes(F, 0.0, spacing=(h, h, h), method="lewiner", allow_degenerate=False)
    verts = verts.astype(float) - 1.0
    faces = faces.astype(np.int64)
    verts, faces = weld(verts, faces)
    return Mesh.from_arrays(verts, faces)


def weld(verts: np.ndarray, faces: np.ndarray, tol: float = 1e-9) -> tuple[np.ndarray, np.ndarray]:
    """Merge vertices closer than ``tol`` (via quantised keys) and drop collapsed faces."""
    q = np.round(verts / tol).astype(np.int64)
    _, first, inv = np.unique(q, axis=0, return_index=True, return_inverse=True)
    inv = inv.reshape(-1)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_verts = verts[first[order]]
    faces = rank[inv[faces]]
    keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    return new_verts, faces[keep]
