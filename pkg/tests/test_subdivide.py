import math

import numpy as np
import pytest

from procgen.errors import UnsupportedInputError
from procgen.mesh import Mesh, cube, icosahedron, smooth_subdivide, sphere
from procgen.mesh.subdivide import loop_beta, loop_step, midpoint_split


@pytest.mark.parametrize("levels,F,V", [(1, 80, 42), (2, 320, 162)])
def test_icosahedron_counts(levels, F, V):
    m = icosahedron()
    smooth_subdivide(m, levels)
    assert (m.n_faces, m.n_vertices) == (F, V)
    assert m.is_manifold() and m.euler_characteristic() == 2


def test_loop_beta_reference_values():
    # regular valence: 1/16; valence 3: 3/16 (Loop's weights agree with Warren's there)
    assert loop_beta(6) == pytest.approx(1 / 16)
    assert loop_beta(3) == pytest.approx(3 / 16)
    n = 5
    assert loop_beta(n) == pytest.approx((5 / 8 - (3 / 8 + math.cos(2 * math.pi / n) / 4) ** 2) / n)


def test_masks_on_icosahedron_by_hand():
    v, f = icosahedron().positions(), icosahedron().face_indices()
    nv, nf = loop_step(v, f)
    b = loop_beta(5)
    ring = {int(x) for t in f if 0 in t for x in t} - {0}
    want = (1 - 5 * b) * v[0] + b * v[sorted(ring)].sum(axis=0)
    assert np.allclose(nv[0], want)
    # an edge point: 3/8 of the endpoints, 1/8 of the opposite corners
    a, c = 0, int(f[0][1])
    opp = [int(x) for t in f if a in t and c in t for x in t if x not in (a, c)]
    edge_pt = 3 / 8 * (v[a] + v[c]) + 1 / 8 * v[opp].sum(axis=0)
    assert np.min(np.linalg.norm(nv[12:] - edge_pt, axis=1)) < 1e-12


def test_subdivision_shrinks_toward_limit_surface():
    m = sphere(1)
    smooth_subdivide(m, 1)
    r = np.linalg.norm(m.positions(), axis=1)
    assert np.all(r <= 1.0 + 1e-12) and np.all(r > 0.9)


def test_boundary_uses_crease_rules():
    # flat open strip: boundary vertices follow the cubic B-spline mask of their boundary neighbours
    pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0], [2, 1, 0]], dtype=float)
    faces = np.array([[0, 1, 4], [0, 4, 3], [1, 2, 5], [1, 5, 4]])
    nv, nf = loop_step(pts, faces)
    assert np.allclose(nv[:, 2], 0)
    assert np.allclose(nv[0], 0.75 * pts[0] + 0.125 * (pts[1] + pts[3]))
    assert np.allclose(nv[1], pts[1])  # straight boundary run stays straight
    # boundary edge points are plain midpoints; the interior diagonal uses the 3/8, 1/8 mask
    mids = {tuple(np.round(x, 12)) for x in nv[6:]}
    assert (0.5, 0.0, 0.0) in mids
    assert (0.5, 0.5, 0.0) in mids  # diagonal 0-4: 3/8(v0+v4) + 1/8(v1+v3)
    m = Mesh.from_arrays(pts, faces)
    smooth_subdivide(m, 2)
    assert m.is_manifold() and m.euler_characteristic() == 1


def test_midpoint_split_counts():
    v, f = midpoint_split(cube().positions(), cube().face_indices())
    assert (len(v), len(f)) == (8 + 18, 48)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        smooth_subdivide(cube(), 0)
    pts = [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]]
    fin = Mesh.from_arrays(pts, [[0, 1, 2], [0, 1, 3], [0, 1, 4]])  # one edge, three faces
    with pytest.raises(UnsupportedInputError):
        smooth_subdivide(fin, 1)


def test_handles_to_old_vertices_survive():
    m = icosahedron()
    v = m.vertex(5)
    smooth_subdivide(m, 1)
    assert v.valid()
