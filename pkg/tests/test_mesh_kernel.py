from collections import deque

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from procgen.errors import BoundaryError, StaleHandleError, UnsupportedInputError
from procgen.mesh import Mesh, Pos, cube, icosahedron, loopv, nearbyv, pos_flip, sphere


def all_poses(m: Mesh) -> list[Pos]:
    out = []
    for f in m.facelist():
        for v in f.vertices():
            out += [Pos(v, 0, f), Pos(v, 1, f)]
    return out


def adjacency(m: Mesh) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {int(s): set() for s in m.vertex_slots()}
    for a, b, c in m.face_indices():
        for x, y in ((a, b), (b, c), (c, a)):
            adj[int(x)].add(int(y))
            adj[int(y)].add(int(x))
    return adj


def test_icosahedron_has_120_cell_tuples():
    m = icosahedron()
    keys = {p.key() for p in all_poses(m)}
    assert len(keys) == 120


@pytest.mark.parametrize("axis", "VEF")
def test_flips_are_involutions(axis):
    m = icosahedron()
    for p in all_poses(m):
        q = pos_flip(p, axis)
        assert q.key() != p.key()
        assert pos_flip(q, axis).key() == p.key()


def test_flips_change_only_their_own_cell():
    m = icosahedron()
    for p in all_poses(m):
        v, e, f = p.key()
        assert p.flip_v().key()[1:] == (e, f) and p.flip_v().key()[0] != v
        assert p.flip_e().key()[0::2] == (v, f)
        assert p.flip_f().key()[:2] == (v, e)


def test_flip_bfs_reaches_every_tuple():
    m = icosahedron()
    start = all_poses(m)[0]
    seen = {start.key()}
    q = deque([start])
    while q:
        p = q.popleft()
        for n in (p.flip_v(), p.flip_e(), p.flip_f()):
            if n.key() not in seen:
                seen.add(n.key())
                q.append(n)
    assert len(seen) == 120


def test_flip_f_on_boundary_raises():
    m = Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
    p = Pos(m.vertex(0), 0, m.face(0))
    with pytest.raises(BoundaryError):
        p.flip_f()


def test_handles_detect_deletion():
    m = icosahedron()
    v = m.vertex(3)
    f = m.face(m.faces_of(v)[0])
    m.delete_vertex(v)
    assert not v.valid() and not f.valid()
    with pytest.raises(StaleHandleError):
        _ = v.p
    with pytest.raises(StaleHandleError):
        f.index()


def test_handles_follow_compaction():
    m = icosahedron()
    keep = m.vertex(11)
    p_before = keep.p.copy()
    m.delete_vertex(m.vertex(0))
    m.compact()
    assert keep.valid()
    assert keep.index() < 11
    assert np.array_equal(keep.p, p_before)
    assert m.n_vertices == 11 and m.n_faces == 15


def test_handle_equality_is_by_identity_not_slot():
    m = icosahedron()
    a, b = m.vertex(2), m.vertex(2)
    assert a == b and hash(a) == hash(b)
    assert m.vertex(2) != m.vertex(3)


@pytest.mark.parametrize("make", [icosahedron, cube, lambda: sphere(2)])
def test_closed_primitives_counts(make):
    m = make()
    assert m.is_manifold() and m.is_closed()
    assert m.euler_characteristic() == 2
    assert m.topology().consistent


def test_loopv_is_a_cycle_of_neighbours():
    m = sphere(2)
    adj = adjacency(m)
    for v in m.vertexlist()[::7]:
        ring = [h.index() for h in loopv(v)]
        assert set(ring) == adj[v.index()]
        for a, b in zip(ring, ring[1:] + ring[:1]):
            assert b in adj[a]


def test_loopv_winding_matches_faces():
    m = icosahedron()
    v = m.vertex(0)
    ring = [h.index() for h in loopv(v)]
    tris = {tuple(np.roll(t, -int(np.nonzero(t == 0)[0][0]))) for t in m.face_indices() if 0 in t}
    for a, b in zip(ring, ring[1:] + ring[:1]):
        assert (0, a, b) in tris


@given(st.integers(0, 161), st.integers(0, 4))
def test_nearbyv_matches_bfs(start, n):
    m = sphere(2)
    adj = adjacency(m)
    dist = {start: 0}
    q = deque([start])
    while q:
        s = q.popleft()
        for t in adj[s]:
            if t not in dist:
                dist[t] = dist[s] + 1
                q.append(t)
    want = {s for s, d in dist.items() if d <= n}
    got = [h.index() for h in nearbyv(m.vertex(start), n)]
    assert len(got) == len(set(got))
    assert set(got) == want
    assert got[0] == start


def test_open_fan_runs_boundary_to_boundary():
    # a square of two triangles; vertex 0 sits on the boundary
    m = Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], [[0, 1, 2], [0, 2, 3]])
    ring, faces, closed = m.fan(m.vertex(0))
    assert not closed and ring == [1, 2, 3] and len(faces) == 2


def test_non_manifold_fan_detected():
    # two triangles sharing only vertex 0 (bow tie)
    pts = [[0, 0, 0], [1, 0, 0], [1, 1, 0], [-1, 0, 0], [-1, -1, 0]]
    m = Mesh.from_arrays(pts, [[0, 1, 2], [0, 3, 4]])
    with pytest.raises(UnsupportedInputError):
        m.fan(m.vertex(0))


def test_sync_gives_outward_unit_normals():
    m = sphere(2)
    m.sync()
    assert not m.dirty
    for v in m.vertexlist():
        assert np.dot(v.n, v.p) > 0.99
        assert np.linalg.norm(v.n) == pytest.approx(1.0)


def test_position_write_marks_dirty():
    m = icosahedron()
    m.sync()
    v = m.vertex(0)
    v.p = v.p * 2
    assert m.dirty


def test_face_validation():
    m = Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [0, 1, 0]], np.zeros((0, 3), dtype=int))
    with pytest.raises(ValueError):
        m.add_faces_indices([[0, 0, 1]])
    with pytest.raises(ValueError):
        m.add_faces_indices([[0, 1, 7]])


def test_copy_is_independent():
    m = icosahedron()
    c = m.copy()
    c.vertex(0).p = [9, 9, 9]
    assert not np.allclose(m.vertex(0).p, [9, 9, 9])


def test_transform_and_bounds():
    from procgen.geom import scale

    m = cube()
    m.transform(scale(2))
    lo, hi = m.bounds()
    assert np.allclose(lo, -1) and np.allclose(hi, 1)
