import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from procgen.cylinder import (
    KAPPA,
    SECTIONS,
    GeneralisedCylinder,
    carrier_controls,
    circle_section,
    cylinder_mesh,
    cylinder_stations,
    lobed_section,
    sample_section,
)
from procgen.errors import ProcgenError
from procgen.geom import bezier_eval_many, rotation3


def edge_face_counts(faces):
    counts = {}
    for f in faces:
        for i in range(3):
            e = frozenset((int(f[i]), int(f[(i + 1) % 3])))
            counts[e] = counts.get(e, 0) + 1
    return counts


def straight(n_points=3, scales=None, sections=None, frame=np.eye(3)):
    gc = GeneralisedCylinder()
    for i in range(n_points):
        gc.add(frame[:, 1] * i, frame, 1.0 if scales is None else scales[i],
               0 if sections is None else sections[i])
    return gc


def test_sections_are_closed_loops():
    for loop in SECTIONS:
        assert np.allclose(loop[-1, 3], loop[0, 0], atol=1e-9)
        assert np.allclose(loop[1:, 0], loop[:-1, 3], atol=1e-12)


def test_circle_section_radius():
    pts = bezier_eval_many(circle_section()[np.repeat(np.arange(4), 50)], np.tile(np.linspace(0, 1, 50), 4))
    r = np.linalg.norm(pts, axis=1)
    assert np.abs(r - 1).max() < 1e-3
    assert circle_section()[0, 1, 1] == KAPPA


def test_lobed_section_passes_through_lobes():
    loop = lobed_section(4, 0.7)
    r = np.linalg.norm(loop[:, 0], axis=1)
    assert np.allclose(r[::2], 1.0) and np.allclose(r[1::2], 0.7)


def test_straight_carrier_is_uniform_line():
    c = carrier_controls(np.array([[0, 0, 0], [0, 1, 0], [0, 2, 0]], float))
    t = np.linspace(0, 1, 9)
    pts = bezier_eval_many(c[np.zeros(9, int)], t)
    assert np.allclose(pts[:, 1], t, atol=1e-12)


@pytest.mark.parametrize("around,along,npts", [(16, 8, 3), (3, 2, 2), (24, 5, 4)])
def test_analytic_cylinder(around, along, npts):
    R = rotation3(0.9, np.array([1.0, 2.0, 0.5]))
    gc = straight(npts, frame=R)
    m = cylinder_mesh(gc, around, along)
    stations = (npts - 1) * along + 1
    assert m.n_faces == 2 * around * (stations - 1)
    assert m.n_vertices == around * stations
    p = m.positions()
    axis = R[:, 1]
    radial = p - np.outer(p @ axis, axis)
    assert np.abs(np.linalg.norm(radial, axis=1) - 1.0).max() < 1e-3
    heights = np.sort(np.unique(np.round(p @ axis, 9)))
    assert np.allclose(heights, np.linspace(0, npts - 1, stations), atol=1e-9)


def test_normals_point_outward():
    m = cylinder_mesh(straight(2), 12, 4)
    m.sync()
    p, n, f = m.arrays()
    centroid = p[f].mean(axis=1)
    fn = np.cross(p[f[:, 1]] - p[f[:, 0]], p[f[:, 2]] - p[f[:, 0]])
    radial = centroid.copy()
    radial[:, 1] = 0
    assert (np.einsum("ij,ij->i", fn, radial) > 0).all()


def test_zero_scale_tip_welds():
    around, along = 10, 4
    m = cylinder_mesh(straight(3, scales=[1.0, 0.5, 0.0]), around, along)
    stations = 2 * along + 1
    assert m.n_vertices == around * (stations - 1) + 1
    assert m.n_faces == 2 * around * (stations - 2) + around
    counts = edge_face_counts(m.face_indices())
    assert set(counts.values()) <= {1, 2}
    tip = int(np.argmax(m.positions()[:, 1]))
    assert all(c == 2 for e, c in counts.items() if tip in e)


def test_midpoint_morph_is_average_of_sections():
    around, along = 16, 8
    gc = straight(2, sections=[0, 1])
    m = cylinder_mesh(gc, around, along)
    p = m.positions()
    ring = p[(along // 2) * around:(along // 2 + 1) * around]
    expected = 0.5 * (sample_section(0, around) + sample_section(1, around))
    # default frame: loop x goes to left (+X), loop y to up (+Z); the centre is (0, 0.5, 0)
    assert np.allclose(ring[:, 1], 0.5, atol=1e-12)
    assert np.abs(ring[:, [0, 2]] - expected).max() < 1e-6


def test_scale_interpolates_linearly():
    _, _, loops = cylinder_stations(straight(2, scales=[1.0, 3.0]), 8, 4)
    radii = np.linalg.norm(loops[:, 0], axis=1)
    assert np.allclose(radii, [1.0, 1.5, 2.0, 2.5, 3.0])


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.05, 2), st.integers(0, 1)),
                min_size=2, max_size=6),
       st.integers(3, 12), st.integers(2, 6))
def test_manifold_with_boundary_on_end_rings(ctrl, around, along):
    from procgen.turtle import Turtle
    t = Turtle()
    t.begin_cylinder()
    for bend, roll, scale, section in ctrl[1:]:
        t.roll(roll)
        t.pitch(bend)
        t.set_scale(scale)
        t.set_section(section)
        t.move(1.0)
        t.add_point()
    gc = t.state.builder
    m = cylinder_mesh(gc, around, along)
    counts = edge_face_counts(m.face_indices())
    assert set(counts.values()) <= {1, 2}
    stations = (len(gc) - 1) * along + 1
    end_rings = set(range(around)) | set(range((stations - 1) * around, stations * around))
    for e, c in counts.items():
        if c == 1:
            assert e <= end_rings


def test_cylinder_errors():
    with pytest.raises(ProcgenError):
        cylinder_mesh(straight(1))
    with pytest.raises(ValueError):
        cylinder_mesh(straight(2), 2, 4)
    with pytest.raises(ValueError):
        cylinder_mesh(straight(2), 8, 1)
    with pytest.raises(ProcgenError):
        GeneralisedCylinder().add(np.zeros(3), np.eye(3), 1.0, 7)


def test_slerped_frames_follow_a_bend():
    gc = GeneralisedCylinder()
    gc.add(np.zeros(3), np.eye(3), 1.0, 0)
    R = rotation3(math.pi / 2, np.array([1.0, 0, 0]))
    gc.add(np.array([0, 1.0, 0]), R, 1.0, 0)
    _, frames, _ = cylinder_stations(gc, 8, 4)
    assert np.allclose(frames[0], np.eye(3)) and np.allclose(frames[-1], R)
    for F in frames:
        assert np.abs(F.T @ F - np.eye(3)).max() < 1e-9
