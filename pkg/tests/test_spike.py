import numpy as np
import pytest

from procgen.errors import UnsupportedInputError
from procgen.mesh import Mesh, sphere
from procgen.ops import ring_radius
from procgen.spike import DONE, INSET, MOVE, SpikeConfig, spike_new


def grow(cfg=None, dt=1 / 240, vertex=100, level=3):
    m = sphere(level)
    m.sync()
    g = spike_new(m, m.vertex(vertex), cfg)
    steps = 0
    while g.update(dt):
        steps += 1
        assert steps < 100_000
    return m, g, steps


def radii(m, g):
    return [ring_radius(np.array([h.p for h in ring])) for ring in g.rings]


def test_state_machine_sequence():
    m = sphere(2)
    m.sync()
    g = spike_new(m, m.vertex(10), SpikeConfig(num_segs=2))
    seen = [g.state]
    while g.update(1 / 60):
        if g.state != seen[-1]:
            seen.append(g.state)
    assert seen == [MOVE, INSET, MOVE, DONE]
    assert g.update(1 / 60) is False


def test_default_constants_finish_with_four_insets():
    m, g, steps = grow()
    assert g.done and g.insets == 4
    assert m.is_manifold() and m.euler_characteristic() == 2
    disp = np.dot(g.v.p - g.origin, g.n)
    assert 0.5 <= disp <= 0.5 + 5 * 4 / 240 + 1e-9


@pytest.mark.parametrize("dt", [1 / 120, 1 / 240, 1 / 1000])
def test_segment_mode_taper_is_dt_independent(dt):
    m, g, _ = grow(dt=dt)
    r = radii(m, g)
    assert np.allclose(np.array(r[1:]) / r[:-1], 0.8, atol=1e-9)


def test_frame_mode_applies_shrink_every_update():
    m, g, _ = grow(SpikeConfig(shrink_mode="frame", shrink=0.99))
    r = radii(m, g)
    assert all(b < a for a, b in zip(r, r[1:]))
    per_seg = 0.99 * 0.99 ** 7  # inset scale then seven shrinking moves per segment
    assert np.allclose(np.array(r[1:]) / r[:-1], per_seg, rtol=1e-9)


def test_outer_rings_are_planar_and_perpendicular():
    m, g, _ = grow()
    for ring in g.rings:
        h = [np.dot(v.p, g.n) for v in ring]
        assert max(h) - min(h) < 1e-9


def test_callback_can_redirect_growth():
    calls = []

    def turn(gr):
        calls.append(gr.seg)
        gr.speed = -gr.speed

    m, g, _ = grow(SpikeConfig(num_segs=3, on_segment=turn))
    assert calls == [2, 3, 4]
    assert m.is_manifold()


def test_roll_and_circularise_keep_topology():
    m, g, _ = grow(SpikeConfig(roll_per_segment=0.3, circularise=True))
    assert m.is_manifold() and m.euler_characteristic() == 2
    for ring in g.rings[1:]:
        pts = np.array([v.p for v in ring])
        d = np.linalg.norm(pts - pts.mean(axis=0), axis=1)
        assert np.ptp(d) < 1e-9


def test_deleted_tip_ends_growth():
    m = sphere(2)
    m.sync()
    g = spike_new(m, m.vertex(5))
    m.delete_vertex(m.vertex(5))
    assert g.update(1 / 60) is False and g.done


def test_config_validation():
    for bad in ({"speed": 0}, {"seg_length": -1}, {"num_segs": 0}, {"shrink": 1.5},
                {"inset_scale": 0}, {"shrink_mode": "other"}):
        with pytest.raises(ValueError):
            SpikeConfig(**bad)


def test_needs_interior_vertex():
    flat = Mesh.from_arrays([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
    with pytest.raises(UnsupportedInputError):
        spike_new(flat, flat.vertex(0))
