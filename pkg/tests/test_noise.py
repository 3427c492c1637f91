import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from procgen.noise import noise, noise_seed, set_noise_seed

coord = st.floats(-100, 100, allow_nan=False)


def test_zero_on_integer_lattice():
    for x, y, z in itertools.product(range(-3, 4), repeat=3):
        assert noise(x, y, z) == 0.0


@given(coord, coord, coord)
def test_bounded(x, y, z):
    assert -1.0 <= noise(x, y, z) <= 1.0


@given(coord, coord)
def test_pure(x, y):
    assert noise(x, y) == noise(x, y)


def test_not_constant_off_lattice():
    vals = {round(noise(0.1 * i, 0.37, 0.71), 9) for i in range(50)}
    assert len(vals) > 40


def test_seed_changes_field_and_reset_restores():
    ref = noise(0.3, 0.6, 0.9)
    set_noise_seed(7)
    assert noise_seed() == 7
    seeded = noise(0.3, 0.6, 0.9)
    assert seeded != ref
    assert noise(2, 3, 4) == 0.0
    set_noise_seed(7)
    assert noise(0.3, 0.6, 0.9) == seeded
    set_noise_seed(None)
    assert noise(0.3, 0.6, 0.9) == ref


def test_continuity():
    eps = 1e-7
    assert noise(0.5, 0.25, 0.125) == pytest.approx(noise(0.5 + eps, 0.25, 0.125), abs=1e-5)
