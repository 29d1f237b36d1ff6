"""Projection index maps, mass conservation, and structural invariants."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import volmoments as vm
from volmoments import Orientation, project, project_all
from volmoments.projection import project_subset

from conftest import oracle_project, relabel_cyclic

dims_st = st.tuples(st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))


def test_uniform_xy():
    v = vm.uniform((2, 2, 2), 1)
    img = project(v, Orientation.XY)
    assert img.width == 2 and img.height == 2
    assert np.all(img.pixels == 2)


def test_image_sizes():
    v = vm.uniform((5, 3, 2), 1)
    ps = project_all(v)
    assert (ps.xy.width, ps.xy.height) == (5, 3)
    assert (ps.yz.width, ps.yz.height) == (3, 2)
    assert (ps.zx.width, ps.zx.height) == (2, 5)
    assert (ps.diag.width, ps.diag.height) == (5 + 2 - 1, 3)
    assert (ps.anti.width, ps.anti.height) == (5 + 2 - 1, 3)
    assert ps.anti.origin_offset == 2 - 1
    assert ps.diag.origin_offset == 0


def test_mri_diag_size():
    # (512, 512, 230): the diagonal images are (L+N-1) x M = 741 x 512
    v = vm.Volume(np.zeros((230, 512, 512), np.uint8))
    imgs = project_subset(v, (Orientation.DIAG, Orientation.ANTI))
    for o in (Orientation.DIAG, Orientation.ANTI):
        assert (imgs[o].width, imgs[o].height) == (741, 512)


def test_delta_diag_index():
    v = vm.delta((4, 4, 4), (1, 0, 1), 7)
    img = project(v, Orientation.DIAG)
    nz = np.argwhere(img.pixels)
    assert nz.tolist() == [[0, 2]]  # (i, j) = (x+z, y) = (2, 0), stored [j, i]
    assert img.pixels[0, 2] == 7


def test_delta_anti_negative_index():
    v = vm.delta((4, 4, 4), (0, 2, 3), 7)  # logical i = x - z = -3
    img = project(v, Orientation.ANTI)
    assert img.origin_offset == 3
    assert img.pixels[2, -3 + img.origin_offset] == 7


@given(dims_st, st.integers(0, 5))
@settings(max_examples=30, deadline=None)
def test_projection_matches_oracle(dims, seed):
    v = vm.random(dims, 8, seed)
    for o in Orientation:
        assert np.array_equal(project(v, o).pixels, oracle_project(v, o))


def test_projection_oracle_16x16x16():
    v = vm.random((16, 16, 16), 8, seed=7)
    for o in Orientation:
        assert np.array_equal(project(v, o).pixels, oracle_project(v, o))


@given(dims_st, st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_project_all_equals_individual(dims, seed):
    v = vm.random(dims, 8, seed)
    ps = project_all(v)
    for o in Orientation:
        assert np.array_equal(ps[o].pixels, project(v, o).pixels)


@given(dims_st, st.integers(0, 3))
@settings(max_examples=25, deadline=None)
def test_mass_conservation(dims, seed):
    v = vm.random(dims, 8, seed)
    ps = project_all(v)
    for o in Orientation:
        assert ps[o].mass == v.mass


def test_mass_conservation_16bit():
    v = vm.random((9, 5, 7), 16, seed=3)
    for o in Orientation:
        assert project(v, o).mass == v.mass


def test_permutation_consistency():
    v = vm.random((6, 5, 4), 8, seed=11)
    vp = relabel_cyclic(v)
    assert np.array_equal(project(v, Orientation.YZ).pixels,
                          project(vp, Orientation.XY).pixels)
    vpp = relabel_cyclic(vp)
    assert np.array_equal(project(v, Orientation.ZX).pixels,
                          project(vpp, Orientation.XY).pixels)


def test_anti_is_diag_of_z_flipped():
    v = vm.random((6, 5, 4), 8, seed=13)
    flipped = vm.Volume(np.ascontiguousarray(v.voxels[::-1]), v.spacing)
    assert np.array_equal(project(v, Orientation.ANTI).pixels,
                          project(flipped, Orientation.DIAG).pixels)


def test_projection_counters():
    v = vm.uniform((4, 4, 4), 1)
    ctr = vm.OpCounters()
    project_all(v, ctr)
    assert ctr.multiplications == 0
    assert ctr.additions == 5 * 64


def test_pgm_dump(tmp_path):
    v = vm.random((8, 8, 8), 8, seed=2)
    img = project(v, Orientation.XY)
    path = tmp_path / "xy.pgm"
    vm.write_pgm(img, path)
    data = path.read_bytes()
    header, _, rest = data.partition(b"\n")
    assert header == b"P5"
    comment, _, size_part = rest.partition(b"\n")
    assert comment.startswith(b"#") and b"scale=" in comment
    scale = float(comment.split(b"scale=")[1])
    dims_line, _, rest2 = size_part.partition(b"\n")
    assert dims_line == b"8 8"
    maxval, _, payload = rest2.partition(b"\n")
    assert maxval == b"65535"
    pixels = np.frombuffer(payload, dtype=">u2").reshape(8, 8)
    assert pixels.max() == 65535
    restored = np.round(pixels / scale).astype(np.int64)
    assert np.array_equal(restored, img.pixels)


def test_pixels_are_immutable():
    v = vm.uniform((2, 2, 2), 1)
    img = project(v, Orientation.XY)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 9
