"""Centroid, central/normalized moments, spacing, and shape descriptors."""

import numpy as np
import pytest

import volmoments as vm
from volmoments import moments3d


def _mu_direct(volume, order):
    """Direct-definition central moments: rescan the volume in float64."""
    v = volume.voxels.astype(np.float64)
    n, m, l = v.shape
    mass = v.sum()
    x = np.arange(l, dtype=np.float64)
    y = np.arange(m, dtype=np.float64)
    z = np.arange(n, dtype=np.float64)
    cx = (v.sum(axis=(0, 1)) @ x) / mass
    cy = (v.sum(axis=(0, 2)) @ y) / mass
    cz = (v.sum(axis=(1, 2)) @ z) / mass
    out = {}
    for (p, q, r) in moments3d.moment_indices(order):
        out[(p, q, r)] = float(np.einsum(
            "zyx,x,y,z->", v, (x - cx) ** p, (y - cy) ** q, (z - cz) ** r))
    return out, (cx, cy, cz)


def _assert_mu_close(a: dict, b: dict, mass: float, extent: float, rel=1e-9):
    for key, av in a.items():
        scale = mass * extent ** sum(key)
        assert abs(av - b[key]) <= rel * max(scale, 1.0), (key, av, b[key])


def rotated_ellipsoid(dims, center, semi_axes, angle_deg, value=1):
    """Solid ellipsoid rotated about the z axis, rasterized on voxel centers."""
    l, m, n = dims
    cx, cy, cz = center
    a, b, c = semi_axes
    th = np.radians(angle_deg)
    xs = np.arange(l) - cx
    ys = np.arange(m) - cy
    zs = np.arange(n) - cz
    x = xs[None, None, :]
    y = ys[None, :, None]
    z = zs[:, None, None]
    u = np.cos(th) * x + np.sin(th) * y
    w = -np.sin(th) * x + np.cos(th) * y
    inside = (u / a) ** 2 + (w / b) ** 2 + (z / c) ** 2 <= 1.0
    return vm.Volume(np.where(inside, value, 0).astype(np.uint8))


def test_centroid_delta():
    assert vm.centroid(vm.dpm_moments(vm.delta((4, 4, 4), (1, 2, 3), 9), 4)) == (1, 2, 3)


def test_centroid_uniform():
    assert vm.centroid(vm.dpm_moments(vm.uniform((2, 2, 2), 1), 4)) == (0.5, 0.5, 0.5)


def test_centroid_matches_direct_oracle():
    v = vm.random((32, 32, 32), 8, seed=9)
    got = vm.centroid(vm.dpm_moments(v, 4))
    _, want = _mu_direct(v, 2)
    for g, w in zip(got, want):
        assert abs(g - w) <= 1e-12 * abs(w)


def test_centroid_rejects_zero_mass():
    t = vm.dpm_moments(vm.uniform((2, 2, 2), 0), 4)
    with pytest.raises(ValueError, match="zero"):
        vm.centroid(t)


def test_central_moments_delta_all_zero():
    cm = vm.central_moments(vm.dpm_moments(vm.delta((5, 5, 5), (2, 1, 3), 7), 4))
    for key, val in cm.mu.items():
        if sum(key) >= 1:
            assert val == pytest.approx(0.0, abs=1e-6)
    assert cm.mu[(0, 0, 0)] == 7


def test_central_moments_match_direct_oracle():
    v = vm.random((32, 32, 32), 8, seed=4)
    cm = vm.central_moments(vm.dpm_moments(v, 4))
    direct, _ = _mu_direct(v, 4)
    _assert_mu_close(cm.mu, direct, cm.mu[(0, 0, 0)], 16.0)


def test_first_central_moments_vanish():
    v = vm.random((24, 20, 16), 8, seed=5)
    t = vm.dpm_moments(v, 4)
    cm = vm.central_moments(t)
    for key, raw_key in (((1, 0, 0), (1, 0, 0)), ((0, 1, 0), (0, 1, 0)), ((0, 0, 1), (0, 0, 1))):
        assert abs(cm.mu[key]) <= 1e-9 * t[raw_key]


def test_translation_invariance():
    base = vm.ellipsoid((40, 40, 40), (14, 15, 13), (9, 7, 6), 5)
    shifted = vm.ellipsoid((40, 40, 40), (17, 20, 20), (9, 7, 6), 5)
    mu_a = vm.central_moments(vm.dpm_moments(base, 4))
    mu_b = vm.central_moments(vm.dpm_moments(shifted, 4))
    _assert_mu_close(mu_a.mu, mu_b.mu, mu_a.mu[(0, 0, 0)], 10.0)


def test_eta_basics():
    v = vm.random((16, 16, 16), 8, seed=0)
    cm = vm.central_moments(vm.dpm_moments(v, 4))
    eta = vm.normalize_scale(cm)
    assert eta[(0, 0, 0)] == 1.0
    for key in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        assert abs(eta[key]) < 1e-12


def test_eta_two_resolution_ellipsoid():
    small = vm.ellipsoid((45, 55, 65), (22, 27, 32), (10, 15, 20), 1)
    large = vm.ellipsoid((89, 109, 129), (44, 54, 64), (20, 30, 40), 1)
    eta_s = vm.normalize_scale(vm.central_moments(vm.dpm_moments(small, 4)))
    eta_l = vm.normalize_scale(vm.central_moments(vm.dpm_moments(large, 4)))
    checked = 0
    for key, ls in eta_l.items():
        if abs(ls) < 1e-6:  # odd-order entries vanish by symmetry
            continue
        assert abs(eta_s[key] - ls) <= 0.05 * abs(ls), (key, eta_s[key], ls)
        checked += 1
    assert checked >= 9


def test_apply_spacing_identity():
    v = vm.random((8, 8, 8), 8, seed=1)
    cm = vm.central_moments(vm.dpm_moments(v, 4))
    out = vm.apply_spacing(cm, 1.0, 1.0, 1.0)
    assert out.mu == cm.mu


def test_apply_spacing_formula():
    v = vm.random((8, 8, 8), 8, seed=1)
    cm = vm.central_moments(vm.dpm_moments(v, 4))
    out = vm.apply_spacing(cm, 1.0, 1.0, 0.4)
    assert out.mu[(0, 0, 0)] == pytest.approx(0.4 * cm.mu[(0, 0, 0)])
    assert out.mu[(0, 0, 2)] == pytest.approx(0.4**3 * cm.mu[(0, 0, 2)])
    assert out.mu[(2, 0, 0)] == pytest.approx(0.4 * cm.mu[(2, 0, 0)])
    out2 = vm.apply_spacing(cm, 2.0, 3.0, 0.5)
    assert out2.mu[(0, 0, 0)] == pytest.approx(3.0 * cm.mu[(0, 0, 0)])
    assert out2.mu[(1, 1, 1)] == pytest.approx(2.0**2 * 3.0**2 * 0.5**2 * cm.mu[(1, 1, 1)])


def test_apply_spacing_rejects_nonpositive():
    v = vm.random((4, 4, 4), 8, seed=1)
    cm = vm.central_moments(vm.dpm_moments(v, 4))
    with pytest.raises(ValueError, match="spacing"):
        vm.apply_spacing(cm, 1.0, -1.0, 1.0)


def test_shape_axis_aligned_ellipsoid():
    a, b, c = 24.0, 18.0, 12.0
    v = vm.ellipsoid((52, 40, 28), (25.5, 19.5, 13.5), (a, b, c), 1)
    sf = vm.shape_features(vm.central_moments(vm.dpm_moments(v, 4)))
    lam = sf.eigenvalues
    assert lam[0] / lam[1] == pytest.approx((a / b) ** 2, rel=0.02)
    assert lam[1] / lam[2] == pytest.approx((b / c) ** 2, rel=0.02)
    # axes align with the coordinate axes
    assert abs(sf.axes[0] @ [1, 0, 0]) > 1 - 1e-6
    assert abs(sf.axes[1] @ [0, 1, 0]) > 1 - 1e-6
    assert abs(sf.axes[2] @ [0, 0, 1]) > 1 - 1e-6


def test_shape_sphere():
    v = vm.ellipsoid((41, 41, 41), (20, 20, 20), (15, 15, 15), 1)
    sf = vm.shape_features(vm.central_moments(vm.dpm_moments(v, 4)))
    lam = sf.eigenvalues
    assert lam[0] == pytest.approx(lam[2], rel=0.01)
    assert sf.elongation[0] == pytest.approx(1.0, rel=0.01)
    assert sf.elongation[1] == pytest.approx(1.0, rel=0.01)


def test_shape_recovers_45_degree_rotation():
    v = rotated_ellipsoid((96, 96, 48), (47.5, 47.5, 23.5), (28, 14, 10), 45.0)
    sf = vm.shape_features(vm.central_moments(vm.dpm_moments(v, 4)))
    expected = np.array([np.cos(np.radians(45)), np.sin(np.radians(45)), 0.0])
    angle = np.degrees(np.arccos(min(1.0, abs(float(sf.axes[0] @ expected)))))
    assert angle <= 1.0


def test_shape_axes_orthonormal_and_sign_fixed():
    v = rotated_ellipsoid((64, 64, 32), (31.5, 31.5, 15.5), (20, 11, 8), 30.0)
    sf = vm.shape_features(vm.central_moments(vm.dpm_moments(v, 4)))
    gram = sf.axes @ sf.axes.T
    assert np.allclose(gram, np.eye(3), atol=1e-9)
    for axis in sf.axes:
        assert axis[int(np.argmax(np.abs(axis)))] > 0


def test_shape_eigenvalue_sum_equals_trace():
    v = vm.random((20, 18, 16), 8, seed=2)
    sf = vm.shape_features(vm.central_moments(vm.dpm_moments(v, 4)))
    assert sum(sf.eigenvalues) == pytest.approx(float(np.trace(sf.covariance)), rel=1e-9)
    assert sf.radius_of_gyration == pytest.approx(np.sqrt(np.trace(sf.covariance)), rel=1e-12)
