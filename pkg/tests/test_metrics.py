import numpy as np
import pytest

from ridgekit.exceptions import DegenerateProjection, InvalidInput
from ridgekit.metrics import (CircleManifold, ExplicitManifold, SphereManifold,
                              denoise_mse, directed_hausdorff, hausdorff,
                              hausdorff_to_projection, manifold_distances,
                              margin, pca_subspace, project_reference)
from ridgekit.spectral import top_projector


def brute_force_directed(a, b):
    return max(min(float(np.linalg.norm(x - y)) for y in b) for x in a)


def test_project_circle_and_sphere():
    np.testing.assert_allclose(project_reference(CircleManifold(1.0), [2.0, 0.0]),
                               [1.0, 0.0], atol=1e-15)
    np.testing.assert_allclose(project_reference(SphereManifold(1.0), [0.0, 0.0, 0.5]),
                               [0.0, 0.0, 1.0], atol=1e-15)


def test_project_origin_is_degenerate():
    with pytest.raises(DegenerateProjection):
        project_reference(CircleManifold(1.0), [0.0, 0.0])


def test_project_explicit_matches_scan():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(25, 3))
    manifold = ExplicitManifold(pts)
    for _ in range(10):
        x = rng.normal(size=3)
        best = min(range(25), key=lambda i: np.linalg.norm(pts[i] - x))
        np.testing.assert_array_equal(project_reference(manifold, x), pts[best])


def test_hausdorff_examples():
    a = np.array([[0.0, 0.0]])
    assert hausdorff(a, a) == 0.0
    assert hausdorff(a, np.array([[3.0, 4.0]])) == pytest.approx(5.0)


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.normal(size=(rng.integers(1, 15), 2))
        b = rng.normal(size=(rng.integers(1, 15), 2))
        expected = max(brute_force_directed(a, b), brute_force_directed(b, a))
        assert hausdorff(a, b) == pytest.approx(expected, abs=1e-12)
        assert hausdorff(a, b) == hausdorff(b, a)


def test_hausdorff_rejects_empty():
    with pytest.raises(InvalidInput):
        hausdorff(np.empty((0, 2)), np.array([[0.0, 0.0]]))


def test_margin_examples():
    circle = CircleManifold(1.0)
    on = np.array([[1.0, 0.0], [0.0, -1.0]])
    assert margin(on, circle) == 0.0
    assert margin(np.array([[1.1, 0.0]]), circle) == pytest.approx(0.1)


def test_margin_matches_pointwise_oracle():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(40, 3))
    ref = rng.normal(size=(60, 3))
    manifold = ExplicitManifold(ref)
    expected = np.mean([min(np.linalg.norm(x - y) for y in ref) for x in pts])
    assert margin(pts, manifold) == pytest.approx(expected, abs=1e-12)


def test_one_sided_equals_symmetric_against_own_projection():
    rng = np.random.default_rng(3)
    for _ in range(30):
        use_sphere = bool(rng.integers(2))
        manifold = SphereManifold(1.0) if use_sphere else CircleManifold(1.0)
        dim = 3 if use_sphere else 2
        pts = rng.normal(0.0, 1.3, size=(int(rng.integers(1, 20)), dim))
        proj = np.stack([project_reference(manifold, x) for x in pts])
        assert hausdorff(pts, proj) == directed_hausdorff(pts, proj)


def test_subset_monotonicity_exact():
    rng = np.random.default_rng(4)
    circle = CircleManifold(1.0)
    for _ in range(200):
        n = int(rng.integers(2, 30))
        b = rng.normal(0.0, 1.5, size=(n, 2))
        a = b[rng.choice(n, size=int(rng.integers(1, n)), replace=False)]
        assert hausdorff_to_projection(a, circle) <= hausdorff_to_projection(b, circle)


def test_manifold_distances_circle_formula():
    pts = np.array([[2.0, 0.0], [0.0, 0.5], [0.0, 0.0]])
    np.testing.assert_allclose(manifold_distances(pts, CircleManifold(1.0)),
                               [1.0, 0.5, 1.0], atol=1e-15)


def test_pca_subspace_axis_aligned():
    rng = np.random.default_rng(5)
    data = rng.normal(size=(300, 3)) * np.array([5.0, 1.0, 0.2])
    u = pca_subspace(data, 2)
    np.testing.assert_allclose(u.T @ u, np.eye(2), atol=1e-12)
    got = u @ u.T
    cov = np.cov(data.T)
    expected = top_projector(cov, 2).matrix
    np.testing.assert_allclose(got, expected, atol=1e-10)
    # dominant axes are x and y
    assert got[0, 0] == pytest.approx(1.0, abs=1e-2)
    assert got[1, 1] == pytest.approx(1.0, abs=1e-2)


def test_pca_subspace_full_rank_and_line():
    rng = np.random.default_rng(6)
    data = rng.normal(size=(50, 4))
    u = pca_subspace(data, 4)
    np.testing.assert_allclose(u @ u.T, np.eye(4), atol=1e-10)

    v = np.array([1.0, 2.0]) / np.sqrt(5.0)
    line = np.outer(np.linspace(-1, 1, 30), v)
    u1 = pca_subspace(line, 1)
    assert abs(abs(float(u1[:, 0] @ v)) - 1.0) < 1e-12


def test_pca_subspace_validation():
    with pytest.raises(InvalidInput):
        pca_subspace(np.zeros((1, 3)), 1)
    with pytest.raises(InvalidInput):
        pca_subspace(np.zeros((5, 3)), 4)


def test_pca_subspace_degenerate_is_deterministic():
    data = np.zeros((10, 3))
    u1 = pca_subspace(data, 2)
    u2 = pca_subspace(data.copy(), 2)
    np.testing.assert_array_equal(u1, u2)


def test_denoise_mse_examples():
    rng = np.random.default_rng(7)
    clean = rng.normal(size=(20, 5))
    u = pca_subspace(clean, 2)
    assert denoise_mse(clean, clean @ u, u) == 0.0

    single = np.array([[1.0, 0.0, 0.0]])
    basis = np.eye(3)[:, :2]
    est = single @ basis + np.array([[1.0, 0.0]])
    assert denoise_mse(single, est, basis) == pytest.approx(1.0)


def test_denoise_mse_matches_direct_sum():
    rng = np.random.default_rng(8)
    clean = rng.normal(size=(15, 4))
    u = pca_subspace(clean, 3)
    est = rng.normal(size=(15, 3))
    expected = np.mean([np.sum((clean[i] @ u - est[i]) ** 2) for i in range(15)])
    assert denoise_mse(clean, est, u) == pytest.approx(expected, abs=1e-12)


def test_denoise_mse_size_mismatch():
    u = np.eye(3)[:, :2]
    with pytest.raises(InvalidInput):
        denoise_mse(np.zeros((3, 3)), np.zeros((4, 2)), u)
