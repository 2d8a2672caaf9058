import numpy as np
import pytest

from kernelop import build_grids


def test_paper_mesh_size():
    g = build_grids(200, 200)
    assert g.dx == pytest.approx(0.005)
    assert g.ds == pytest.approx(0.005)
    assert len(g.y) == 601
    assert g.y[0] == -1.0 and g.y[-1] == 2.0


def test_smallest_mesh():
    g = build_grids(2, 2)
    np.testing.assert_allclose(g.x, [0.5, 1.0])
    np.testing.assert_allclose(g.s, [0.5, 1.0])


def test_coarser_s_mesh():
    g = build_grids(4, 2)
    np.testing.assert_allclose(g.s, [0.5, 1.0])
    assert g.ds == 0.5
    assert g.stride == 2


@pytest.mark.parametrize("J,n_s", [(5, 2), (6, 4), (8, 3)])
def test_rejects_non_divisible(J, n_s):
    with pytest.raises(ValueError):
        build_grids(J, n_s)


def test_rejects_bad_sizes():
    with pytest.raises(ValueError):
        build_grids(1)
    with pytest.raises(ValueError):
        build_grids(4, 8)
    with pytest.raises(ValueError):
        build_grids(4, 0)


@pytest.mark.parametrize("J,n_s", [(8, 8), (12, 4), (64, 16)])
def test_meshes_uniform_and_consistent(J, n_s):
    g = build_grids(J, n_s)
    assert g.dx * g.J == pytest.approx(1.0, abs=1e-15)
    assert g.ds * g.n_s == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(np.diff(g.x), g.dx)
    np.testing.assert_allclose(np.diff(g.y), g.dx, atol=1e-15)
    np.testing.assert_allclose(np.diff(g.s), g.ds, atol=1e-15)


def test_index_arithmetic_lands_on_y_nodes():
    g = build_grids(24, 8)
    rng = np.random.default_rng(0)
    for _ in range(50):
        j = rng.integers(1, g.J + 1)
        m = g.stride * rng.integers(1, g.n_s + 1)
        assert g.y[g.y_index(j - m)] == pytest.approx(g.x[j - 1] - m / g.J, abs=1e-15)
        assert g.y[g.y_index(j + m)] == pytest.approx(g.x[j - 1] + m / g.J, abs=1e-15)
