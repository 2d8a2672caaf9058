import numpy as np
import pytest

from kernelop import (ExampleId, build_grids, eval_g, forward_riemann,
                      g_matrix, make_input, operator_spec)
from kernelop.data import InputSample


def test_operator_specs_one_to_one():
    assert not operator_spec("integral").requires_derivative
    assert not operator_spec("nonlocal").requires_derivative
    assert operator_spec("aggregation").requires_derivative


def test_nonlocal_quadratic_input_gives_2s2():
    g = build_grids(16, 16)
    u = InputSample(ExampleId.NONLOCAL, np.zeros(1), values=g.y ** 2)
    spec = operator_spec("nonlocal")
    for s in (0.25, 0.5, 1.0):
        for x in (0.25, 0.625, 1.0):
            assert eval_g(spec, u, g, x, s) == pytest.approx(2 * s ** 2, abs=1e-12)


def test_aggregation_constant_input_gives_zero():
    g = build_grids(8, 8)
    u = make_input("aggregation", g, np.zeros(3), constant=1.0)
    spec = operator_spec("aggregation")
    assert eval_g(spec, u, g, 0.5, 0.25) == 0.0
    gm = g_matrix("aggregation", g, u.values, u.derivative_values)
    np.testing.assert_allclose(gm, 0.0)


def test_integral_single_mode_lookup():
    g = build_grids(8, 8)
    u = make_input("integral", g, [0.0, 1.0])  # u(y) = cos(4 pi y)
    spec = operator_spec("integral")
    assert eval_g(spec, u, g, 0.5, 0.25) == pytest.approx(np.cos(np.pi), abs=1e-12)


def test_eval_g_rejects_off_grid_points():
    g = build_grids(8, 4)
    u = make_input("integral", g, [1.0])
    spec = operator_spec("integral")
    with pytest.raises(ValueError):
        eval_g(spec, u, g, 0.3, 0.25)
    with pytest.raises(ValueError):
        eval_g(spec, u, g, 0.5, 0.125)  # on x-grid scale but not on s-grid


def test_integral_g_matrix_matches_stored_values():
    grids = build_grids(12, 4)
    u = make_input("integral", grids, [0.5, 0.0, -0.2])
    gm = g_matrix("integral", grids, u.values)
    for j in (1, 5, 12):
        for li, m in enumerate(grids.stride * np.arange(1, grids.n_s + 1)):
            assert gm[j - 1, li] == u.values[grids.y_index(j - m)]


def test_forward_riemann_zero_kernel():
    rng = np.random.default_rng(1)
    g = rng.standard_normal((6, 4))
    np.testing.assert_array_equal(forward_riemann(g, np.zeros(4)), np.zeros(6))


def test_forward_riemann_hand_value():
    # n_s = 2, ds = 0.5, row (1, 1), phi = (2, 4) -> (1*2 + 1*4) * 0.5 = 3
    out = forward_riemann(np.array([[1.0, 1.0]]), np.array([2.0, 4.0]))
    assert out[0] == pytest.approx(3.0)


def test_forward_riemann_dimension_mismatch():
    with pytest.raises(ValueError):
        forward_riemann(np.ones((3, 4)), np.ones(5))


def test_forward_riemann_linear_in_phi():
    rng = np.random.default_rng(2)
    g = rng.standard_normal((10, 8))
    p1, p2 = rng.standard_normal(8), rng.standard_normal(8)
    a, b = 1.7, -0.3
    lhs = forward_riemann(g, a * p1 + b * p2)
    rhs = a * forward_riemann(g, p1) + b * forward_riemann(g, p2)
    np.testing.assert_allclose(lhs, rhs, rtol=1e-13, atol=1e-13)


def test_nonlocal_annihilates_affine_inputs():
    grids = build_grids(16, 8)
    vals = 0.7 * grids.y + 0.3
    gm = g_matrix("nonlocal", grids, vals)
    np.testing.assert_allclose(gm, 0.0, atol=1e-14)


def test_riemann_close_to_quadrature_for_constant_data():
    # integral example with u == 1 and phi == 1: exact value 1 for both maps
    grids = build_grids(32, 32)
    u = make_input("integral", grids, np.zeros(2), constant=1.0)
    gm = g_matrix("integral", grids, u.values)
    out = forward_riemann(gm, np.ones(grids.n_s))
    np.testing.assert_allclose(out, 1.0, atol=1e-12)
