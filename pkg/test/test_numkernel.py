import numpy as np
import pytest

from gravrec.numkernel import (Adam, AdamState, DimensionError,
                               EvaluationError, adam_step, concat_rows, dense,
                               finite_difference_gradient, l2_norm_sq, matmul,
                               relative_error, relu, sigmoid, softmax_vec,
                               tanh, transpose, xavier_init)
from gravrec.util import UsageError


def test_xavier_bounds():
    w = xavier_init(2, 4, np.random.default_rng(0))
    assert w.shape == (2, 4)
    assert np.all(np.abs(w) <= 1.0)


def test_xavier_deterministic():
    a = xavier_init(5, 3, np.random.default_rng(9))
    b = xavier_init(5, 3, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_xavier_mean():
    w = xavier_init(1000, 1000, np.random.default_rng(1))
    assert -0.01 < w.mean() < 0.01


def test_ops():
    assert np.array_equal(relu(np.array([2.0, -2.0])), [2.0, 0.0])
    assert sigmoid(0.0) == 0.5
    assert np.allclose(softmax_vec([7.0, 7.0, 7.0]), [1 / 3.0] * 3)
    assert np.allclose(softmax_vec([-1000.0, -1000.0]), [0.5, 0.5])
    assert tanh(0.0) == 0.0
    assert l2_norm_sq(np.array([[1.0, 2.0], [2.0, 0.0]])) == 9.0
    assert concat_rows(np.ones((2, 1)), np.zeros((2, 2))).shape == (2, 3)


def test_shape_errors():
    with pytest.raises(DimensionError):
        matmul(np.ones((2, 3)), np.ones((2, 3)))
    with pytest.raises(DimensionError):
        concat_rows(np.ones((2, 1)), np.ones((3, 1)))
    with pytest.raises(DimensionError):
        dense([1.0, 2.0, 3.0], 2, 2)
    with pytest.raises(EvaluationError):
        dense([1.0, float('nan')])


def test_matmul_associative_and_transpose():
    rng = np.random.default_rng(3)
    for _i in range(10):
        a, b, c = (rng.normal(size=(8, 8)) for _j in range(3))
        assert np.allclose(matmul(matmul(a, b), c),
                           matmul(a, matmul(b, c)),
                           atol=1e-9)
        assert np.allclose(transpose(matmul(a, b)),
                           matmul(transpose(b), transpose(a)),
                           atol=1e-12)


def test_adam_zero_grad():
    p = np.array([[1.0, -2.0]])
    new, state = adam_step(p, np.zeros_like(p), AdamState(p.shape), 0.001)
    assert np.array_equal(new, p)
    assert state.step_count == 1


def test_adam_one_step():
    p = np.array([[1.0]])
    new, _state = adam_step(p, np.array([[1.0]]), AdamState(p.shape), 0.001)
    assert new[0, 0] == pytest.approx(0.999, abs=1e-6)


def test_adam_inputs_untouched():
    p = np.array([[1.0]])
    state = AdamState(p.shape)
    adam_step(p, np.array([[1.0]]), state, 0.1)
    assert p[0, 0] == 1.0
    assert state.step_count == 0
    assert state.first_moment[0, 0] == 0.0


def test_adam_shape_mismatch():
    with pytest.raises(DimensionError):
        adam_step(np.ones((2, 2)), np.ones((2, 1)), AdamState((2, 2)), 0.1)


def test_adam_deterministic():
    def trajectory():
        rng = np.random.default_rng(5)
        params = {"w": rng.normal(size=(3, 3))}
        opt = Adam(0.01)
        for _i in range(20):
            opt.step(params, {"w": 2 * params["w"] + rng.normal(size=(3, 3))})
        return params["w"]

    assert np.array_equal(trajectory(), trajectory())


def test_fd_square():
    x = np.array([3.0])
    g = finite_difference_gradient(lambda: float(x[0]**2), x, 1e-5)
    assert g[0] == pytest.approx(6.0, abs=1e-8)


def test_fd_constant():
    x = np.array([1.0, 2.0])
    assert np.array_equal(finite_difference_gradient(lambda: 4.0, x), [0, 0])


def test_fd_product_dict():
    params = {"x": np.array([2.0]), "y": np.array([5.0])}
    g = finite_difference_gradient(
        lambda: float(params["x"][0] * params["y"][0]), params)
    assert g["x"][0] == pytest.approx(5.0, abs=1e-7)
    assert g["y"][0] == pytest.approx(2.0, abs=1e-7)
    # Restored
    assert params["x"][0] == 2.0


def test_fd_eps_range():
    x = np.array([1.0])
    with pytest.raises(UsageError):
        finite_difference_gradient(lambda: 1.0, x, 1e-2)


def test_fd_non_finite():
    x = np.array([0.0])
    with pytest.raises(EvaluationError):
        finite_difference_gradient(lambda: float('inf'), x)


def test_relative_error():
    a = np.array([1.0, 2.0])
    assert relative_error(a, a) == 0.0
    assert relative_error(np.zeros(2), np.zeros(2)) == 0.0
    assert relative_error(a, -a) == pytest.approx(1.0)
