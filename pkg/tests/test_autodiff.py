import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phypred.autodiff import (
    Tensor,
    backward,
    check_gradient,
    conv2d,
    elementwise,
    matmul,
    mul,
    no_grad,
    sigmoid,
    square,
    sum_all,
    tanh,
    unary,
)
from phypred.errors import GraphError, NonFiniteError, ShapeError

rng = np.random.default_rng(0)


class TestElementwise:
    def test_add_componentwise(self):
        out = elementwise(Tensor([1.0, 2.0]), Tensor([3.0, 4.0]), "add")
        assert np.array_equal(out.data, [4.0, 6.0])

    def test_mul_by_zero_annihilates_value_and_grad(self):
        x = Tensor(rng.normal(size=(3, 3)), requires_grad=True)
        out = mul(x, 0.0)
        assert np.all(out.data == 0.0)
        backward(sum_all(out))
        assert np.all(x.grad == 0.0)

    def test_mul_grad_matches_finite_differences(self):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        report = check_gradient(
            lambda t: sum_all(mul(t, Tensor(b))), Tensor(a), step=1e-6,
            tol=1e-6)
        assert report.passed
        # grad of sum(a*b) wrt a is exactly b
        x = Tensor(a, requires_grad=True)
        backward(sum_all(mul(x, Tensor(b))))
        np.testing.assert_allclose(x.grad, b, atol=1e-15)

    def test_shape_mismatch_names_both_shapes(self):
        with pytest.raises(ShapeError) as err:
            elementwise(Tensor(np.zeros((2, 3))), Tensor(np.zeros((3, 2))),
                        "add")
        assert "(2, 3)" in str(err.value) and "(3, 2)" in str(err.value)

    def test_division_by_exact_zero_rejected(self):
        with pytest.raises(ZeroDivisionError):
            elementwise(Tensor([1.0, 2.0]), Tensor([1.0, 0.0]), "div")
        with pytest.raises(ZeroDivisionError):
            elementwise(Tensor([1.0]), 0.0, "div")

    def test_scalar_broadcast(self):
        out = elementwise(Tensor([[1.0, 2.0]]), 2.5, "mul")
        assert np.array_equal(out.data, [[2.5, 5.0]])

    @given(st.floats(-3, 3), st.floats(-3, 3))
    @settings(max_examples=25, deadline=None)
    def test_backward_linearity(self, a, b):
        x = Tensor(np.array([0.3, -1.2, 2.0]), requires_grad=True)
        f = sum_all(square(x))
        g = sum_all(mul(x, Tensor(np.array([1.0, 2.0, 3.0]))))
        combined = f * a + g * b
        backward(combined)
        expect = a * 2.0 * x.data + b * np.array([1.0, 2.0, 3.0])
        np.testing.assert_allclose(x.grad, expect, rtol=1e-12, atol=1e-12)


class TestUnary:
    def test_sigmoid_symmetry_point(self):
        assert sigmoid(Tensor([0.0])).data[0] == 0.5

    def test_tanh_zero(self):
        assert tanh(Tensor([0.0])).data[0] == 0.0

    def test_sigmoid_output_strictly_inside_unit_interval(self):
        out = sigmoid(Tensor(rng.normal(size=100) * 50)).data
        assert np.all(out > 0.0) and np.all(out < 1.0)

    def test_sigmoid_gradient_at_zero(self):
        x = Tensor(np.zeros(1), requires_grad=True)
        backward(sum_all(sigmoid(x)))
        np.testing.assert_allclose(x.grad, [0.25], rtol=1e-12)
        report = check_gradient(lambda t: sum_all(sigmoid(t)),
                                Tensor(np.zeros(1)), step=1e-6, tol=1e-8)
        assert report.passed

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            unary(Tensor([1.0]), "gelu")


class TestMatmul:
    def test_identity(self):
        m = rng.normal(size=(3, 3))
        out = matmul(Tensor(np.eye(3)), Tensor(m))
        np.testing.assert_allclose(out.data, m, atol=1e-15)

    def test_hand_arithmetic(self):
        out = matmul(Tensor([[1.0, 2.0], [3.0, 4.0]]), Tensor([[1.0], [1.0]]))
        assert np.array_equal(out.data, [[3.0], [7.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            matmul(Tensor(np.zeros((4, 5))), Tensor(np.zeros((4, 3))))

    def test_gradients_match_finite_differences(self):
        a = rng.normal(size=(4, 5))
        b = rng.normal(size=(5, 3))
        ra = check_gradient(
            lambda t: sum_all(square(matmul(t, Tensor(b)))), Tensor(a))
        rb = check_gradient(
            lambda t: sum_all(square(matmul(Tensor(a), t))), Tensor(b))
        assert ra.max_rel_discrepancy < 1e-4
        assert rb.max_rel_discrepancy < 1e-4


class TestBackwardSemantics:
    def test_sum_gives_ones(self):
        x = Tensor(rng.normal(size=(2, 2)), requires_grad=True)
        backward(sum_all(x))
        np.testing.assert_array_equal(x.grad, np.ones((2, 2)))

    def test_sum_of_squares_gives_2x(self):
        x = Tensor(rng.normal(size=(2, 2)), requires_grad=True)
        backward(sum_all(square(x)))
        np.testing.assert_allclose(x.grad, 2 * x.data, rtol=1e-14)

    def test_non_scalar_loss_rejected(self):
        x = Tensor(np.zeros((2, 2)), requires_grad=True)
        with pytest.raises(GraphError):
            backward(square(x))

    def test_repeated_backward_accumulates(self):
        x = Tensor(np.ones(3), requires_grad=True)
        loss = sum_all(square(x))
        backward(loss)
        backward(loss)
        np.testing.assert_allclose(x.grad, 4 * np.ones(3))
        x.zero_grad()
        assert x.grad is None

    def test_composite_conv_sigmoid_matches_finite_differences(self):
        x = rng.normal(size=(1, 2, 5, 5))
        w = rng.normal(size=(3, 2, 3, 3)) * 0.5
        b = rng.normal(size=3) * 0.1

        def f_w(t):
            return sum_all(square(sigmoid(conv2d(Tensor(x), t, "same",
                                                 Tensor(b)))))

        report = check_gradient(f_w, Tensor(w), step=1e-6, tol=1e-4)
        assert report.passed, str(report)

    def test_untracked_constant_has_no_node(self):
        c = Tensor(np.ones(4))
        assert c.node_id is None
        out = c + Tensor(np.ones(4))
        assert out.node_id is None  # no tracked inputs -> constant

    def test_requires_grad_false_never_accumulates(self):
        x = Tensor(np.ones(3))
        y = Tensor(np.ones(3), requires_grad=True)
        backward(sum_all(mul(x, y)))
        assert x.grad is None and y.grad is not None

    def test_no_grad_suppresses_graph(self):
        x = Tensor(np.ones(3), requires_grad=True)
        with no_grad():
            out = sum_all(square(x))
        assert out.node_id is None
        backward(out)  # no-op on a constant
        assert x.grad is None


class TestDeterminism:
    def test_identical_op_sequence_is_bit_identical(self):
        def run():
            r = np.random.default_rng(99)
            x = Tensor(r.normal(size=(4, 4)), requires_grad=True)
            w = Tensor(r.normal(size=(4, 4)), requires_grad=True)
            loss = sum_all(square(tanh(matmul(x, w))))
            backward(loss)
            return x.data.copy(), x.grad.copy(), w.grad.copy()

        a = run()
        b = run()
        for u, v in zip(a, b):
            assert np.array_equal(u, v)


class TestCheckGradient:
    def test_sum_discrepancy_exactly_zero_on_dyadic_inputs(self):
        # dyadic values and a power-of-two step make the central difference
        # exact in floating point
        x = Tensor(np.array([0.25, 0.5, 1.0, 2.0]))
        report = check_gradient(lambda t: sum_all(t), x, step=2.0 ** -20,
                                tol=1e-12)
        assert report.max_rel_discrepancy == 0.0

    def test_sum_of_squares_quadratic_exactness(self):
        x = Tensor(rng.normal(size=(3, 3)))
        report = check_gradient(lambda t: sum_all(square(t)), x, step=1e-5,
                                tol=1e-6)
        assert report.passed

    def test_step_must_be_positive(self):
        with pytest.raises(ValueError):
            check_gradient(lambda t: sum_all(t), Tensor(np.ones(2)), step=0.0)

    def test_non_finite_rejected(self):
        x = Tensor(np.array([np.inf]))
        with pytest.raises(NonFiniteError):
            check_gradient(lambda t: sum_all(t), x)
