import numpy as np
import pytest

from phypred.autodiff import Tensor
from phypred.errors import IntegrationError, ShapeError
from phypred.integrator import (
    GateParams,
    RKConfig,
    adaptive_rk2_step,
    gradient_norm_probe,
    rk2_step,
)
from phypred.moments import DerivativeBank

rng = np.random.default_rng(4)


def scalar_bank(lam: float) -> DerivativeBank:
    filters = np.zeros((9, 1, 3, 3))
    filters[4, 0, 1, 1] = 1.0
    comb = np.zeros(9)
    comb[4] = lam
    return DerivativeBank(3, filters, comb)


class TestConventionalStep:
    def test_zero_map_is_fixed_point(self):
        h = Tensor(rng.normal(size=(1, 2, 5, 5)))
        out = rk2_step(h, DerivativeBank(3))
        np.testing.assert_array_equal(out.data, h.data)

    def test_scalar_decay_arithmetic(self):
        h = Tensor(rng.normal(size=(1, 1, 5, 5)))
        out = rk2_step(h, scalar_bank(-0.1))
        np.testing.assert_allclose(out.data, 0.905 * h.data, rtol=1e-12)

    def test_order_two_convergence_on_linear_decay(self):
        errs = []
        ns = (4, 8, 16, 32)
        for n in ns:
            h = Tensor(np.ones((1, 1, 3, 3)))
            bank = scalar_bank(-1.0 / n)
            for _ in range(n):
                h = rk2_step(h, bank)
            errs.append(abs(float(h.data[0, 0, 0, 0]) - np.exp(-1.0)))
        design = np.vstack([np.log(ns), np.ones(4)]).T
        slope = -np.linalg.lstsq(design, np.log(errs), rcond=None)[0][0]
        assert 1.8 <= slope <= 2.2

    def test_divergence_names_the_stage(self):
        h = Tensor(np.full((1, 1, 3, 3), 1e308))
        with pytest.raises(IntegrationError) as err:
            rk2_step(h, scalar_bank(1e6))
        assert "stage" in str(err.value)


class TestAdaptiveStep:
    def test_zero_gate_params_reduce_to_conventional(self):
        bank = DerivativeBank.randn(3, rng, 0.3, 0.3)
        h = Tensor(rng.normal(size=(2, 3, 6, 6)))
        conventional = rk2_step(h, bank)
        adaptive, g = adaptive_rk2_step(h, bank, GateParams.zeros(3))
        assert np.all(g.data == 0.5)
        assert np.abs(conventional.data - adaptive.data).max() <= 1e-15

    def test_saturated_bias_selects_first_stage(self):
        bank = DerivativeBank.randn(3, rng, 0.3, 0.3)
        gate = GateParams.zeros(2)
        gate.bias.data = np.full(2, 30.0)
        h = Tensor(rng.normal(size=(1, 2, 6, 6)))
        s1 = bank(h)
        euler = h + s1
        out, g = adaptive_rk2_step(h, bank, gate)
        assert np.abs(out.data - euler.data).max() < 1e-9
        assert np.all(g.data > 1.0 - 1e-12)

    def test_gate_strictly_inside_unit_interval(self):
        bank = DerivativeBank.randn(3, rng, 0.5, 0.5)
        gate = GateParams.randn(3, rng, 1.0)
        h = Tensor(rng.normal(size=(1, 3, 6, 6)) * 10)
        _, g = adaptive_rk2_step(h, bank, gate)
        assert np.all(g.data > 0.0) and np.all(g.data < 1.0)

    def test_channel_mismatch_rejected(self):
        with pytest.raises(ShapeError):
            adaptive_rk2_step(Tensor(np.zeros((1, 3, 6, 6))),
                              DerivativeBank(3), GateParams.zeros(5))

    def test_shared_bank_receives_gradient_from_both_stages(self):
        from phypred.autodiff import backward, square, sum_all

        bank = DerivativeBank.randn(3, rng, 0.3, 0.3)
        gate = GateParams.zeros(2)
        h = Tensor(rng.normal(size=(1, 2, 6, 6)))
        out, _ = adaptive_rk2_step(h, bank, gate)
        backward(sum_all(square(out)))
        assert np.any(bank.filters.grad != 0)
        assert np.any(bank.combiner.grad != 0)


class TestRKConfig:
    def test_defaults(self):
        cfg = RKConfig()
        assert cfg.mode == "adaptive" and abs(cfg.dt - 1 / 3) < 1e-15

    def test_invalid_mode_rejected(self):
        with pytest.raises(ShapeError):
            RKConfig(mode="euler")

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ShapeError):
            RKConfig(dt=0.0)


class TestGradientNormProbe:
    def test_single_layer_positive_norm(self):
        norms = gradient_norm_probe(1, "conventional", seed=0)
        assert len(norms) == 1 and norms[0] > 0

    def test_deterministic_given_seed_and_mode(self):
        a = gradient_norm_probe(6, "adaptive", seed=5)
        b = gradient_norm_probe(6, "adaptive", seed=5)
        assert a == b

    def test_depth_validated(self):
        with pytest.raises(ShapeError):
            gradient_norm_probe(0, "adaptive", seed=0)

    def test_returns_norm_per_layer(self):
        for mode in ("conventional", "adaptive"):
            norms = gradient_norm_probe(8, mode, seed=1)
            assert len(norms) == 8
            assert all(np.isfinite(n) for n in norms)
