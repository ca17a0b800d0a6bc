import numpy as np
import pytest

from phypred.autodiff import Tensor, check_gradient
from phypred.errors import ConfigError, ShapeError
from phypred.losses import LossWeights, h1_loss, mse_loss, total_loss
from phypred.moments import DerivativeBank

rng = np.random.default_rng(8)


class TestMSELoss:
    def test_perfect_prediction(self):
        x = rng.normal(size=(2, 1, 4, 4))
        assert float(mse_loss(Tensor(x), Tensor(x.copy())).data) == 0.0

    def test_unit_offset(self):
        x = rng.normal(size=(2, 1, 4, 4))
        assert abs(float(mse_loss(Tensor(x + 1.0), Tensor(x)).data) - 1.0) \
            < 1e-12

    def test_matches_direct_summation(self):
        p = rng.normal(size=(3, 2, 5, 5))
        t = rng.normal(size=(3, 2, 5, 5))
        direct = ((p - t) ** 2).sum() / p.size
        assert abs(float(mse_loss(Tensor(p), Tensor(t)).data) - direct) \
            < 1e-12

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mse_loss(Tensor(np.zeros((2, 2))), Tensor(np.zeros((2, 3))))


class TestH1Loss:
    def test_perfect_prediction(self):
        x = rng.normal(size=(1, 1, 8, 8))
        assert float(h1_loss(Tensor(x), Tensor(x.copy())).data) == 0.0

    def test_dc_offset_closed_form(self):
        b, c, h, w = 2, 1, 8, 8
        target = rng.normal(size=(b, c, h, w))
        delta = 0.37
        loss = float(h1_loss(Tensor(target + delta), Tensor(target)).data)
        # only the zero-frequency bin differs; its weight is exactly 1
        expected = h * w * delta ** 2
        assert abs(loss - expected) / expected < 1e-12

    def test_nyquist_exceeds_dc_by_analytic_weight(self):
        h = w = 16
        target = rng.normal(size=(1, 1, h, w))
        eps = 0.2
        dc = target + eps
        nyq = target + eps * ((-1.0) ** np.arange(h))[:, None]
        ratio = float(h1_loss(Tensor(nyq), Tensor(target)).data) / \
            float(h1_loss(Tensor(dc), Tensor(target)).data)
        expected = 1.0 + 4.0 * np.pi ** 2 * 0.25
        assert abs(ratio - expected) / expected < 1e-9

    def test_dominates_unweighted_spectral_l2(self):
        p = rng.normal(size=(1, 1, 6, 6))
        t = rng.normal(size=(1, 1, 6, 6))
        from phypred.spectral import fft2

        d = p - t
        z = fft2(Tensor(d)).to_complex()
        unweighted = float((np.abs(z) ** 2).sum()) / p.size
        assert float(h1_loss(Tensor(p), Tensor(t)).data) >= unweighted

    def test_parseval_ties_unweighted_term_to_mse(self):
        p = rng.normal(size=(2, 1, 8, 8))
        t = rng.normal(size=(2, 1, 8, 8))
        from phypred.spectral import fft2

        z = fft2(Tensor(p - t)).to_complex()
        unweighted = float((np.abs(z) ** 2).sum()) / p.size
        mse = float(mse_loss(Tensor(p), Tensor(t)).data)
        assert abs(unweighted - 64 * mse) / (64 * mse) < 1e-9

    def test_gradient(self):
        p = rng.normal(size=(1, 1, 6, 6))
        t = rng.normal(size=(1, 1, 6, 6))
        report = check_gradient(lambda x: h1_loss(x, Tensor(t)), Tensor(p),
                                step=1e-5, tol=1e-6)
        assert report.passed


class TestTotalLoss:
    def test_zero_weights_reduce_to_mse(self):
        p = rng.normal(size=(1, 1, 6, 6))
        t = rng.normal(size=(1, 1, 6, 6))
        bank = DerivativeBank.randn(3, rng, 0.3)
        weights = LossWeights(lambda_h1=0.0, lambda_moment=0.0)
        total, breakdown = total_loss(Tensor(p), Tensor(t), bank, weights)
        assert abs(float(total.data) - breakdown["mse"]) < 1e-15

    def test_perfect_prediction_and_exact_stencils(self):
        x = rng.normal(size=(1, 1, 6, 6))
        bank = DerivativeBank.exact(3)
        total, _ = total_loss(Tensor(x), Tensor(x.copy()), bank,
                              LossWeights())
        assert float(total.data) < 1e-18

    def test_breakdown_sums_to_total(self):
        p = rng.normal(size=(1, 1, 6, 6))
        t = rng.normal(size=(1, 1, 6, 6))
        bank = DerivativeBank.randn(3, rng, 0.3)
        weights = LossWeights(lambda_h1=0.3, lambda_moment=0.7)
        total, bd = total_loss(Tensor(p), Tensor(t), bank, weights)
        recombined = bd["mse"] + 0.3 * bd["h1"] + 0.7 * bd["moment"]
        assert abs(recombined - bd["total"]) < 1e-12
        assert abs(bd["total"] - float(total.data)) < 1e-15


class TestLossWeights:
    def test_negative_rejected(self):
        with pytest.raises(ConfigError):
            LossWeights(lambda_h1=-0.1)

    def test_non_finite_rejected(self):
        with pytest.raises(ConfigError):
            LossWeights(lambda_moment=float("nan"))
