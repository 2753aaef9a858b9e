import numpy as np
import pytest

from conftest import brute_force_ssim
from uwnet import loss, tensor
from uwnet.errors import DimensionError

# Central differences at eps=1e-6 carry an absolute truncation floor around
# 1e-9 here, so components where the true gradient nearly vanishes cannot
# meet a purely relative bound. Large components must agree to 1e-5 relative,
# everything else to 2e-9 absolute, and the whole gradient to 1e-5 in norm.


def check_gradient(fn, point, eps=1e-6):
    value, grad = fn(point)
    grad = np.asarray(grad, dtype=np.float64).reshape(-1)
    flat = point.reshape(-1)
    numeric = np.empty_like(grad)
    for k in range(flat.size):
        orig = flat[k]
        flat[k] = orig + eps
        up = fn(point)[0]
        flat[k] = orig - eps
        down = fn(point)[0]
        flat[k] = orig
        numeric[k] = (up - down) / (2 * eps)
    scale = np.maximum(np.abs(grad), np.abs(numeric))
    diff = np.abs(grad - numeric)
    sizable = scale >= 1e-4
    assert not sizable.any() or (diff[sizable] / scale[sizable]).max() < 1e-5
    assert diff[~sizable].max() < 2e-9 if (~sizable).any() else True
    assert np.linalg.norm(grad - numeric) / max(np.linalg.norm(grad), 1e-12) < 1e-5


class TestMseLoss:
    def test_identical_images_give_zero(self, rng):
        x = rng.uniform(size=(6, 6, 3))
        value, grad = loss.mse_loss(x, x.copy())
        assert value == 0.0
        assert not grad.any()

    def test_constant_offset(self, rng):
        target = rng.uniform(0, 0.9, size=(5, 5, 3))
        value, _ = loss.mse_loss(target + 0.1, target)
        assert abs(value - 0.01) < 1e-12

    def test_matches_scalar_accumulation(self, rng):
        a = rng.uniform(size=(7, 5, 3))
        b = rng.uniform(size=(7, 5, 3))
        value, grad = loss.mse_loss(a, b)
        acc = 0.0
        for i in range(7):
            for j in range(5):
                for c in range(3):
                    acc += (a[i, j, c] - b[i, j, c]) ** 2
        assert abs(value - acc / (7 * 5 * 3)) < 1e-12
        assert np.allclose(grad, 2.0 / (7 * 5 * 3) * (a - b), atol=1e-15)

    def test_translation_changes_value_by_delta_squared(self, rng):
        x = rng.uniform(0, 0.8, size=(6, 6, 3))
        base, _ = loss.mse_loss(x, x)
        shifted, _ = loss.mse_loss(x + 0.05, x)
        assert abs(shifted - base - 0.05**2) < 1e-12

    def test_shape_mismatch_raises(self):
        with pytest.raises(DimensionError):
            loss.mse_loss(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))

    def test_gradient_is_exact(self, rng):
        a = rng.uniform(size=(5, 5, 3))
        b = rng.uniform(size=(5, 5, 3))
        check_gradient(lambda t: loss.mse_loss(t, b), a.copy())


class TestRgbToGray:
    def test_white_maps_to_one(self):
        gray = loss.rgb_to_gray(np.ones((2, 2, 3)))
        assert np.allclose(gray, 1.0, atol=1e-15)
        assert gray.shape == (2, 2, 1)

    def test_pure_red_weight(self):
        img = np.zeros((1, 1, 3))
        img[0, 0, 0] = 1.0
        assert abs(loss.rgb_to_gray(img)[0, 0, 0] - 0.299) < 1e-15

    def test_gray_channel_mismatch_raises(self):
        with pytest.raises(DimensionError):
            loss.rgb_to_gray(np.zeros((4, 4, 1)))

    def test_gradient_proportional_to_weights(self, rng):
        x = rng.uniform(size=(4, 4, 3))

        def fn(t):
            gray = loss.rgb_to_gray(t)
            return float(gray.sum()), np.broadcast_to(
                loss.GRAY_WEIGHTS, t.shape
            ).copy()

        assert tensor.finite_difference_check(fn, x.copy()) < 1e-8


class TestSsimMap:
    def test_identical_images_score_exactly_one(self, rng):
        x = rng.uniform(size=(15, 15, 1))
        value, _ = loss.ssim_map(x, x.copy())
        assert value == 1.0

    def test_constant_images_match_closed_form(self):
        a, b = 0.3, 0.7
        value, _ = loss.ssim_map(np.full((13, 13, 1), a), np.full((13, 13, 1), b))
        expected = (2 * a * b + loss.SSIM_C1) / (a * a + b * b + loss.SSIM_C1)
        assert abs(value - expected) < 1e-12

    def test_matches_windowed_statistics_oracle(self, rng):
        x = rng.uniform(size=(15, 15, 1))
        y = rng.uniform(size=(15, 15, 1))
        value, _ = loss.ssim_map(x, y)
        assert abs(value - brute_force_ssim(x, y)) < 1e-10

    def test_symmetry(self, rng):
        x = rng.uniform(size=(14, 16, 1))
        y = rng.uniform(size=(14, 16, 1))
        assert abs(loss.ssim_map(x, y)[0] - loss.ssim_map(y, x)[0]) < 1e-12

    def test_too_small_image_raises(self):
        with pytest.raises(DimensionError):
            loss.ssim_map(np.zeros((12, 13, 1)), np.zeros((12, 13, 1)))

    def test_gradient_matches_finite_differences(self, rng):
        x = rng.uniform(0.1, 0.9, size=(15, 15, 1))
        y = rng.uniform(0.1, 0.9, size=(15, 15, 1))
        check_gradient(lambda t: loss.ssim_map(t, y), x.copy())


class TestSsimLoss:
    def test_identical_images_give_zero(self, rng):
        x = rng.uniform(size=(14, 14, 3))
        value, _ = loss.ssim_loss(x, x.copy())
        assert value == 0.0

    def test_value_stays_within_similarity_range(self, rng):
        for trial in range(10):
            r = np.random.default_rng(trial)
            a = r.uniform(size=(14, 14, 3))
            b = np.clip(1.0 - a + r.normal(0, 0.2, size=a.shape), 0, 1)
            value, _ = loss.ssim_loss(a, b)
            assert 0.0 <= value <= 2.0

    def test_gradient_matches_finite_differences(self, rng):
        a = rng.uniform(0.1, 0.9, size=(14, 14, 3))
        b = rng.uniform(0.1, 0.9, size=(14, 14, 3))
        check_gradient(lambda t: loss.ssim_loss(t, b), a.copy())


class TestTotalLoss:
    def test_identical_images_give_zero(self, rng):
        x = rng.uniform(size=(13, 13, 3))
        report = loss.total_loss(x, x.copy())
        assert report.total == 0.0
        assert report.mse == 0.0
        assert report.ssim_loss == 0.0

    def test_total_is_sum_of_parts(self, rng):
        a = rng.uniform(size=(14, 14, 3))
        b = rng.uniform(size=(14, 14, 3))
        report = loss.total_loss(a, b)
        mse_value, mse_grad = loss.mse_loss(a, b)
        ssim_value, ssim_grad = loss.ssim_loss(a, b)
        assert report.total == mse_value + ssim_value
        assert np.array_equal(report.grad_wrt_prediction, mse_grad + ssim_grad)

    def test_gradient_shape_matches_prediction(self, rng):
        a = rng.uniform(size=(13, 15, 3))
        report = loss.total_loss(a, rng.uniform(size=(13, 15, 3)))
        assert report.grad_wrt_prediction.shape == a.shape

    @pytest.mark.parametrize("trial", range(20))
    def test_gradient_matches_finite_differences(self, trial):
        r = np.random.default_rng(5000 + trial)
        a = r.uniform(0.05, 0.95, size=(14, 14, 3))
        b = r.uniform(0.05, 0.95, size=(14, 14, 3))

        def fn(t):
            report = loss.total_loss(t, b)
            return report.total, report.grad_wrt_prediction

        check_gradient(fn, a.copy())
