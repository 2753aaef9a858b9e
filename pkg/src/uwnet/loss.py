"""Training objective: pixel-wise MSE plus a structural-similarity penalty.

The total loss is the plain 1:1 sum of the two terms. The similarity term is
computed on grayscale with a uniform 13x13 window (population statistics,
divide by 169) and stabilizers c1 = 0.02, c2 = 0.03 applied directly on the
[0, 1] value range. Only pixels whose full window fits inside the image
contribute. Note the evaluation metrics in uwnet.quality use the classical
Gaussian-window convention instead; the two are intentionally different.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError

GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])
SSIM_WINDOW = 13
SSIM_C1 = 0.02
SSIM_C2 = 0.03


@dataclass
class LossReport:
    mse: float
    ssim_loss: float
    total: float
    grad_wrt_prediction: np.ndarray


def _require_same_shape(prediction, target):
    if prediction.shape != target.shape:
        raise DimensionError(
            f"prediction shape {prediction.shape} does not match target {target.shape}"
        )


def mse_loss(prediction, target):
    """Mean squared error over pixels x channels and its gradient (2/M)(pred - target)."""
    _require_same_shape(prediction, target)
    diff = prediction - target
    m = diff.size
    value = float(np.sum(diff * diff) / m)
    grad = (2.0 / m) * diff
    return value, grad


def rgb_to_gray(image):
    """Luma projection 0.299 R + 0.587 G + 0.114 B, returned as (H, W, 1)."""
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"expected (H, W, 3) image, got {image.shape}")
    return (image @ GRAY_WEIGHTS)[:, :, np.newaxis]


def _gray_backward(grad_gray):
    return grad_gray * GRAY_WEIGHTS


def _box_sums(a, k):
    """Sliding k x k window sums of a 2-D array, valid positions only.

    Summed directly per axis (not via an integral image) to avoid the
    cancellation noise that would blunt finite-difference gradient checks.
    """
    rows = np.lib.stride_tricks.sliding_window_view(a, k, axis=0).sum(axis=-1)
    return np.lib.stride_tricks.sliding_window_view(rows, k, axis=1).sum(axis=-1)


def _spread(center_map, k):
    """Adjoint of _box_sums: accumulate each window's value onto all its pixels."""
    padded = np.pad(center_map, k - 1)
    return _box_sums(padded, k)


def ssim_map(pred_gray, target_gray):
    """Mean windowed SSIM between two gray images and its gradient.

    Per window: means mu, population variances sigma^2 and cross-covariance
    are taken over the 13x13 box, then

        ssim = (2 mu_x mu_y + c1) (2 sigma_xy + c2)
               / ((mu_x^2 + mu_y^2 + c1) (sigma_x^2 + sigma_y^2 + c2))

    The returned gradient is d(meanSSIM)/d(pred_gray), shaped like pred_gray.
    """
    _require_same_shape(pred_gray, target_gray)
    if pred_gray.ndim != 3 or pred_gray.shape[2] != 1:
        raise DimensionError(f"expected (H, W, 1) gray image, got {pred_gray.shape}")
    h, w = pred_gray.shape[:2]
    k = SSIM_WINDOW
    if h < k or w < k:
        raise DimensionError(f"image {h}x{w} is smaller than the {k}x{k} SSIM window")
    x = pred_gray[:, :, 0]
    y = target_gray[:, :, 0]
    n = float(k * k)

    mu_x = _box_sums(x, k) / n
    mu_y = _box_sums(y, k) / n
    sigma_x2 = _box_sums(x * x, k) / n - mu_x * mu_x
    sigma_y2 = _box_sums(y * y, k) / n - mu_y * mu_y
    sigma_xy = _box_sums(x * y, k) / n - mu_x * mu_y

    a1 = 2.0 * mu_x * mu_y + SSIM_C1
    b1 = mu_x * mu_x + mu_y * mu_y + SSIM_C1
    a2 = 2.0 * sigma_xy + SSIM_C2
    b2 = sigma_x2 + sigma_y2 + SSIM_C2
    ssim = (a1 * a2) / (b1 * b2)
    mean_ssim = float(ssim.mean())

    # d ssim / d x_q for pixel q inside the window centered at p splits into a
    # per-window constant plus terms linear in x_q and y_q:
    #   c = 2 / (n b1 b2)
    #   d ssim/d x_q = c [ a2 mu_y + a1 (y_q - mu_y) - ssim (b2 mu_x + b1 (x_q - mu_x)) ]
    # so the full gradient is a window-spread of three per-window maps.
    c = 2.0 / (n * b1 * b2)
    alpha = c * (a2 * mu_y - a1 * mu_y - ssim * (b2 * mu_x - b1 * mu_x))
    beta_y = c * a1
    beta_x = -c * ssim * b1
    p_count = ssim.size
    grad = (_spread(alpha, k) + y * _spread(beta_y, k) + x * _spread(beta_x, k)) / p_count
    return mean_ssim, grad[:, :, np.newaxis]


def ssim_loss(prediction, target):
    """1 - meanSSIM on grayscale, with the gradient chained back to RGB."""
    _require_same_shape(prediction, target)
    mean_ssim, grad_gray = ssim_map(rgb_to_gray(prediction), rgb_to_gray(target))
    value = 1.0 - mean_ssim
    grad = _gray_backward(-grad_gray)
    return value, grad


def total_loss(prediction, target):
    """Combined objective: MSE plus SSIM loss, gradients summed 1:1."""
    mse_value, mse_grad = mse_loss(prediction, target)
    ssim_value, ssim_grad = ssim_loss(prediction, target)
    return LossReport(
        mse=mse_value,
        ssim_loss=ssim_value,
        total=mse_value + ssim_value,
        grad_wrt_prediction=mse_grad + ssim_grad,
    )
