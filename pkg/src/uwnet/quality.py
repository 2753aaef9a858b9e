"""Full-reference evaluation metrics on the 0-255 scale.

These are the reporting metrics (MSE, PSNR, classical single-scale SSIM with
an 11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03, L = 255, on
grayscale). They are intentionally separate from uwnet.loss, whose SSIM
variant uses a 13x13 uniform window with different stabilizers on [0, 1]
data.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataIOError, DimensionError

GRAY_WEIGHTS = np.array([0.299, 0.587, 0.114])
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
PEAK = 255.0


def _to_gray(image):
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 3 and arr.shape[2] == 3:
        return arr @ GRAY_WEIGHTS
    if arr.ndim == 2:
        return arr
    if arr.ndim == 3 and arr.shape[2] == 1:
        return arr[:, :, 0]
    raise DimensionError(f"expected a gray or RGB image, got shape {arr.shape}")


def mse_metric(a, b):
    """Mean squared difference over pixels x channels, 0-255 scale.

    Parameters
    ----------
    a, b : array_like
      Images of identical shape, values on the 0-255 scale.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = (a - b).ravel()
    return float(np.dot(diff, diff) / diff.size)


def psnr_from_mse(mse):
    """10 log10(255^2 / mse); +inf for mse == 0."""
    if mse < 0:
        raise DimensionError(f"mse must be nonnegative, got {mse}")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def psnr_metric(a, b):
    return psnr_from_mse(mse_metric(a, b))


def _gaussian_window(size=SSIM_WINDOW, sigma=SSIM_SIGMA):
    half = (size - 1) / 2.0
    x = np.arange(size) - half
    g = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return g / g.sum()


def _filter_valid(a, window):
    """Separable correlation with a 1-D window, valid positions only."""
    k = window.size
    rows = np.lib.stride_tricks.sliding_window_view(a, k, axis=0) @ window
    return np.lib.stride_tricks.sliding_window_view(rows, k, axis=1) @ window


def ssim_metric(a, b):
    """Classical single-scale SSIM on grayscale, mean over valid pixels.

    Parameters
    ----------
    a, b : array_like
      Images of identical shape, at least 11x11, values on the 0-255 scale.
    """
    ga = _to_gray(a)
    gb = _to_gray(b)
    if ga.shape != gb.shape:
        raise DimensionError(f"shape mismatch: {ga.shape} vs {gb.shape}")
    if ga.shape[0] < SSIM_WINDOW or ga.shape[1] < SSIM_WINDOW:
        raise DimensionError(
            f"image {ga.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    w = _gaussian_window()
    mu_a = _filter_valid(ga, w)
    mu_b = _filter_valid(gb, w)
    var_a = _filter_valid(ga * ga, w) - mu_a * mu_a
    var_b = _filter_valid(gb * gb, w) - mu_b * mu_b
    cov = _filter_valid(ga * gb, w) - mu_a * mu_b
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    ssim = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    return float(ssim.mean())


@dataclass
class PairMetrics:
    name: str
    mse: float
    psnr: float
    ssim: float


@dataclass
class MetricReport:
    mse: float
    psnr: float
    ssim: float
    per_image: list


def _as_255(tensor01):
    return np.rint(tensor01 * 255.0)


def evaluate_pairs(manifest, enhanced_dir):
    """Score every (enhanced, ground truth) pair and average.

    For each manifest entry the enhanced file is looked up in `enhanced_dir`
    under the degraded image's file name. Pairs are evaluated in sorted name
    order; aggregates are arithmetic means of the per-pair values.
    """
    from . import imageio

    enhanced_dir = Path(enhanced_dir)
    entries = sorted(manifest.entries, key=lambda e: e.path_a)
    missing = [
        str(enhanced_dir / Path(e.path_a).name)
        for e in entries
        if not (enhanced_dir / Path(e.path_a).name).exists()
    ]
    if missing:
        raise DataIOError("missing enhanced files: " + ", ".join(missing))
    per_image = []
    for entry in entries:
        name = Path(entry.path_a).name
        enhanced = _as_255(imageio.read_image(enhanced_dir / name))
        truth = _as_255(imageio.read_image(manifest.resolve(entry.path_b)))
        mse = mse_metric(enhanced, truth)
        per_image.append(
            PairMetrics(name=name, mse=mse, psnr=psnr_from_mse(mse), ssim=ssim_metric(enhanced, truth))
        )
    n = len(per_image)
    if n == 0:
        raise DataIOError("manifest has no entries to evaluate")
    return MetricReport(
        mse=sum(p.mse for p in per_image) / n,
        psnr=sum(p.psnr for p in per_image) / n,
        ssim=sum(p.ssim for p in per_image) / n,
        per_image=per_image,
    )


def _fmt(value):
    return "inf" if math.isinf(value) else f"{value:.6f}"


def format_report(report):
    """Render the tab-separated report text (one pair per line plus MEAN)."""
    lines = [
        f"{p.name}\t{_fmt(p.mse)}\t{_fmt(p.psnr)}\t{_fmt(p.ssim)}" for p in report.per_image
    ]
    lines.append(f"MEAN\t{_fmt(report.mse)}\t{_fmt(report.psnr)}\t{_fmt(report.ssim)}")
    return "\n".join(lines) + "\n"
