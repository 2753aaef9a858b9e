"""HSI color space and the saturation/intensity range-normalization stage.

Conversion uses the arccos hue convention on [0, 1] RGB:

    I = (R + G + B) / 3
    S = 1 - min(R, G, B) / I              (0 when I = 0)
    theta = arccos( ((R-G) + (R-B)) / (2 sqrt((R-G)^2 + (R-B)(G-B))) )
    H = theta if B <= G else 2*pi - theta

Hue is stored in radians in [0, 2*pi) and is NaN for achromatic pixels
(S = 0). The inverse uses the standard three-sector reconstruction and clamps
to [0, 1].

The post-processing stage stretches the S and I ranges to [0, 1], picking the
stretch endpoints from a 256-bin histogram: bins holding less than 0.2% of
the pixels are ignored, so single extreme pixels cannot dominate the range.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

HISTOGRAM_BINS = 256
FREQUENCY_THRESHOLD = 0.002
_SECTOR = 2.0 * np.pi / 3.0


@dataclass
class HsiImage:
    hue: np.ndarray
    saturation: np.ndarray
    intensity: np.ndarray


def rgb_to_hsi(image):
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"expected (H, W, 3) image, got {image.shape}")
    if np.any(image < 0) or np.any(image > 1):
        raise DomainError("RGB values must lie in [0, 1]")
    r, g, b = image[:, :, 0], image[:, :, 1], image[:, :, 2]
    intensity = (r + g + b) / 3.0
    min_c = image.min(axis=2)
    saturation = np.where(intensity > 0, 1.0 - min_c / np.maximum(intensity, 1e-300), 0.0)

    num = 0.5 * ((r - g) + (r - b))
    den = np.sqrt((r - g) ** 2 + (r - b) * (g - b))
    theta = np.arccos(np.clip(num / np.maximum(den, 1e-300), -1.0, 1.0))
    hue = np.where(b <= g, theta, 2.0 * np.pi - theta)
    hue = np.where(saturation > 0, hue, np.nan)
    return HsiImage(hue=hue, saturation=saturation, intensity=intensity)


def hsi_to_rgb(hsi):
    s = hsi.saturation
    i = hsi.intensity
    if np.any(s < 0) or np.any(s > 1) or np.any(i < 0) or np.any(i > 1):
        raise DomainError("saturation and intensity must lie in [0, 1]")
    hue = hsi.hue
    chromatic = ~np.isnan(hue) & (s > 0)
    if np.any(chromatic & ((hue < 0) | (hue >= 2.0 * np.pi))):
        raise DomainError("hue must lie in [0, 2*pi)")

    h = np.where(chromatic, hue, 0.0)
    sector = np.minimum((h / _SECTOR).astype(int), 2)
    hp = h - sector * _SECTOR
    # within a sector: one channel at i(1-s), one carrying the hue-dependent
    # boost, the third balancing the sum back to 3i
    low = i * (1.0 - s)
    boosted = i * (1.0 + s * np.cos(hp) / np.cos(np.pi / 3.0 - hp))
    mid = 3.0 * i - low - boosted

    rgb = np.empty(s.shape + (3,))
    # (low, boosted, balance) channel roles per sector: RG, GB, BR order
    for sec, (lo_ch, hi_ch, mid_ch) in enumerate(((2, 0, 1), (0, 1, 2), (1, 2, 0))):
        mask = sector == sec
        rgb[:, :, lo_ch][mask] = low[mask]
        rgb[:, :, hi_ch][mask] = boosted[mask]
        rgb[:, :, mid_ch][mask] = mid[mask]
    rgb[~chromatic] = i[~chromatic, np.newaxis]
    return np.clip(rgb, 0.0, 1.0)


def robust_min_max(channel, frequency_threshold=FREQUENCY_THRESHOLD):
    """Histogram-based (min, max) ignoring bins rarer than the threshold.

    256 bins over [0, 1]; returns the lower edge of the lowest and the upper
    edge of the highest bin whose pixel share is >= the threshold. Falls back
    to the raw extremes when no bin qualifies.
    """
    values = np.asarray(channel, dtype=np.float64).ravel()
    if values.size == 0:
        raise DomainError("empty channel")
    idx = np.clip((values * HISTOGRAM_BINS).astype(int), 0, HISTOGRAM_BINS - 1)
    counts = np.bincount(idx, minlength=HISTOGRAM_BINS)
    qualifying = (counts > 0) & (counts >= frequency_threshold * values.size)
    hits = np.nonzero(qualifying)[0]
    if hits.size == 0:
        return float(values.min()), float(values.max())
    return hits[0] / HISTOGRAM_BINS, (hits[-1] + 1) / HISTOGRAM_BINS


def normalize_channel(channel, y_min, y_max):
    """Affine stretch (y - y_min) / (y_max - y_min), clamped to [0, 1]."""
    if y_min > y_max:
        raise DomainError(f"y_min {y_min} exceeds y_max {y_max}")
    if y_max - y_min < 1e-6:
        return np.array(channel, dtype=np.float64, copy=True)
    return np.clip((channel - y_min) / (y_max - y_min), 0.0, 1.0)


def postprocess(image):
    """Stretch saturation and intensity ranges to [0, 1]; hue is untouched."""
    hsi = rgb_to_hsi(image)
    s_min, s_max = robust_min_max(hsi.saturation)
    i_min, i_max = robust_min_max(hsi.intensity)
    adjusted = HsiImage(
        hue=hsi.hue,
        saturation=normalize_channel(hsi.saturation, s_min, s_max),
        intensity=normalize_channel(hsi.intensity, i_min, i_max),
    )
    return hsi_to_rgb(adjusted)
