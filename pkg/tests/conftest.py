import numpy as np
import pytest

from uwnet import fixtures, imageio, watersim


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def small_dataset(tmp_path):
    """Two clean/depth pairs plus their manifest, 24x24."""
    manifest_path = fixtures.write_fixture_dataset(tmp_path / "src", 2, size=(24, 24), seed=3)
    return manifest_path


@pytest.fixture
def synthesized_dataset(tmp_path):
    """A tiny degraded/truth dataset: 3 inputs x 2 variants at 20x20."""
    manifest_path = fixtures.write_fixture_dataset(tmp_path / "src", 3, size=(20, 20), seed=5)
    manifest = imageio.read_manifest(manifest_path)
    out = watersim.build_dataset(
        manifest, watersim.water_type("1"), tmp_path / "ds", variants_per_image=2, seed=11
    )
    return out


def brute_force_conv(x, kernel, bias):
    """Reference convolution: explicit loops, zero padding of one pixel."""
    h, w, cin = x.shape
    cout = kernel.shape[3]
    padded = np.zeros((h + 2, w + 2, cin))
    padded[1 : 1 + h, 1 : 1 + w, :] = x
    out = np.zeros((h, w, cout))
    for y in range(h):
        for xx in range(w):
            for o in range(cout):
                acc = bias[o]
                for i in range(3):
                    for j in range(3):
                        for c in range(cin):
                            acc += kernel[i, j, c, o] * padded[y + i, xx + j, c]
                out[y, xx, o] = acc
    return out


def brute_force_ssim(x, y, window=13, c1=0.02, c2=0.03):
    """Reference windowed SSIM: per-pixel loops, population statistics."""
    h, w = x.shape[:2]
    x2 = x[:, :, 0] if x.ndim == 3 else x
    y2 = y[:, :, 0] if y.ndim == 3 else y
    values = []
    n = window * window
    for top in range(h - window + 1):
        for left in range(w - window + 1):
            wx = x2[top : top + window, left : left + window]
            wy = y2[top : top + window, left : left + window]
            mx = wx.sum() / n
            my = wy.sum() / n
            vx = (wx * wx).sum() / n - mx * mx
            vy = (wy * wy).sum() / n - my * my
            cxy = (wx * wy).sum() / n - mx * my
            values.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return sum(values) / len(values)
