"""Deterministic synthetic RGB-D content for tests, demos and desk-scale runs.

Nothing here depends on external datasets: clean frames are smooth gradients
plus a few sharp shapes (so convolutions and window statistics see real
structure), depth maps are smooth ramps with blobs spanning the full [0, 1]
range.
"""

import numpy as np

from . import color, imageio

TWO_PI = 2.0 * np.pi


def make_clean_image(seed, size=(64, 64)):
    """A smooth colorful pattern with a few hard-edged shapes, values in (0, 1)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(101,)))
    h, w = size
    yy, xx = np.meshgrid(np.linspace(0, 1, h), np.linspace(0, 1, w), indexing="ij")
    img = np.empty((h, w, 3))
    for c in range(3):
        plane = rng.uniform(0.3, 0.6)
        plane = plane + rng.uniform(-0.25, 0.25) * xx + rng.uniform(-0.25, 0.25) * yy
        for _ in range(2):
            fx, fy = rng.uniform(0.5, 2.5, size=2)
            px, py = rng.uniform(0, TWO_PI, size=2)
            plane = plane + rng.uniform(0.04, 0.12) * np.sin(TWO_PI * fx * xx + px) * np.sin(
                TWO_PI * fy * yy + py
            )
        img[:, :, c] = plane
    for _ in range(3):
        cy, cx = rng.uniform(0.15, 0.85, size=2)
        radius = rng.uniform(0.08, 0.22)
        mask = (yy - cy) ** 2 + (xx - cx) ** 2 < radius**2
        img[mask] += rng.uniform(-0.22, 0.22, size=3)
    return np.clip(img, 0.02, 0.98)


def make_depth_map(seed, size=(64, 64)):
    """A smooth depth field normalized to span exactly [0, 1]."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(202,)))
    h, w = size
    yy, xx = np.meshgrid(np.linspace(0, 1, h), np.linspace(0, 1, w), indexing="ij")
    field = rng.uniform(0.5, 1.5) * yy + rng.uniform(-0.5, 0.5) * xx
    for _ in range(2):
        cy, cx = rng.uniform(0, 1, size=2)
        width = rng.uniform(0.15, 0.4)
        field = field + rng.uniform(-0.6, 0.6) * np.exp(
            -((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * width**2)
        )
    field -= field.min()
    peak = field.max()
    if peak > 0:
        field /= peak
    return field[:, :, np.newaxis]


def write_fixture_dataset(directory, count, size=(64, 64), seed=0):
    """Write `count` clean/depth PNG pairs plus a pairs.tsv manifest.

    Returns the manifest path. Depth files are 16-bit PNGs quantized from the
    generated [0, 1] field.
    """
    directory = imageio.ensure_dir(directory)
    entries = []
    for i in range(count):
        clean_rel = f"clean/{i:04d}.png"
        depth_rel = f"depth/{i:04d}.png"
        imageio.write_image(make_clean_image(seed + i, size), directory / clean_rel)
        imageio.write_depth(make_depth_map(seed + i, size), directory / depth_rel)
        entries.append(imageio.ManifestEntry(path_a=clean_rel, path_b=depth_rel))
    manifest = imageio.DatasetManifest(entries=entries, base_dir=directory)
    path = directory / "pairs.tsv"
    imageio.write_manifest(manifest, path)
    return path


def make_low_contrast_image(size=(64, 64)):
    """The post-processing exercise image: compressed S/I ranges, fixed hues.

    Layout (values chosen so the range stretch hits histogram-bin edges):
    two achromatic stripes pinning the intensity extremes, one saturated
    stripe pinning the saturation maximum, a chromatic bulk with saturation
    and intensity ramps, and a handful of outlier pixels rare enough
    (< 0.2% of the image) that the robust range selection must ignore them.
    """
    h, w = size
    eps = 1e-6
    hue = np.full((h, w), np.nan)
    sat = np.zeros((h, w))
    inten = np.empty((h, w))

    r1 = max(1, h // 6)  # bright achromatic stripe: intensity maximum
    r2 = 2 * r1  # dark achromatic stripe: intensity minimum
    r3 = r2 + max(1, h // 10)  # saturated chromatic stripe: saturation maximum
    inten[:r1] = 154.0 / 256.0 - eps
    inten[r1:r2] = 102.0 / 256.0
    hue[r2:r3] = 2.1
    sat[r2:r3] = 57.0 / 256.0 - eps
    inten[r2:r3] = 0.42

    cols = np.linspace(0.0, 1.0, w)
    rows = np.linspace(0.0, 1.0, h - r3)[:, np.newaxis]
    hue[r3:] = 2.05 + 0.1 * rows
    sat[r3:] = 0.02 + 0.18 * cols
    inten[r3:] = 0.54 - 0.08 * cols

    # rare outliers the 0.2% rule must ignore (6 pixels each)
    mid = r3 + (h - r3) // 2
    inten[mid, 0:6] = 0.95
    inten[mid + 1, 0:6] = 0.05
    sat[mid, 0:6] = 0.0
    sat[mid + 1, 0:6] = 0.0
    hue[mid, 0:6] = np.nan
    hue[mid + 1, 0:6] = np.nan
    hue[mid + 2, 0:6] = 2.1
    sat[mid + 2, 0:6] = 0.5
    inten[mid + 2, 0:6] = 0.42

    return color.hsi_to_rgb(color.HsiImage(hue=hue, saturation=sat, intensity=inten))
