"""Physics-based underwater image synthesis.

A degraded frame is formed from a clean frame and a per-pixel scene depth as

    U_c(x) = I_c(x) * T_c(x) + B_c * (1 - T_c(x))        (c = red, green, blue)

where T_c(x) = N_c ** d(x) is the channel transmission after d(x) meters of
water and B_c is a homogeneous background light. N_c is the per-meter
residual energy ratio of the water body; the ten Jerlov water types below
(open ocean I, IA, IB, II, III and coastal 1, 3, 5, 7, 9, clearest to most
turbid within each class) fix N per channel:

    type   I      IA     IB     II     III    1      3      5      7      9
    blue   0.982  0.975  0.968  0.94   0.89   0.875  0.8    0.67   0.5    0.29
    green  0.961  0.955  0.95   0.925  0.885  0.885  0.82   0.73   0.61   0.46
    red    0.805  0.804  0.83   0.8    0.75   0.75   0.71   0.67   0.62   0.55
"""

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, DomainError

DEPTH_MIN_METERS = 0.5
DEPTH_MAX_CEILING = 15.0
DEPTH_MAX_FLOOR = 3.0  # sampled depthMax stays >= 3 m so every variant is visibly degraded
BACKGROUND_LOW = 0.8
BACKGROUND_HIGH = 1.0


@dataclass(frozen=True)
class WaterType:
    """One Jerlov water type: per-meter residual energy ratio per channel."""

    name: str
    n_red: float
    n_green: float
    n_blue: float

    @property
    def n_rgb(self):
        return np.array([self.n_red, self.n_green, self.n_blue])


WATER_TYPES = {
    wt.name: wt
    for wt in (
        WaterType("I", 0.805, 0.961, 0.982),
        WaterType("IA", 0.804, 0.955, 0.975),
        WaterType("IB", 0.83, 0.95, 0.968),
        WaterType("II", 0.8, 0.925, 0.94),
        WaterType("III", 0.75, 0.885, 0.89),
        WaterType("1", 0.75, 0.885, 0.875),
        WaterType("3", 0.71, 0.82, 0.8),
        WaterType("5", 0.67, 0.73, 0.67),
        WaterType("7", 0.62, 0.61, 0.5),
        WaterType("9", 0.55, 0.46, 0.29),
    )
}


def water_type(name):
    """Look up a water type by name, with a helpful error for unknown ones."""
    try:
        return WATER_TYPES[name]
    except KeyError:
        raise ConfigError(
            f"unknown water type {name!r}; valid types: {', '.join(WATER_TYPES)}"
        ) from None


@dataclass
class SynthesisParams:
    """Randomized knobs of one synthesized variant."""

    background_light: tuple
    depth_max: float
    water_type: WaterType
    seed: int
    depth_min: float = DEPTH_MIN_METERS

    def __post_init__(self):
        for b in self.background_light:
            if not BACKGROUND_LOW < b < BACKGROUND_HIGH:
                raise ConfigError(
                    f"background light {b} outside ({BACKGROUND_LOW}, {BACKGROUND_HIGH})"
                )
        if not DEPTH_MIN_METERS <= self.depth_min < self.depth_max <= DEPTH_MAX_CEILING:
            raise ConfigError(
                f"depth range [{self.depth_min}, {self.depth_max}] must satisfy "
                f"{DEPTH_MIN_METERS} <= min < max <= {DEPTH_MAX_CEILING}"
            )


def transmission(wtype, depth_map):
    """Per-channel transmission N_c ** d for a depth map in meters."""
    if depth_map.ndim != 3 or depth_map.shape[2] != 1:
        raise DimensionError(f"depth map must be (H, W, 1), got {depth_map.shape}")
    if np.any(depth_map < 0):
        raise DomainError("depth map contains negative distances")
    return wtype.n_rgb**depth_map


def synthesize(clean, depth_map, params):
    """Degrade a clean [0, 1] image through `params` water: I*T + B*(1-T)."""
    if clean.ndim != 3 or clean.shape[2] != 3:
        raise DimensionError(f"clean image must be (H, W, 3), got {clean.shape}")
    if clean.shape[:2] != depth_map.shape[:2]:
        raise DimensionError(
            f"clean {clean.shape[:2]} and depth {depth_map.shape[:2]} sizes differ"
        )
    if np.any(clean < 0) or np.any(clean > 1):
        raise DomainError("clean image values must lie in [0, 1]")
    t = transmission(params.water_type, depth_map)
    b = np.asarray(params.background_light, dtype=np.float64)
    return clean * t + b * (1.0 - t)


def scale_depth(normalized_depth, params):
    """Map a [0, 1] depth map to meters: depth_min + (depth_max - depth_min) * n."""
    if np.any(normalized_depth < 0) or np.any(normalized_depth > 1):
        raise DomainError("normalized depth values must lie in [0, 1]")
    return params.depth_min + (params.depth_max - params.depth_min) * normalized_depth


def sample_params(seed, wtype):
    """Draw one variant's background light and depth ceiling, reproducibly."""
    rng = np.random.default_rng(seed)
    b = tuple(rng.uniform(BACKGROUND_LOW, BACKGROUND_HIGH, size=3))
    depth_max = float(rng.uniform(DEPTH_MAX_FLOOR, DEPTH_MAX_CEILING))
    return SynthesisParams(
        background_light=b, depth_max=depth_max, water_type=wtype, seed=int(seed)
    )


def variant_seed(base_seed, image_index, variant_index):
    """Independent per-variant stream so parallel synthesis stays reproducible."""
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(image_index, variant_index))
    return int(seq.generate_state(1, np.uint64)[0])


def _synthesize_one(clean, depth_norm, wtype, seed):
    params = sample_params(seed, wtype)
    meters = scale_depth(depth_norm, params)
    return synthesize(clean, meters, params), params


def build_dataset(manifest, wtype, out_dir, variants_per_image=5, seed=0, resize=None, threads=1):
    """Synthesize a paired dataset from (clean, depth) inputs.

    Writes `variants_per_image` degraded PNGs plus one ground-truth PNG per
    input pair under out_dir, together with a manifest recording the sampled
    parameters of every variant. Returns the output manifest. `resize` is an
    optional (width, height) applied to both images before synthesis.
    """
    from . import imageio

    out_dir = imageio.ensure_dir(out_dir)
    entries = []
    jobs = list(enumerate(manifest.entries))

    def produce(item):
        i, entry = item
        clean = imageio.read_image(manifest.resolve(entry.path_a))
        depth = imageio.read_depth(manifest.resolve(entry.path_b))
        if clean.shape[:2] != depth.shape[:2]:
            raise DimensionError(
                f"{entry.path_a} and {entry.path_b} have different sizes"
            )
        if resize is not None:
            clean = imageio.resize_bilinear(clean, resize)
            depth = np.clip(imageio.resize_bilinear(depth, resize), 0.0, 1.0)
        produced = []
        if variants_per_image > 0:
            gt_rel = f"gt/{i:04d}.png"
            imageio.write_image(clean, out_dir / gt_rel)
        for v in range(variants_per_image):
            degraded, params = _synthesize_one(
                clean, depth, wtype, variant_seed(seed, i, v)
            )
            deg_rel = f"degraded/{i:04d}_v{v}.png"
            imageio.write_image(degraded, out_dir / deg_rel)
            produced.append(
                imageio.ManifestEntry(
                    path_a=deg_rel,
                    path_b=gt_rel,
                    water_type=wtype.name,
                    background=params.background_light,
                    depth_max=params.depth_max,
                    seed=params.seed,
                )
            )
        return i, produced

    if threads > 1 and len(jobs) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(produce, jobs))
    else:
        results = [produce(job) for job in jobs]
    for _, produced in sorted(results, key=lambda r: r[0]):
        entries.extend(produced)
    out_manifest = imageio.DatasetManifest(entries=entries, base_dir=out_dir)
    imageio.write_manifest(out_manifest, out_dir / "manifest.tsv")
    return out_manifest
