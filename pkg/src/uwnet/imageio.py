"""Image, depth-map, manifest and checkpoint persistence.

All writes are atomic (temp file in the target directory, then rename), so a
crash never leaves a half-written artifact. Formats, byte-exactly:

Color images
    8-bit RGB PNG, or binary PPM: ``P6\\n{width} {height}\\n255\\n`` followed
    by width*height*3 raw bytes, row-major RGB. Reading maps byte b to
    b/255.0; writing clamps to [0, 1] and quantizes round-half-up,
    byte = floor(255 v + 0.5).

Depth maps
    16-bit grayscale PNG, or binary PGM: ``P5\\n{width} {height}\\n65535\\n``
    followed by big-endian uint16 samples. Values are normalized by the
    file's own (min, max); a constant map loads as all zeros and warns.

Manifests
    UTF-8 text, one record per line, tab-separated. Input pairs:
    ``cleanPath<TAB>depthPath``. Synthesized pairs:
    ``degradedPath<TAB>gtPath<TAB>waterType<TAB>B_r,B_g,B_b<TAB>depthMax<TAB>seed``.
    Paths are relative to the manifest's directory.

Checkpoints (little-endian throughout)
    magic ``UWCN`` (4 bytes), version uint32 (currently 1), num_blocks,
    convs_per_block, feature_maps uint32, flags uint32 (bit0 residual
    learning, bit1 dense concat), seed int64, water-type tag (uint32 length +
    UTF-8 bytes), layer count uint32, then per layer kh/kw/in/out uint32,
    then all weights as float32: per layer the kernel in (kh, kw, in, out)
    row-major order followed by the bias. The file must end exactly at the
    declared weight count.
"""

import os
import struct
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import ConfigError, DataIOError, DimensionError, FormatError
from .model import Model, ModelConfig
from .tensor import ConvParams

CHECKPOINT_MAGIC = b"UWCN"
CHECKPOINT_VERSION = 1

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ConstantDepthWarning(UserWarning):
    """A depth map with a single value was normalized to all zeros."""


def ensure_dir(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _atomic_write_bytes(path, data):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise DataIOError(f"cannot write {path}: {exc}") from exc


def quantize_u8(values):
    """Clamp to [0, 1] and map to bytes, round-half-up."""
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def dequantize_u8(bytes_):
    return np.asarray(bytes_, dtype=np.float64) / 255.0


# ---------------------------------------------------------------------------
# netpbm parsing


def _pnm_tokens(data, count, start):
    """Read `count` whitespace-separated header tokens (with # comments)."""
    tokens = []
    pos = start
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        if pos >= len(data):
            raise FormatError(f"truncated netpbm header at byte {pos}")
        tok = bytearray()
        while pos < len(data) and not data[pos : pos + 1].isspace():
            tok += data[pos : pos + 1]
            pos += 1
        tokens.append(bytes(tok))
    if pos >= len(data):
        raise FormatError(f"missing pixel data at byte {pos}")
    pos += 1  # single whitespace byte separating header from raster
    return tokens, pos


def _parse_pnm(data, expected_magic, expected_maxval):
    if data[:2] != expected_magic:
        raise FormatError(f"bad magic at byte 0: {data[:2]!r}")
    (w_tok, h_tok, maxval_tok), pos = _pnm_tokens(data, 3, 2)
    try:
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except ValueError:
        raise FormatError(f"non-numeric netpbm header field near byte {pos}") from None
    if width < 1 or height < 1:
        raise FormatError(f"invalid dimensions {width}x{height}")
    if maxval != expected_maxval:
        raise FormatError(f"maxval {maxval}, expected {expected_maxval}")
    return width, height, pos


def _read_ppm(data):
    width, height, pos = _parse_pnm(data, b"P6", 255)
    need = width * height * 3
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise FormatError(f"truncated raster at byte {pos + len(raster)}")
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)
    return dequantize_u8(pixels)


def _encode_ppm(pixels_u8):
    h, w = pixels_u8.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + pixels_u8.tobytes()


def _read_pgm16(data):
    width, height, pos = _parse_pnm(data, b"P5", 65535)
    need = width * height * 2
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise FormatError(f"truncated raster at byte {pos + len(raster)}")
    samples = np.frombuffer(raster, dtype=">u2").reshape(height, width)
    return samples.astype(np.float64)


def _encode_pgm16(samples_u16):
    h, w = samples_u16.shape[:2]
    return b"P5\n%d %d\n65535\n" % (w, h) + samples_u16.astype(">u2").tobytes()


# ---------------------------------------------------------------------------
# images


def _read_file(path):
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc


def read_image(path):
    """Load an 8-bit RGB PNG or binary PPM as an (H, W, 3) tensor in [0, 1]."""
    data = _read_file(path)
    if data[:2] == b"P6":
        return _read_ppm(data)
    if data[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        try:
            with Image.open(path) as img:
                img.load()
                if img.mode != "RGB":
                    raise FormatError(
                        f"{path}: expected 8-bit RGB PNG, got mode {img.mode}"
                    )
                return dequantize_u8(np.asarray(img, dtype=np.uint8))
        except (OSError, SyntaxError, UnidentifiedImageError) as exc:
            raise FormatError(f"{path}: corrupt PNG ({exc})") from exc
    raise FormatError(f"{path}: unsupported image format at byte 0")


def write_image(tensor, path):
    """Quantize to 8 bits and write a PNG or PPM depending on the extension."""
    if tensor.ndim != 3 or tensor.shape[2] != 3:
        raise DimensionError(f"image tensor must be (H, W, 3), got {tensor.shape}")
    pixels = quantize_u8(tensor)
    path = Path(path)
    if path.suffix.lower() == ".ppm":
        _atomic_write_bytes(path, _encode_ppm(pixels))
    elif path.suffix.lower() == ".png":
        _atomic_write_bytes(path, _encode_png(pixels))
    else:
        raise FormatError(f"{path}: unsupported image extension (use .png or .ppm)")


def _encode_png(array):
    import io as _io

    buf = _io.BytesIO()
    Image.fromarray(array).save(buf, format="PNG")
    return buf.getvalue()


def read_depth(path):
    """Load a 16-bit grayscale PNG or PGM, normalized to [0, 1] by its own range."""
    data = _read_file(path)
    if data[:2] == b"P5":
        samples = _read_pgm16(data)
    elif data[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        try:
            with Image.open(path) as img:
                img.load()
                if img.mode not in ("I", "I;16", "I;16B"):
                    raise FormatError(
                        f"{path}: expected 16-bit grayscale PNG, got mode {img.mode}"
                    )
                samples = np.asarray(img, dtype=np.float64)
        except (OSError, SyntaxError, UnidentifiedImageError) as exc:
            raise FormatError(f"{path}: corrupt PNG ({exc})") from exc
    else:
        raise FormatError(f"{path}: unsupported depth format at byte 0")
    lo = samples.min()
    hi = samples.max()
    if hi == lo:
        warnings.warn(
            f"{path}: constant depth map, normalizing to zeros", ConstantDepthWarning
        )
        return np.zeros(samples.shape + (1,))
    return ((samples - lo) / (hi - lo))[:, :, np.newaxis]


def write_depth(tensor, path):
    """Quantize a [0, 1] map to 16 bits and write PNG or PGM by extension."""
    if tensor.ndim == 3:
        if tensor.shape[2] != 1:
            raise DimensionError(f"depth tensor must be (H, W, 1), got {tensor.shape}")
        tensor = tensor[:, :, 0]
    samples = np.floor(np.clip(tensor, 0.0, 1.0) * 65535.0 + 0.5).astype(np.uint16)
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        _atomic_write_bytes(path, _encode_pgm16(samples))
    elif path.suffix.lower() == ".png":
        import io as _io

        buf = _io.BytesIO()
        Image.fromarray(samples).save(buf, format="PNG")
        _atomic_write_bytes(path, buf.getvalue())
    else:
        raise FormatError(f"{path}: unsupported depth extension (use .png or .pgm)")


def resize_bilinear(tensor, size):
    """Resize an (H, W, C) tensor to (width, height) with bilinear sampling."""
    w_out, h_out = int(size[0]), int(size[1])
    if w_out < 1 or h_out < 1:
        raise ConfigError(f"invalid resize target {size}")
    h_in, w_in = tensor.shape[:2]
    if (h_in, w_in) == (h_out, w_out):
        return tensor.copy()
    ys = (np.arange(h_out) + 0.5) * (h_in / h_out) - 0.5
    xs = (np.arange(w_out) + 0.5) * (w_in / w_out) - 0.5
    y0 = np.floor(ys)
    x0 = np.floor(xs)
    fy = (ys - y0)[:, np.newaxis, np.newaxis]
    fx = (xs - x0)[np.newaxis, :, np.newaxis]
    y0i = np.clip(y0.astype(int), 0, h_in - 1)
    y1i = np.clip(y0.astype(int) + 1, 0, h_in - 1)
    x0i = np.clip(x0.astype(int), 0, w_in - 1)
    x1i = np.clip(x0.astype(int) + 1, 0, w_in - 1)
    top = tensor[y0i][:, x0i] * (1 - fx) + tensor[y0i][:, x1i] * fx
    bottom = tensor[y1i][:, x0i] * (1 - fx) + tensor[y1i][:, x1i] * fx
    return top * (1 - fy) + bottom * fy


# ---------------------------------------------------------------------------
# manifests


@dataclass
class ManifestEntry:
    """One record: a file pair plus optional synthesis metadata."""

    path_a: str
    path_b: str
    water_type: str = None
    background: tuple = None
    depth_max: float = None
    seed: int = None

    @property
    def has_metadata(self):
        return self.water_type is not None


@dataclass
class DatasetManifest:
    entries: list = field(default_factory=list)
    base_dir: Path = Path(".")

    def resolve(self, relative):
        return Path(self.base_dir) / relative


def _check_unique_outputs(entries, where):
    seen = {}
    for n, entry in enumerate(entries, start=1):
        if entry.has_metadata:
            if entry.path_a in seen:
                raise FormatError(
                    f"{where}: duplicate degraded path {entry.path_a!r} "
                    f"(lines {seen[entry.path_a]} and {n})"
                )
            seen[entry.path_a] = n


def read_manifest(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot read {path}: {exc}") from exc
    entries = []
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 2:
            entries.append(ManifestEntry(path_a=fields[0], path_b=fields[1]))
        elif len(fields) == 6:
            try:
                background = tuple(float(v) for v in fields[3].split(","))
                if len(background) != 3:
                    raise ValueError("need 3 background values")
                entries.append(
                    ManifestEntry(
                        path_a=fields[0],
                        path_b=fields[1],
                        water_type=fields[2],
                        background=background,
                        depth_max=float(fields[4]),
                        seed=int(fields[5]),
                    )
                )
            except ValueError as exc:
                raise FormatError(f"{path}: line {n}: {exc}") from None
        else:
            raise FormatError(
                f"{path}: line {n}: expected 2 or 6 tab-separated fields, got {len(fields)}"
            )
    _check_unique_outputs(entries, str(path))
    return DatasetManifest(entries=entries, base_dir=path.parent)


def write_manifest(manifest, path):
    _check_unique_outputs(manifest.entries, str(path))
    lines = []
    for entry in manifest.entries:
        if entry.has_metadata:
            b = ",".join(repr(float(v)) for v in entry.background)
            lines.append(
                f"{entry.path_a}\t{entry.path_b}\t{entry.water_type}\t{b}"
                f"\t{float(entry.depth_max)!r}\t{int(entry.seed)}"
            )
        else:
            lines.append(f"{entry.path_a}\t{entry.path_b}")
    data = ("\n".join(lines) + "\n") if lines else ""
    _atomic_write_bytes(path, data.encode("utf-8"))


# ---------------------------------------------------------------------------
# checkpoints


def write_checkpoint(model, path, water_type_tag=""):
    cfg = model.config
    if not -(2**63) <= cfg.seed < 2**63:
        raise ConfigError(f"seed {cfg.seed} does not fit a signed 64-bit field")
    flags = (1 if cfg.residual_learning else 0) | (2 if cfg.dense_concat else 0)
    tag = water_type_tag.encode("utf-8")
    parts = [
        CHECKPOINT_MAGIC,
        struct.pack(
            "<IIIIIq",
            CHECKPOINT_VERSION,
            cfg.num_blocks,
            cfg.convs_per_block,
            cfg.feature_maps,
            flags,
            cfg.seed,
        ),
        struct.pack("<I", len(tag)),
        tag,
        struct.pack("<I", len(model.layers)),
    ]
    for p in model.layers:
        kh, kw, cin, cout = p.kernel.shape
        parts.append(struct.pack("<IIII", kh, kw, cin, cout))
    for p in model.layers:
        parts.append(p.kernel.astype("<f4").tobytes())
        parts.append(p.bias.astype("<f4").tobytes())
    _atomic_write_bytes(path, b"".join(parts))


def read_checkpoint(path):
    """Load a checkpoint; returns (model, water_type_tag).

    Rejects wrong magic, unknown versions and any dimension/size mismatch
    without returning a partial model.
    """
    data = _read_file(path)

    def need(count, offset, what):
        if offset + count > len(data):
            raise FormatError(f"{path}: truncated {what} at byte {offset}")
        return offset + count

    offset = need(4, 0, "magic")
    if data[:4] != CHECKPOINT_MAGIC:
        raise FormatError(f"{path}: bad magic {data[:4]!r}")
    end = need(struct.calcsize("<IIIIIq"), offset, "header")
    version, num_blocks, convs_per_block, feature_maps, flags, seed = struct.unpack_from(
        "<IIIIIq", data, offset
    )
    offset = end
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    end = need(4, offset, "tag length")
    (tag_len,) = struct.unpack_from("<I", data, offset)
    offset = end
    end = need(tag_len, offset, "water-type tag")
    tag = data[offset:end].decode("utf-8")
    offset = end
    end = need(4, offset, "layer count")
    (num_layers,) = struct.unpack_from("<I", data, offset)
    offset = end

    config = ModelConfig(
        num_blocks=num_blocks,
        convs_per_block=convs_per_block,
        feature_maps=feature_maps,
        residual_learning=bool(flags & 1),
        dense_concat=bool(flags & 2),
        seed=seed,
    )
    config.validate()
    plan = config.layer_channel_plan()
    if num_layers != len(plan):
        raise FormatError(
            f"{path}: {num_layers} layers stored, config implies {len(plan)}"
        )
    dims = []
    for i in range(num_layers):
        end = need(16, offset, f"layer {i} dims")
        kh, kw, cin, cout = struct.unpack_from("<IIII", data, offset)
        offset = end
        if (kh, kw) != (3, 3) or (cin, cout) != plan[i]:
            raise FormatError(
                f"{path}: layer {i} dims ({kh},{kw},{cin},{cout}) do not match "
                f"the declared config (3,3,{plan[i][0]},{plan[i][1]})"
            )
        dims.append((kh, kw, cin, cout))
    expected = sum(kh * kw * cin * cout + cout for kh, kw, cin, cout in dims) * 4
    if len(data) - offset != expected:
        raise FormatError(
            f"{path}: weight payload is {len(data) - offset} bytes, dims require {expected}"
        )
    layers = []
    for kh, kw, cin, cout in dims:
        ksize = kh * kw * cin * cout * 4
        kernel = np.frombuffer(data, dtype="<f4", count=kh * kw * cin * cout, offset=offset)
        offset += ksize
        bias = np.frombuffer(data, dtype="<f4", count=cout, offset=offset)
        offset += cout * 4
        layers.append(
            ConvParams(
                kernel=kernel.astype(np.float64).reshape(kh, kw, cin, cout),
                bias=bias.astype(np.float64),
            )
        )
    return Model(layers=layers, config=config), tag
