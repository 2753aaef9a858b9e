"""The enhancement network: stacked conv-ReLU blocks with dense skip concats.

Default shape (10 conv layers total): three blocks of three 3x3 conv-ReLU
pairs each, then one final 3x3 conv producing a 3-channel correction that is
added back onto the input (residual learning). Each block's output stacks its
conv-ReLU outputs with the network input and, from the second block on, the
previous block's stack, so the channel widths entering the first conv of
blocks 2 and 3 and the final conv are 51, 102 and 153.

Two ablation switches exist: `residual_learning=False` makes the final conv
output the enhanced image directly, and `dense_concat=False` reduces each
block's output to just its last conv-ReLU map stacked with the input.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionError, StateError
from .tensor import (
    ConvParams,
    add,
    concat_backward,
    concat_channels,
    conv2d_backward,
    conv2d_forward,
    relu_backward,
    relu_forward,
)

IMAGE_CHANNELS = 3


@dataclass
class ModelConfig:
    num_blocks: int = 3
    convs_per_block: int = 3
    feature_maps: int = 16
    residual_learning: bool = True
    dense_concat: bool = True
    seed: int = 0

    def validate(self):
        if self.num_blocks < 1:
            raise ConfigError(f"num_blocks must be >= 1, got {self.num_blocks}")
        if self.convs_per_block < 1:
            raise ConfigError(f"convs_per_block must be >= 1, got {self.convs_per_block}")
        if self.feature_maps < 1:
            raise ConfigError(f"feature_maps must be >= 1, got {self.feature_maps}")

    def block_output_channels(self):
        """Channel width of each block's stacked output, via the growth recurrence."""
        widths = []
        prev = 0
        for k in range(self.num_blocks):
            if self.dense_concat:
                w = self.convs_per_block * self.feature_maps + IMAGE_CHANNELS
                if k > 0:
                    w += prev
            else:
                w = self.feature_maps + IMAGE_CHANNELS
            widths.append(w)
            prev = w
        return widths

    def layer_channel_plan(self):
        """(inChannels, outChannels) for every conv layer, in graph order."""
        plan = []
        block_in = IMAGE_CHANNELS
        for width in self.block_output_channels():
            for i in range(self.convs_per_block):
                plan.append((block_in if i == 0 else self.feature_maps, self.feature_maps))
            block_in = width
        plan.append((block_in, IMAGE_CHANNELS))
        return plan


@dataclass
class Model:
    layers: list
    config: ModelConfig


def build(config=None):
    """Initialize a model: He fan-in normal kernels, zero biases, seeded."""
    config = config if config is not None else ModelConfig()
    config.validate()
    rng = np.random.default_rng(config.seed)
    layers = []
    for cin, cout in config.layer_channel_plan():
        std = np.sqrt(2.0 / (3 * 3 * cin))
        kernel = rng.normal(0.0, std, size=(3, 3, cin, cout))
        layers.append(ConvParams(kernel=kernel, bias=np.zeros(cout)))
    return Model(layers=layers, config=config)


def parameter_count(model):
    return sum(p.kernel.size + p.bias.size for p in model.layers)


@dataclass
class ForwardCache:
    """Activations retained for backward(); single use, bound to one model."""

    model_id: int
    input: np.ndarray
    conv_inputs: list = field(default_factory=list)
    preacts: list = field(default_factory=list)
    block_part_channels: list = field(default_factory=list)
    block_widths: list = field(default_factory=list)
    consumed: bool = False


def forward(model, x):
    """Run the network; returns (residual, enhanced, cache).

    `enhanced` is input + residual under residual learning (the residual is
    the raw final-conv output), otherwise the final-conv output itself. No
    clamping happens here; clamp at inference time if needed.
    """
    if x.ndim != 3 or x.shape[2] != IMAGE_CHANNELS:
        raise DimensionError(f"model input must be (H, W, 3), got {x.shape}")
    cfg = model.config
    u = x
    cache = ForwardCache(model_id=id(model), input=u)
    expected_widths = cfg.block_output_channels()
    t = u
    li = 0
    for k in range(cfg.num_blocks):
        zs = []
        inp = t
        for _ in range(cfg.convs_per_block):
            a = conv2d_forward(inp, model.layers[li])
            cache.conv_inputs.append(inp)
            cache.preacts.append(a)
            z = relu_forward(a)
            zs.append(z)
            inp = z
            li += 1
        if cfg.dense_concat:
            parts = zs + [u] + ([t] if k > 0 else [])
        else:
            parts = [zs[-1], u]
        b = concat_channels(parts)
        if b.shape[2] != expected_widths[k]:
            raise StateError(
                f"block {k} produced {b.shape[2]} channels, recurrence expects "
                f"{expected_widths[k]}"
            )
        cache.block_part_channels.append([p.shape[2] for p in parts])
        cache.block_widths.append(b.shape[2])
        t = b
    residual = conv2d_forward(t, model.layers[li])
    cache.conv_inputs.append(t)
    enhanced = add(u, residual) if cfg.residual_learning else residual
    return residual, enhanced, cache


@dataclass
class ConvGrads:
    kernel: np.ndarray
    bias: np.ndarray


@dataclass
class ModelGradients:
    """Per-layer parameter gradients plus the gradient w.r.t. the input image."""

    layers: list
    input: np.ndarray = None

    @classmethod
    def zeros_like(cls, model):
        layers = [
            ConvGrads(np.zeros_like(p.kernel), np.zeros_like(p.bias)) for p in model.layers
        ]
        return cls(layers=layers)

    def accumulate(self, other):
        """Add another gradient set in place (used for mini-batch sums)."""
        for mine, theirs in zip(self.layers, other.layers):
            mine.kernel += theirs.kernel
            mine.bias += theirs.bias

    def scale(self, factor):
        for g in self.layers:
            g.kernel *= factor
            g.bias *= factor


def backward(model, cache, grad_enhanced):
    """Exact gradients of the enhanced output w.r.t. every kernel, bias and the input.

    `cache` must come from a forward() call on this very model and is consumed
    by this call.
    """
    if not isinstance(cache, ForwardCache) or cache.model_id != id(model):
        raise StateError("cache does not belong to this model")
    if cache.consumed:
        raise StateError("cache was already consumed by a previous backward pass")
    cfg = model.config
    n_layers = len(model.layers)
    if len(cache.conv_inputs) != n_layers:
        raise StateError("cache layer count does not match the model")
    if grad_enhanced.shape != cache.input.shape:
        raise DimensionError(
            f"grad shape {grad_enhanced.shape} does not match input {cache.input.shape}"
        )
    cache.consumed = True

    layer_grads = [None] * n_layers
    grad_u = grad_enhanced.copy() if cfg.residual_learning else np.zeros_like(grad_enhanced)

    li = n_layers - 1
    g_t, gk, gb = conv2d_backward(grad_enhanced, cache.conv_inputs[li], model.layers[li])
    layer_grads[li] = ConvGrads(gk, gb)

    for k in reversed(range(cfg.num_blocks)):
        counts = cache.block_part_channels[k]
        splits = concat_backward(g_t, counts)
        if cfg.dense_concat:
            gz = splits[: cfg.convs_per_block]
            grad_u += splits[cfg.convs_per_block]
            g_prev = splits[cfg.convs_per_block + 1] if k > 0 else None
        else:
            gz = [None] * (cfg.convs_per_block - 1) + [splits[0]]
            grad_u += splits[1]
            g_prev = None
        g = gz[-1]
        for i in reversed(range(cfg.convs_per_block)):
            li = k * cfg.convs_per_block + i
            g = relu_backward(g, cache.preacts[li])
            g, gk, gb = conv2d_backward(g, cache.conv_inputs[li], model.layers[li])
            layer_grads[li] = ConvGrads(gk, gb)
            if i > 0 and cfg.dense_concat:
                g = g + gz[i - 1]
        if k == 0:
            grad_u += g
        else:
            g_t = g if g_prev is None else g + g_prev
    return ModelGradients(layers=layer_grads, input=grad_u)


def save(model, path, water_type_tag=""):
    """Persist weights and config; see uwnet.imageio for the byte format."""
    from . import imageio

    imageio.write_checkpoint(model, path, water_type_tag=water_type_tag)


def load(path):
    """Inverse of save(); returns the Model (water-type tag via imageio.read_checkpoint)."""
    from . import imageio

    model, _ = imageio.read_checkpoint(path)
    return model
