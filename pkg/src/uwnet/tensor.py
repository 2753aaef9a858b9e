"""Dense (height, width, channels) tensors and differentiable primitive ops.

A "tensor" throughout this package is a C-contiguous float64 numpy array of
shape (H, W, C), H, W, C >= 1. Images use C=3 (RGB) or C=1 (gray/depth);
feature maps use arbitrary C. All primitives come in forward/backward pairs
with exact analytic gradients; backward passes take the cotangent of the
output plus whatever the forward pass needed cached.

Convolution convention: 3x3 cross-correlation (no kernel flip), zero padding
of 1 pixel on every border, stride 1, so spatial size is always preserved.
Kernels are stored as (kH, kW, inChannels, outChannels).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError, NumericError

KERNEL_SIZE = 3
_PAD = KERNEL_SIZE // 2


@dataclass
class ConvParams:
    """Weights of one 3x3 convolution layer.

    kernel: (3, 3, inChannels, outChannels) float64
    bias:   (outChannels,) float64
    """

    kernel: np.ndarray
    bias: np.ndarray

    def __post_init__(self):
        self.kernel = np.ascontiguousarray(self.kernel, dtype=np.float64)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64)
        if self.kernel.ndim != 4 or self.kernel.shape[:2] != (KERNEL_SIZE, KERNEL_SIZE):
            raise DimensionError(
                f"kernel must be ({KERNEL_SIZE}, {KERNEL_SIZE}, in, out), got {self.kernel.shape}"
            )
        if self.bias.shape != (self.kernel.shape[3],):
            raise DimensionError(
                f"bias length {self.bias.shape} does not match {self.kernel.shape[3]} output channels"
            )

    @property
    def in_channels(self):
        return self.kernel.shape[2]

    @property
    def out_channels(self):
        return self.kernel.shape[3]


def _pad_spatial(x, pad):
    h, w, c = x.shape
    out = np.zeros((h + 2 * pad, w + 2 * pad, c))
    out[pad : pad + h, pad : pad + w, :] = x
    return out


def _shift_canvas(grad_out, hp, wp):
    """(hp*wp, 9*cout) matrix whose (i, j) block holds grad_out shifted by (i, j).

    Entry [(u, v), (i, j, o)] is grad_out[u-i, v-j, o] (zero outside), which
    turns both parameter and input gradients of the 3x3 convolution into a
    single matmul each.
    """
    h, w, cout = grad_out.shape
    canvas = np.zeros((hp, wp, KERNEL_SIZE, KERNEL_SIZE, cout))
    for i in range(KERNEL_SIZE):
        for j in range(KERNEL_SIZE):
            canvas[i : i + h, j : j + w, i, j, :] = grad_out
    return canvas.reshape(hp * wp, KERNEL_SIZE * KERNEL_SIZE * cout)


def conv2d_forward(x, params):
    """Same-size 3x3 convolution: out[y,x,o] = bias[o] + sum kernel * padded window.

    The input is zero padded by one pixel on each border so the output has
    the input's height and width for any input size >= 1x1. The nine kernel
    offsets are evaluated as one matmul over the padded extent followed by
    nine shifted accumulations, which avoids gathering input windows.
    """
    if x.ndim != 3:
        raise DimensionError(f"conv input must be 3-D, got ndim={x.ndim}")
    if x.shape[2] != params.in_channels:
        raise DimensionError(
            f"conv input has {x.shape[2]} channels, kernel expects {params.in_channels}"
        )
    h, w, cin = x.shape
    cout = params.out_channels
    padded = _pad_spatial(x, _PAD)
    hp, wp = h + 2 * _PAD, w + 2 * _PAD
    # products[(u, v), (i, j, o)] = sum_c padded[u, v, c] kernel[i, j, c, o]
    kmat = params.kernel.transpose(2, 0, 1, 3).reshape(cin, -1)
    products = (padded.reshape(hp * wp, cin) @ kmat).reshape(
        hp, wp, KERNEL_SIZE, KERNEL_SIZE, cout
    )
    out = np.empty((h, w, cout))
    out[:] = params.bias
    for i in range(KERNEL_SIZE):
        for j in range(KERNEL_SIZE):
            out += products[i : i + h, j : j + w, i, j, :]
    return out


def conv2d_backward(grad_out, cached_input, params):
    """Gradients of conv2d_forward.

    Returns (gradInput, gradKernel, gradBias) for the cotangent `grad_out`,
    where `cached_input` is the tensor the forward pass consumed.
    """
    if cached_input.shape[2] != params.in_channels:
        raise DimensionError("cached input does not match kernel input channels")
    h, w, cin = cached_input.shape
    cout = params.out_channels
    if grad_out.shape != (h, w, cout):
        raise DimensionError(
            f"grad_out shape {grad_out.shape} does not match conv output {(h, w, cout)}"
        )
    padded = _pad_spatial(cached_input, _PAD)
    hp, wp = h + 2 * _PAD, w + 2 * _PAD
    canvas = _shift_canvas(grad_out, hp, wp)

    grad_bias = grad_out.sum(axis=(0, 1))
    # kernel: correlate padded input with every shifted cotangent at once
    gk = padded.reshape(hp * wp, cin).T @ canvas
    grad_kernel = np.ascontiguousarray(
        gk.reshape(cin, KERNEL_SIZE, KERNEL_SIZE, cout).transpose(1, 2, 0, 3)
    )
    # input: the interior canvas rows already hold grad_out[y+1-i, x+1-j, o]
    interior = canvas.reshape(hp, wp, -1)[_PAD : _PAD + h, _PAD : _PAD + w, :]
    kmat = params.kernel.transpose(0, 1, 3, 2).reshape(-1, cin)
    grad_input = (interior.reshape(h * w, -1) @ kmat).reshape(h, w, cin)
    return grad_input, grad_kernel, grad_bias


def relu_forward(x):
    """Elementwise max(0, x)."""
    return np.maximum(x, 0.0)


def relu_backward(grad_out, cached_input):
    """Pass the cotangent through where the cached input was > 0 (0 at the kink)."""
    if grad_out.shape != cached_input.shape:
        raise DimensionError(
            f"grad shape {grad_out.shape} does not match input shape {cached_input.shape}"
        )
    return np.where(cached_input > 0.0, grad_out, 0.0)


def concat_channels(parts):
    """Stack tensors along the channel axis, in list order."""
    parts = list(parts)
    if not parts:
        raise DimensionError("cannot concatenate an empty list of tensors")
    hw = parts[0].shape[:2]
    for p in parts[1:]:
        if p.shape[:2] != hw:
            raise DimensionError(
                f"spatial mismatch in concat: {p.shape[:2]} vs {hw}"
            )
    if len(parts) == 1:
        return parts[0]
    return np.concatenate(parts, axis=2)


def concat_backward(grad_out, part_channel_counts):
    """Split the concat cotangent back into per-part slices."""
    counts = list(part_channel_counts)
    if sum(counts) != grad_out.shape[2]:
        raise DimensionError(
            f"channel counts {counts} sum to {sum(counts)}, grad has {grad_out.shape[2]}"
        )
    grads = []
    offset = 0
    for c in counts:
        grads.append(np.ascontiguousarray(grad_out[:, :, offset : offset + c]))
        offset += c
    return grads


def add(a, b):
    """Elementwise sum; both addends receive the output cotangent unchanged."""
    if a.shape != b.shape:
        raise DimensionError(f"add shape mismatch: {a.shape} vs {b.shape}")
    return a + b


def finite_difference_check(fn, point, eps=1e-6):
    """Max relative error between fn's analytic gradient and central differences.

    `fn(tensor) -> (scalar value, gradient tensor)`. Every component of
    `point` is perturbed by +/- eps; the relative error of component k is
    |analytic_k - numeric_k| / max(|analytic_k|, |numeric_k|, 1e-12).
    """
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    point = np.ascontiguousarray(point, dtype=np.float64)
    _, grad = fn(point)
    if not np.all(np.isfinite(grad)):
        raise NumericError("analytic gradient is not finite")
    analytic = np.asarray(grad, dtype=np.float64).reshape(-1)
    worst = 0.0
    flat = point.reshape(-1)  # view: perturbations hit `point` in place
    for k in range(flat.size):
        orig = flat[k]
        flat[k] = orig + eps
        up, _ = fn(point)
        flat[k] = orig - eps
        down, _ = fn(point)
        flat[k] = orig
        if not (np.isfinite(up) and np.isfinite(down)):
            raise NumericError(f"non-finite evaluation while perturbing component {k}")
        numeric = (up - down) / (2.0 * eps)
        err = abs(analytic[k] - numeric) / max(abs(analytic[k]), abs(numeric), 1e-12)
        worst = max(worst, err)
    return worst
