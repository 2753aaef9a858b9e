"""ADAM updates for model parameters.

Hyperparameters are fixed for the whole run: lr 0.0002, beta1 0.9,
beta2 0.999, epsilon 1e-8. Mini-batch gradients should be averaged over the
batch before stepping.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericError


@dataclass
class AdamState:
    m: list
    v: list
    t: int = 0
    lr: float = 0.0002
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def adam_init(model):
    """Zeroed first/second moment buffers mirroring the model's layer structure."""
    m = [(np.zeros_like(p.kernel), np.zeros_like(p.bias)) for p in model.layers]
    v = [(np.zeros_like(p.kernel), np.zeros_like(p.bias)) for p in model.layers]
    return AdamState(m=m, v=v)


def adam_step(state, model, grads):
    """One bias-corrected ADAM update, mutating the model weights and state.

    Refuses (raises, touching nothing) if any gradient entry is non-finite.
    """
    layer_grads = [(g.kernel, g.bias) for g in grads.layers]
    if len(layer_grads) != len(model.layers):
        raise NumericError("gradient structure does not match the model")
    for gk, gb in layer_grads:
        if not (np.all(np.isfinite(gk)) and np.all(np.isfinite(gb))):
            raise NumericError("non-finite gradient; step refused")

    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t
    for params, (mk, mb), (vk, vb), (gk, gb) in zip(model.layers, state.m, state.v, layer_grads):
        for theta, m, v, g in ((params.kernel, mk, vk, gk), (params.bias, mb, vb, gb)):
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * (g * g)
            theta -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.epsilon)
