"""Hand-written tanh MLP with analytic backprop and an Adam optimizer.

The network maps a per-frame input row (noisy features, condition embedding,
timestep embedding concatenated) to a predicted clean feature row. Everything
is plain numpy so the gradient can be checked against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ValidationError

Params = list[tuple[np.ndarray, np.ndarray]]  # [(W, b), ...]


def init_params(layer_dims: list[int], rng: np.random.Generator) -> Params:
    """Xavier-scaled random weights, zero biases."""
    if len(layer_dims) < 2:
        raise ValidationError("need at least input and output dims")
    params: Params = []
    for fan_in, fan_out in zip(layer_dims, layer_dims[1:]):
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        W = rng.standard_normal((fan_in, fan_out)) * scale
        b = np.zeros(fan_out)
        params.append((W, b))
    return params


def forward(params: Params, x: np.ndarray) -> np.ndarray:
    """tanh hidden layers, linear output. x is (batch, in_dim)."""
    h = x
    for W, b in params[:-1]:
        h = np.tanh(h @ W + b)
    W, b = params[-1]
    return h @ W + b


def loss_and_grads(
    params: Params, x: np.ndarray, target: np.ndarray
) -> tuple[float, Params]:
    """Mean squared error over all elements, with analytic parameter gradients."""
    activations = [x]
    h = x
    for W, b in params[:-1]:
        h = np.tanh(h @ W + b)
        activations.append(h)
    W_out, b_out = params[-1]
    out = h @ W_out + b_out

    diff = out - target
    loss = float(np.mean(diff * diff))
    # d loss / d out for the element-mean MSE
    dout = 2.0 * diff / diff.size

    grads: Params = [None] * len(params)  # type: ignore[list-item]
    grads[-1] = (activations[-1].T @ dout, dout.sum(axis=0))
    dh = dout @ W_out.T
    for i in range(len(params) - 2, -1, -1):
        a = activations[i + 1]  # tanh output of layer i
        dz = dh * (1.0 - a * a)
        grads[i] = (activations[i].T @ dz, dz.sum(axis=0))
        if i > 0:
            dh = dz @ params[i][0].T
    return loss, grads


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter tensor."""

    m: list[tuple[np.ndarray, np.ndarray]]
    v: list[tuple[np.ndarray, np.ndarray]]
    step: int = 0

    @classmethod
    def for_params(cls, params: Params) -> "AdamState":
        zeros = lambda p: [(np.zeros_like(W), np.zeros_like(b)) for W, b in p]
        return cls(m=zeros(params), v=zeros(params))


def adam_step(
    params: Params,
    grads: Params,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> Params:
    state.step += 1
    t = state.step
    new_params: Params = []
    for i, ((W, b), (gW, gb)) in enumerate(zip(params, grads)):
        mW, mb = state.m[i]
        vW, vb = state.v[i]
        mW = beta1 * mW + (1 - beta1) * gW
        mb = beta1 * mb + (1 - beta1) * gb
        vW = beta2 * vW + (1 - beta2) * gW * gW
        vb = beta2 * vb + (1 - beta2) * gb * gb
        state.m[i] = (mW, mb)
        state.v[i] = (vW, vb)
        corr1 = 1 - beta1**t
        corr2 = 1 - beta2**t
        W = W - lr * (mW / corr1) / (np.sqrt(vW / corr2) + eps)
        b = b - lr * (mb / corr1) / (np.sqrt(vb / corr2) + eps)
        new_params.append((W, b))
    return new_params
