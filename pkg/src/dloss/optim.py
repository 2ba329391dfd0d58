"""Adam updates, the parameter-norm penalty, and inverted dropout."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import MLPParams, ParamGradient, flatten_params, zeros_like_params

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass
class AdamState:
    first_moment: ParamGradient
    second_moment: ParamGradient
    step_count: int = 0
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS


def init_adam(params: MLPParams) -> AdamState:
    return AdamState(zeros_like_params(params), zeros_like_params(params))


def _check_finite(grad: ParamGradient) -> None:
    for block in ("hidden_weights", "hidden_biases", "output_weights"):
        if not np.all(np.isfinite(getattr(grad, block))):
            raise ValueError(f"non-finite gradient in {block}")
    if not np.isfinite(grad.output_bias):
        raise ValueError("non-finite gradient in output_bias")


def adam_step(
    params: MLPParams, grad: ParamGradient, state: AdamState, learning_rate: float
) -> MLPParams:
    """One bias-corrected Adam update; mutates ``state``, returns new params."""
    if learning_rate <= 0.0:
        raise ValueError("learning_rate must be positive")
    _check_finite(grad)
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t

    def update(p, g, m, v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        return p - learning_rate * (m / c1) / (np.sqrt(v / c2) + state.eps)

    new = MLPParams(
        update(params.hidden_weights, grad.hidden_weights,
               state.first_moment.hidden_weights, state.second_moment.hidden_weights),
        update(params.hidden_biases, grad.hidden_biases,
               state.first_moment.hidden_biases, state.second_moment.hidden_biases),
        update(params.output_weights, grad.output_weights,
               state.first_moment.output_weights, state.second_moment.output_weights),
        0.0,
    )
    m = state.first_moment
    v = state.second_moment
    m.output_bias = b1 * m.output_bias + (1.0 - b1) * grad.output_bias
    v.output_bias = b2 * v.output_bias + (1.0 - b2) * grad.output_bias**2
    new.output_bias = params.output_bias - learning_rate * (m.output_bias / c1) / (
        np.sqrt(v.output_bias / c2) + state.eps
    )
    return new


def l2_term(params: MLPParams, weight: float):
    """Penalty ``weight * ||beta||_2`` over all parameters, with its gradient.

    The norm is not squared. At beta = 0 the (sub)gradient contribution is
    taken as zero.
    """
    if weight < 0.0:
        raise ValueError("weight must be non-negative")
    grad = zeros_like_params(params)
    if weight == 0.0:
        return 0.0, grad
    norm = float(np.linalg.norm(flatten_params(params)))
    if norm == 0.0:
        return 0.0, grad
    scale = weight / norm
    grad.hidden_weights += scale * params.hidden_weights
    grad.hidden_biases += scale * params.hidden_biases
    grad.output_weights += scale * params.output_weights
    grad.output_bias = scale * params.output_bias
    return weight * norm, grad


def l2_term_squared(params: MLPParams, weight: float):
    """Squared-norm variant ``weight * ||beta||_2^2`` (classic weight decay)."""
    if weight < 0.0:
        raise ValueError("weight must be non-negative")
    flat = flatten_params(params)
    grad = zeros_like_params(params)
    grad.hidden_weights += 2.0 * weight * params.hidden_weights
    grad.hidden_biases += 2.0 * weight * params.hidden_biases
    grad.output_weights += 2.0 * weight * params.output_weights
    grad.output_bias = 2.0 * weight * params.output_bias
    return weight * float(flat @ flat), grad


@dataclass
class DropoutMask:
    """Keep flags per hidden neuron plus the inverted-dropout rescale."""

    keep: np.ndarray
    keep_prob: float

    def scale(self) -> np.ndarray:
        return self.keep.astype(np.float64) / self.keep_prob


def sample_dropout_mask(n_hidden: int, p: float, rng: np.random.Generator) -> DropoutMask:
    if not 0.0 <= p < 1.0:
        raise ValueError("dropout probability must be in [0, 1)")
    return DropoutMask(keep=rng.random(n_hidden) >= p, keep_prob=1.0 - p)


def apply_dropout(activations: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Inverted dropout on hidden activations: kept units scale by 1/(1-p).

    Training-path only; evaluation applies no mask. Expected value of the
    output equals the input.
    """
    activations = np.asarray(activations, dtype=np.float64)
    mask = sample_dropout_mask(activations.shape[-1], p, rng)
    return activations * mask.scale()
