"""Single-hidden-layer ReLU network: forward pass, analytic parameter
gradients, and central-difference directional derivatives.

The network computes f(x) = sum_h w_out[h] * relu(W[h] . x + b[h]) + b_out.
All arithmetic is double precision; the ReLU derivative at exactly zero is
taken as zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MLPParams:
    hidden_weights: np.ndarray  # (L_H, k)
    hidden_biases: np.ndarray   # (L_H,)
    output_weights: np.ndarray  # (L_H,)
    output_bias: float

    @property
    def n_hidden(self) -> int:
        return self.hidden_weights.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.hidden_weights.shape[1]

    def copy(self) -> "MLPParams":
        return MLPParams(
            self.hidden_weights.copy(),
            self.hidden_biases.copy(),
            self.output_weights.copy(),
            float(self.output_bias),
        )


# a gradient has the same shape as the parameters it differentiates
ParamGradient = MLPParams


def zeros_like_params(params: MLPParams) -> ParamGradient:
    return MLPParams(
        np.zeros_like(params.hidden_weights),
        np.zeros_like(params.hidden_biases),
        np.zeros_like(params.output_weights),
        0.0,
    )


def init(k: int, n_hidden: int, seed: int) -> MLPParams:
    """He-style uniform initialization: weights in +-sqrt(6/fan_in), biases 0."""
    if k < 1 or n_hidden < 1:
        raise ValueError("k and n_hidden must be positive")
    rng = np.random.default_rng(seed)
    hidden_bound = np.sqrt(6.0 / k)
    output_bound = np.sqrt(6.0 / n_hidden)
    return MLPParams(
        hidden_weights=rng.uniform(-hidden_bound, hidden_bound, size=(n_hidden, k)),
        hidden_biases=np.zeros(n_hidden),
        output_weights=rng.uniform(-output_bound, output_bound, size=n_hidden),
        output_bias=0.0,
    )


def forward_batch(params: MLPParams, X: np.ndarray) -> np.ndarray:
    """Evaluate the network on every row of X; returns a length-n vector."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    z = X @ params.hidden_weights.T + params.hidden_biases
    return np.maximum(z, 0.0) @ params.output_weights + params.output_bias


def forward(params: MLPParams, x: np.ndarray) -> float:
    return float(forward_batch(params, np.asarray(x, dtype=np.float64)[None, :])[0])


def directional_derivative_fdm(
    params: MLPParams, x: np.ndarray, unit_direction: np.ndarray, eps: float = 0.001
) -> float:
    """Central finite difference of f along a unit direction.

    Uses exactly two forward evaluations, (f(x + eps*v) - f(x - eps*v)) / (2 eps).
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    unit_direction = np.asarray(unit_direction, dtype=np.float64)
    norm = np.linalg.norm(unit_direction)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"direction norm {norm} is not 1 within 1e-8")
    x = np.asarray(x, dtype=np.float64)
    probes = np.vstack([x + eps * unit_direction, x - eps * unit_direction])
    f_plus, f_minus = forward_batch(params, probes)
    return float((f_plus - f_minus) / (2.0 * eps))


def directional_derivative_analytic(
    params: MLPParams, x: np.ndarray, unit_direction: np.ndarray
) -> float:
    """Exact directional derivative on the linear piece containing x."""
    z = params.hidden_weights @ np.asarray(x, dtype=np.float64) + params.hidden_biases
    active = (z > 0.0).astype(np.float64)
    slopes = params.hidden_weights @ np.asarray(unit_direction, dtype=np.float64)
    return float(np.sum(params.output_weights * active * slopes))


def _backprop(params: MLPParams, X: np.ndarray, out_grad: np.ndarray,
              keep_scale: np.ndarray | None = None) -> ParamGradient:
    """Accumulate parameter gradients for rows X weighted by d(loss)/d(f(x)).

    ``keep_scale`` optionally rescales each hidden activation (inverted
    dropout); gradients then flow through the same scaling.
    """
    z = X @ params.hidden_weights.T + params.hidden_biases
    act = np.maximum(z, 0.0)
    relu_gate = (z > 0.0).astype(np.float64)
    if keep_scale is not None:
        act = act * keep_scale
        relu_gate = relu_gate * keep_scale
    grad_v = act.T @ out_grad
    hidden = (out_grad[:, None] * params.output_weights) * relu_gate
    return MLPParams(
        hidden_weights=hidden.T @ X,
        hidden_biases=hidden.sum(axis=0),
        output_weights=grad_v,
        output_bias=float(out_grad.sum()),
    )


def grad_mse(params: MLPParams, X: np.ndarray, y: np.ndarray,
             keep_scale: np.ndarray | None = None):
    """Mean squared error and its analytic gradient over a batch.

    With ``keep_scale`` set, both the loss and its gradient see the rescaled
    (dropout-masked) hidden activations.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    if n < 1:
        raise ValueError("need at least one row")
    z = X @ params.hidden_weights.T + params.hidden_biases
    act = np.maximum(z, 0.0)
    if keep_scale is not None:
        act = act * keep_scale
    pred = act @ params.output_weights + params.output_bias
    residual = pred - y
    mse = float(residual @ residual) / n
    out_grad = (2.0 / n) * residual
    return mse, _backprop(params, X, out_grad, keep_scale)


def grad_dloss(params: MLPParams, tuple_set, eps: float = 0.001):
    """Mean squared derivative difference over a tuple set, with gradient.

    For each tuple the model slope at the midpoint is estimated by a central
    difference along the tuple's unit direction (two forward passes), the
    cached data slope is subtracted, and the squared differences are averaged.
    The gradient is assembled analytically through the two probe points of
    every tuple (two backward passes).
    """
    if len(tuple_set) == 0:
        raise ValueError("empty tuple set")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    units = tuple_set.unit_directions()
    plus = tuple_set.midpoints + eps * units
    minus = tuple_set.midpoints - eps * units
    f_plus = forward_batch(params, plus)
    f_minus = forward_batch(params, minus)
    dd = (f_plus - f_minus) / (2.0 * eps) - tuple_set.data_derivatives
    count = len(tuple_set)
    dloss = float(dd @ dd) / count
    coeff = (2.0 / count) * dd / (2.0 * eps)
    grad_plus = _backprop(params, plus, coeff)
    grad_minus = _backprop(params, minus, -coeff)
    return dloss, add_gradients(grad_plus, grad_minus)


def add_gradients(a: ParamGradient, b: ParamGradient, scale_b: float = 1.0) -> ParamGradient:
    return MLPParams(
        a.hidden_weights + scale_b * b.hidden_weights,
        a.hidden_biases + scale_b * b.hidden_biases,
        a.output_weights + scale_b * b.output_weights,
        a.output_bias + scale_b * b.output_bias,
    )


def flatten_params(params: MLPParams) -> np.ndarray:
    return np.concatenate(
        [
            params.hidden_weights.ravel(),
            params.hidden_biases,
            params.output_weights,
            [params.output_bias],
        ]
    )


def unflatten_params(flat: np.ndarray, k: int, n_hidden: int) -> MLPParams:
    flat = np.asarray(flat, dtype=np.float64)
    expected = n_hidden * k + 2 * n_hidden + 1
    if flat.shape != (expected,):
        raise ValueError(f"expected {expected} values, got {flat.shape}")
    w_end = n_hidden * k
    return MLPParams(
        hidden_weights=flat[:w_end].reshape(n_hidden, k).copy(),
        hidden_biases=flat[w_end : w_end + n_hidden].copy(),
        output_weights=flat[w_end + n_hidden : w_end + 2 * n_hidden].copy(),
        output_bias=float(flat[-1]),
    )


def save_params(params: MLPParams, path: str) -> None:
    """Store parameters as a binary blob; shapes travel with the arrays."""
    np.savez(
        path,
        hidden_weights=params.hidden_weights,
        hidden_biases=params.hidden_biases,
        output_weights=params.output_weights,
        output_bias=np.float64(params.output_bias),
    )


def load_params(path: str) -> MLPParams:
    with np.load(path) as blob:
        return MLPParams(
            hidden_weights=blob["hidden_weights"],
            hidden_biases=blob["hidden_biases"],
            output_weights=blob["output_weights"],
            output_bias=float(blob["output_bias"]),
        )
