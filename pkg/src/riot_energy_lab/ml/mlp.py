"""Multilayer perceptron regressor trained full-batch with L-BFGS.

Two ReLU hidden layers and a linear output, trained by minimizing half the
mean squared error with a limited-memory quasi-Newton loop (two-loop
recursion, memory 10, Armijo backtracking line search).  Targets are
standardized internally so the optimization is scale-free; predictions are
mapped back to the original units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LBFGS_MEMORY = 10
GRAD_TOL = 1e-6
ARMIJO_C1 = 1e-4
BACKTRACK_FACTOR = 0.5
MAX_BACKTRACKS = 30


def init_params(layer_sizes: list[int], seed: int) -> np.ndarray:
    """Flat parameter vector: scaled-uniform fan-in weights, zero biases."""
    rng = np.random.default_rng(seed)
    chunks = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        chunks.append(rng.uniform(-bound, bound, fan_in * fan_out))
        chunks.append(np.zeros(fan_out))
    return np.concatenate(chunks)


def unpack(theta: np.ndarray, layer_sizes: list[int]) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    pos = 0
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        W = theta[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = theta[pos : pos + fan_out]
        pos += fan_out
        out.append((W, b))
    return out


def forward(theta: np.ndarray, layer_sizes: list[int], X: np.ndarray) -> np.ndarray:
    a = X
    layers = unpack(theta, layer_sizes)
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        a = np.maximum(z, 0.0) if i < len(layers) - 1 else z
    return a[:, 0]


def loss_and_grad(
    theta: np.ndarray, layer_sizes: list[int], X: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Half-MSE loss and its analytic gradient w.r.t. the flat parameters."""
    layers = unpack(theta, layer_sizes)
    acts = [X]
    zs = []
    a = X
    for i, (W, b) in enumerate(layers):
        z = a @ W + b
        zs.append(z)
        a = np.maximum(z, 0.0) if i < len(layers) - 1 else z
        acts.append(a)

    n = X.shape[0]
    err = acts[-1][:, 0] - y
    loss = 0.5 * float(np.mean(err**2))

    delta = (err / n)[:, None]
    grads: list[np.ndarray] = []
    for i in range(len(layers) - 1, -1, -1):
        W, _ = layers[i]
        gW = acts[i].T @ delta
        gb = delta.sum(axis=0)
        grads.append(gb)
        grads.append(gW.ravel())
        if i > 0:
            delta = (delta @ W.T) * (zs[i - 1] > 0.0)
    return loss, np.concatenate(grads[::-1])


def _lbfgs_direction(
    grad: np.ndarray, s_list: list[np.ndarray], y_list: list[np.ndarray]
) -> np.ndarray:
    q = -grad.copy()
    alphas = []
    rhos = [1.0 / float(np.dot(yv, sv)) for sv, yv in zip(s_list, y_list)]
    for sv, yv, rho in zip(reversed(s_list), reversed(y_list), reversed(rhos)):
        a = rho * float(np.dot(sv, q))
        alphas.append(a)
        q -= a * yv
    if s_list:
        gamma = float(np.dot(s_list[-1], y_list[-1]) / np.dot(y_list[-1], y_list[-1]))
        q *= gamma
    for (sv, yv, rho), a in zip(zip(s_list, y_list, rhos), reversed(alphas)):
        beta = rho * float(np.dot(yv, q))
        q += (a - beta) * sv
    return q


@dataclass
class MlpParams:
    layer_sizes: list[int]
    theta: np.ndarray
    y_mean: float
    y_std: float
    n_iterations: int = 0
    converged: bool = False

    def predict(self, Xs: np.ndarray) -> np.ndarray:
        return forward(self.theta, self.layer_sizes, Xs) * self.y_std + self.y_mean


def fit_mlp(
    Xs: np.ndarray,
    y: np.ndarray,
    hidden: tuple[int, ...] = (50, 25),
    max_iter: int = 2000,
    seed: int = 0,
) -> MlpParams:
    """Train the MLP on standardized features until the gradient is tiny."""
    y_mean = float(np.mean(y))
    y_std = float(np.std(y)) or 1.0
    yt = (y - y_mean) / y_std

    layer_sizes = [Xs.shape[1], *hidden, 1]
    theta = init_params(layer_sizes, seed)
    loss, grad = loss_and_grad(theta, layer_sizes, Xs, yt)

    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    iterations = 0
    converged = False
    for it in range(max_iter):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < GRAD_TOL:
            converged = True
            break
        d = _lbfgs_direction(grad, s_list, y_list)
        gtd = float(np.dot(grad, d))
        if gtd >= 0:  # not a descent direction; restart from steepest descent
            s_list.clear()
            y_list.clear()
            d = -grad
            gtd = -gnorm**2
        step = min(1.0, 1.0 / float(np.sum(np.abs(grad)))) if it == 0 else 1.0
        new_loss, new_theta = loss, theta
        ok = False
        for _ in range(MAX_BACKTRACKS):
            cand = theta + step * d
            cand_loss, _ = loss_and_grad(cand, layer_sizes, Xs, yt)
            if cand_loss <= loss + ARMIJO_C1 * step * gtd:
                new_loss, new_theta = cand_loss, cand
                ok = True
                break
            step *= BACKTRACK_FACTOR
        if not ok:
            break
        _, new_grad = loss_and_grad(new_theta, layer_sizes, Xs, yt)
        s = new_theta - theta
        yv = new_grad - grad
        if float(np.dot(s, yv)) > 1e-10:
            s_list.append(s)
            y_list.append(yv)
            if len(s_list) > LBFGS_MEMORY:
                s_list.pop(0)
                y_list.pop(0)
        theta, loss, grad = new_theta, new_loss, new_grad
        iterations = it + 1

    return MlpParams(layer_sizes, theta, y_mean, y_std, iterations, converged)
