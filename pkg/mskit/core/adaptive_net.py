"""Adaptive weight-estimation network.

Five temporal convolutions (kernel 3, zero padding 1) with channel plan
C_in → 32 → 32 → 16 → 16 → K. The first four are followed by batch norm and
ReLU, the last by a sigmoid. Sigmoid outputs are renormalized so every row of
the predicted T×K weight matrix sums to one.

Activations use a (batch, time, channel) layout. Conv weights are stored as
(C_out, C_in, kernel) and tensors are named ``conv{i}.weight``, ``conv{i}.bias``,
``bn{i}.weight``, ``bn{i}.bias``, ``bn{i}.running_mean`` and ``bn{i}.running_var``.

Batch norm statistics in training mode are taken over batch × time.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit

from mskit.core.errors import SmoothingError
from mskit.models.schemas import AdaptiveSmootherParams, SmootherArchitecture, SmoothingWeights

FEATURE_NAMES = ("mean_speed", "mean_accel", "coherent_speed", "coherent_accel")


def trajectory_features(coords: np.ndarray) -> np.ndarray:
    """
    Per-frame motion features of one trajectory.

    Columns: mean point speed, mean point acceleration magnitude, and the speed
    and acceleration magnitude of the mean point (motion shared by all points).
    Differences use zero padding at both ends.

    Args:
        coords: T×N×2 coordinates.

    Returns:
        T×4 feature matrix.
    """
    velocity = np.zeros_like(coords)
    velocity[:-1] = coords[1:] - coords[:-1]
    acceleration = np.empty_like(coords)
    acceleration[0] = velocity[0]
    acceleration[1:] = velocity[1:] - velocity[:-1]

    return np.stack(
        [
            np.linalg.norm(velocity, axis=2).mean(axis=1),
            np.linalg.norm(acceleration, axis=2).mean(axis=1),
            np.linalg.norm(velocity.mean(axis=1), axis=1),
            np.linalg.norm(acceleration.mean(axis=1), axis=1),
        ],
        axis=1,
    )


def batch_features(coords: np.ndarray) -> np.ndarray:
    """B×T×N×2 coordinates -> B×T×4 features."""
    return np.stack([trajectory_features(sequence) for sequence in coords])


# ============================================================================
# PARAMETERS
# ============================================================================


def _layer_count(arch: SmootherArchitecture) -> int:
    return len(arch.layer_channels)


def init_adaptive_params(
    arch: Optional[SmootherArchitecture] = None, seed: int = 0
) -> AdaptiveSmootherParams:
    """
    He-initialized conv weights, zero biases, BN γ=1 and β=0.

    Args:
        arch: Network shape (default architecture when omitted).
        seed: Seed for the weight draw.

    Returns:
        Fresh AdaptiveSmootherParams with running mean 0 and variance 1.
    """
    arch = arch or SmootherArchitecture()
    rng = np.random.default_rng(seed)
    params: dict[str, np.ndarray] = {}
    buffers: dict[str, np.ndarray] = {}

    last = _layer_count(arch)
    for i, (c_in, c_out) in enumerate(arch.layer_channels, start=1):
        fan_in = c_in * arch.kernel_size
        shape = (c_out, c_in, arch.kernel_size)
        params[f"conv{i}.weight"] = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=shape)
        params[f"conv{i}.bias"] = np.zeros(c_out)
        if i < last:
            params[f"bn{i}.weight"] = np.ones(c_out)
            params[f"bn{i}.bias"] = np.zeros(c_out)
            buffers[f"bn{i}.running_mean"] = np.zeros(c_out)
            buffers[f"bn{i}.running_var"] = np.ones(c_out)

    return AdaptiveSmootherParams(architecture=arch, params=params, buffers=buffers, seed=seed)


def check_compatible(model: AdaptiveSmootherParams, arch: SmootherArchitecture) -> None:
    """Raise if tensor shapes do not match the architecture."""
    expected = init_adaptive_params(arch)
    for group, reference in (("params", expected.params), ("buffers", expected.buffers)):
        tensors = getattr(model, group)
        if set(tensors) != set(reference):
            missing = sorted(set(reference) - set(tensors))
            extra = sorted(set(tensors) - set(reference))
            raise SmoothingError(
                f"{group} do not match the architecture (missing {missing}, unexpected {extra})"
            )
        for name, value in reference.items():
            if tensors[name].shape != value.shape:
                raise SmoothingError(f"{name} has shape {tensors[name].shape}, expected {value.shape}")


# ============================================================================
# FORWARD
# ============================================================================


@dataclass
class _ConvCache:
    cols: np.ndarray  # (B*T, C_in*kernel)
    input_shape: tuple[int, int, int]


@dataclass
class _NormCache:
    xhat: np.ndarray
    inv_std: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    relu_mask: np.ndarray


@dataclass
class ForwardCache:
    """Intermediate values kept for the backward pass."""

    training: bool
    convs: list[_ConvCache] = field(default_factory=list)
    norms: list[_NormCache] = field(default_factory=list)
    raw: Optional[np.ndarray] = None  # sigmoid output (B, T, K)
    total: Optional[np.ndarray] = None  # row sums (B, T, 1)
    weights: Optional[np.ndarray] = None  # normalized rows (B, T, K)

    def batch_stats(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(mean, biased variance) of every BN layer."""
        return [(norm.mean, norm.var) for norm in self.norms]

    def relu_patterns(self) -> list[np.ndarray]:
        return [norm.relu_mask for norm in self.norms]


def _im2col(x: np.ndarray, kernel: int) -> np.ndarray:
    batch, frames, channels = x.shape
    pad = kernel // 2
    padded = np.pad(x, ((0, 0), (pad, pad), (0, 0)))
    cols = np.stack([padded[:, j : j + frames, :] for j in range(kernel)], axis=3)
    return cols.reshape(batch * frames, channels * kernel)


def _conv_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> tuple[np.ndarray, _ConvCache]:
    batch, frames, _ = x.shape
    c_out, _, kernel = weight.shape
    cols = _im2col(x, kernel)
    out = cols @ weight.reshape(c_out, -1).T + bias
    return out.reshape(batch, frames, c_out), _ConvCache(cols=cols, input_shape=x.shape)


def forward_batch(
    model: AdaptiveSmootherParams, features: np.ndarray, training: bool = False
) -> tuple[np.ndarray, ForwardCache]:
    """
    Run the network on a batch.

    Args:
        model: Network parameters.
        features: B×T×C_in inputs.
        training: Use batch statistics for BN instead of running statistics.

    Returns:
        (B×T×K normalized weights, cache for ``adaptive_backward``).
    """
    arch = model.architecture
    if features.ndim != 3 or features.shape[2] != arch.c_in:
        raise SmoothingError(
            f"features must have shape B×T×{arch.c_in} (C_in={arch.c_in}), got {features.shape}"
        )
    if features.shape[1] < 1:
        raise SmoothingError("features must have at least one frame")

    cache = ForwardCache(training=training)
    h = np.asarray(features, dtype=np.float64)
    last = _layer_count(arch)

    for i in range(1, last + 1):
        h, conv_cache = _conv_forward(h, model.params[f"conv{i}.weight"], model.params[f"conv{i}.bias"])
        cache.convs.append(conv_cache)
        if i == last:
            break

        if training:
            mean = h.mean(axis=(0, 1))
            var = h.var(axis=(0, 1))
        else:
            mean = model.buffers[f"bn{i}.running_mean"]
            var = model.buffers[f"bn{i}.running_var"]
        inv_std = 1.0 / np.sqrt(var + arch.bn_eps)
        xhat = (h - mean) * inv_std
        pre = model.params[f"bn{i}.weight"] * xhat + model.params[f"bn{i}.bias"]
        relu_mask = pre > 0.0
        h = np.where(relu_mask, pre, 0.0)
        cache.norms.append(_NormCache(xhat=xhat, inv_std=inv_std, mean=mean, var=var, relu_mask=relu_mask))

    raw = expit(h)
    total = raw.sum(axis=2, keepdims=True)
    weights = raw / total
    cache.raw, cache.total, cache.weights = raw, total, weights
    return weights, cache


def adaptive_forward(
    model: AdaptiveSmootherParams, features: np.ndarray, training: bool = False
) -> SmoothingWeights:
    """
    Predict per-frame smoothing weights for one sequence.

    Args:
        model: Network parameters.
        features: T×C_in per-frame features.
        training: Use batch statistics for BN.

    Returns:
        Normalized T×K SmoothingWeights.

    Raises:
        SmoothingError: If the feature shape does not match C_in.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise SmoothingError(f"features must have shape T×C_in, got {features.shape}")
    weights, _ = forward_batch(model, features[None], training=training)
    return SmoothingWeights(weights=weights[0])


# ============================================================================
# BACKWARD
# ============================================================================


def _conv_backward(
    dout: np.ndarray, weight: np.ndarray, cache: _ConvCache
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    batch, frames, c_in = cache.input_shape
    c_out, _, kernel = weight.shape
    dout2d = dout.reshape(batch * frames, c_out)

    dweight = (dout2d.T @ cache.cols).reshape(weight.shape)
    dbias = dout2d.sum(axis=0)

    dcols = (dout2d @ weight.reshape(c_out, -1)).reshape(batch, frames, c_in, kernel)
    pad = kernel // 2
    dpadded = np.zeros((batch, frames + 2 * pad, c_in))
    for j in range(kernel):
        dpadded[:, j : j + frames, :] += dcols[..., j]
    return dpadded[:, pad : pad + frames, :], dweight, dbias


def adaptive_backward(
    model: AdaptiveSmootherParams, cache: Optional[ForwardCache], grad_weights: np.ndarray
) -> dict[str, np.ndarray]:
    """
    Gradients of all learnable tensors.

    Args:
        model: Parameters used for the cached forward pass.
        cache: Cache returned by ``forward_batch``.
        grad_weights: dL/dW for the normalized B×T×K weights.

    Returns:
        Gradient per parameter name.

    Raises:
        SmoothingError: Without a cached forward pass or on a shape mismatch.
    """
    if cache is None or cache.weights is None:
        raise SmoothingError("no cached forward pass: run forward_batch first")
    if grad_weights.shape != cache.weights.shape:
        raise SmoothingError(
            f"upstream gradient has shape {grad_weights.shape}, expected {cache.weights.shape}"
        )

    grads: dict[str, np.ndarray] = {}
    weights, raw, total = cache.weights, cache.raw, cache.total

    # row normalization, then sigmoid
    draw = (grad_weights - (grad_weights * weights).sum(axis=2, keepdims=True)) / total
    dh = draw * raw * (1.0 - raw)

    last = _layer_count(model.architecture)
    for i in range(last, 0, -1):
        if i < last:
            norm = cache.norms[i - 1]
            dpre = np.where(norm.relu_mask, dh, 0.0)
            grads[f"bn{i}.weight"] = (dpre * norm.xhat).sum(axis=(0, 1))
            grads[f"bn{i}.bias"] = dpre.sum(axis=(0, 1))
            dxhat = dpre * model.params[f"bn{i}.weight"]
            if cache.training:
                count = dxhat.shape[0] * dxhat.shape[1]
                dh = (norm.inv_std / count) * (
                    count * dxhat
                    - dxhat.sum(axis=(0, 1))
                    - norm.xhat * (dxhat * norm.xhat).sum(axis=(0, 1))
                )
            else:
                dh = dxhat * norm.inv_std

        dh, grads[f"conv{i}.weight"], grads[f"conv{i}.bias"] = _conv_backward(
            dh, model.params[f"conv{i}.weight"], cache.convs[i - 1]
        )

    return grads


# ============================================================================
# RUNNING STATISTICS
# ============================================================================


def update_running_stats(model: AdaptiveSmootherParams, cache: ForwardCache) -> None:
    """Momentum update of the BN running statistics from a training pass."""
    arch = model.architecture
    momentum = arch.bn_momentum
    for i, norm in enumerate(cache.norms, start=1):
        count = norm.xhat.shape[0] * norm.xhat.shape[1]
        unbiased = norm.var * count / max(count - 1, 1)
        mean_key, var_key = f"bn{i}.running_mean", f"bn{i}.running_var"
        model.buffers[mean_key] = (1.0 - momentum) * model.buffers[mean_key] + momentum * norm.mean
        model.buffers[var_key] = (1.0 - momentum) * model.buffers[var_key] + momentum * unbiased


def calibrate_running_stats(model: AdaptiveSmootherParams, features: np.ndarray) -> None:
    """
    Set the BN running statistics to the batch statistics of ``features``.

    Afterwards eval-mode output on ``features`` equals training-mode output.
    """
    _, cache = forward_batch(model, features, training=True)
    for i, (mean, var) in enumerate(cache.batch_stats(), start=1):
        model.buffers[f"bn{i}.running_mean"] = mean.copy()
        model.buffers[f"bn{i}.running_var"] = var.copy()
