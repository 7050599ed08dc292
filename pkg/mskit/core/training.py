"""Training and evaluation of the learnable smoothers.

Both regimes minimize the mean squared error between the smoothed jittered
sequences and their clean originals with plain full-batch gradient descent.
"""

from collections.abc import Callable, Sequence
from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict

from mskit.core.adaptive_net import (
    adaptive_backward,
    batch_features,
    calibrate_running_stats,
    forward_batch,
    init_adaptive_params,
    update_running_stats,
)
from mskit.core.errors import SmoothingError, TrainingDivergedError
from mskit.core.model_file import SmootherModel
from mskit.core.smoothing import (
    fit_gaussian_width,
    gaussian_row,
    global_row,
    init_global_params,
    neighbor_stack,
)
from mskit.core.synthetic import gen_synthetic, pairs_to_arrays
from mskit.models.schemas import (
    AdaptiveSmootherParams,
    GlobalSmootherParams,
    SmootherArchitecture,
    SyntheticDatasetSpec,
    SyntheticPair,
)
from mskit.utils import logger

Regime = Literal["global", "adaptive"]

DEFAULT_LR: dict[str, float] = {"global": 0.5, "adaptive": 0.1}
DEFAULT_EPOCHS: dict[str, int] = {"global": 200, "adaptive": 500}
GAUSSIAN_GRID = (0.5, 1.0, 2.0, 4.0)

EpochCallback = Callable[[int, float], None]


class TrainingResult(BaseModel):
    """Trained model and its loss curve (one value per epoch plus the final loss)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    regime: Regime
    model: Union[AdaptiveSmootherParams, GlobalSmootherParams]
    losses: list[float]


# ============================================================================
# LOSS
# ============================================================================


def _deltas(jittered: np.ndarray, k: int) -> np.ndarray:
    # neighbour minus centre frame, B×T×K×N×2
    return neighbor_stack(jittered, k) - jittered[:, :, None]


def _mse(
    weights: np.ndarray, clean: np.ndarray, jittered: np.ndarray, deltas: np.ndarray
) -> tuple[float, np.ndarray]:
    """Loss and dL/dW for normalized B×T×K weights."""
    residual = jittered + np.einsum("btk,btknd->btnd", weights, deltas) - clean
    loss = float(np.mean(residual**2))
    grad_smoothed = 2.0 * residual / residual.size
    return loss, np.einsum("btnd,btknd->btk", grad_smoothed, deltas)


def adaptive_loss_and_grads(
    model: AdaptiveSmootherParams,
    features: np.ndarray,
    clean: np.ndarray,
    jittered: np.ndarray,
    training: bool = True,
) -> tuple[float, dict[str, np.ndarray]]:
    """
    Smoothing MSE of the adaptive network and its parameter gradients.

    Args:
        model: Network parameters.
        features: B×T×C_in network inputs.
        clean: B×T×N×2 targets.
        jittered: B×T×N×2 inputs to smooth.
        training: BN mode of the forward pass.

    Returns:
        (loss, gradient per parameter name).
    """
    weights, cache = forward_batch(model, features, training=training)
    loss, grad_weights = _mse(weights, clean, jittered, _deltas(jittered, model.architecture.k))
    return loss, adaptive_backward(model, cache, grad_weights)


def adaptive_loss(
    model: AdaptiveSmootherParams,
    features: np.ndarray,
    clean: np.ndarray,
    jittered: np.ndarray,
    training: bool = True,
) -> float:
    """Smoothing MSE of the adaptive network without gradients."""
    weights, _ = forward_batch(model, features, training=training)
    loss, _ = _mse(weights, clean, jittered, _deltas(jittered, model.architecture.k))
    return loss


# ============================================================================
# TRAINING
# ============================================================================


def _check_finite(loss: float, epoch: int, losses: list[float]) -> None:
    if not np.isfinite(loss):
        raise TrainingDivergedError("training diverged (non-finite loss)", epoch=epoch, losses=losses)


def _train_global(
    clean: np.ndarray,
    jittered: np.ndarray,
    k: int,
    lr: float,
    epochs: int,
    seed: int,
    on_epoch: Optional[EpochCallback],
) -> TrainingResult:
    model = init_global_params(k, seed=seed)
    logits = np.array(model.logits)
    deltas = _deltas(jittered, k)
    batch, frames = jittered.shape[:2]
    losses: list[float] = []

    for epoch in range(epochs + 1):
        row = global_row(GlobalSmootherParams(k=k, logits=logits, seed=seed))
        loss, grad_weights = _mse(np.broadcast_to(row, (batch, frames, k)), clean, jittered, deltas)
        losses.append(loss)
        _check_finite(loss, epoch, losses)
        if epoch == epochs:
            break

        grad_row = grad_weights.sum(axis=(0, 1))
        logits = logits - lr * row * (grad_row - np.dot(grad_row, row))
        if on_epoch:
            on_epoch(epoch, loss)

    model = GlobalSmootherParams(k=k, logits=logits, seed=seed)
    return TrainingResult(regime="global", model=model, losses=losses)


def _train_adaptive(
    clean: np.ndarray,
    jittered: np.ndarray,
    arch: SmootherArchitecture,
    lr: float,
    epochs: int,
    seed: int,
    on_epoch: Optional[EpochCallback],
) -> TrainingResult:
    model = init_adaptive_params(arch, seed=seed)
    logger.debug(f"adaptive smoother: {model.parameter_count} learnable parameters")
    features = batch_features(jittered)
    deltas = _deltas(jittered, arch.k)
    losses: list[float] = []

    for epoch in range(epochs + 1):
        weights, cache = forward_batch(model, features, training=True)
        loss, grad_weights = _mse(weights, clean, jittered, deltas)
        losses.append(loss)
        _check_finite(loss, epoch, losses)
        if epoch == epochs:
            break

        grads = adaptive_backward(model, cache, grad_weights)
        for name, grad in grads.items():
            if not np.all(np.isfinite(grad)):
                raise TrainingDivergedError(f"non-finite gradient for {name}", epoch=epoch, losses=losses)
            model.params[name] = model.params[name] - lr * grad
        update_running_stats(model, cache)
        if on_epoch:
            on_epoch(epoch, loss)

    if epochs > 0:
        calibrate_running_stats(model, features)
    return TrainingResult(regime="adaptive", model=model, losses=losses)


def train_smoother(
    regime: Regime,
    dataset: Union[SyntheticDatasetSpec, Sequence[SyntheticPair]],
    lr: Optional[float] = None,
    epochs: Optional[int] = None,
    seed: int = 0,
    k: int = 5,
    threads: int = 1,
    on_epoch: Optional[EpochCallback] = None,
) -> TrainingResult:
    """
    Train a global or adaptive smoother on synthetic pairs.

    Args:
        regime: "global" (one shared kernel) or "adaptive" (the network).
        dataset: Dataset recipe, or already generated pairs.
        lr: Learning rate (>= 0; default per regime).
        epochs: Gradient steps (>= 0; default per regime).
        seed: Initialization seed.
        k: Smoothing width (odd).
        threads: Worker threads for dataset generation.
        on_epoch: Called with (epoch, loss) after every step.

    Returns:
        TrainingResult; ``losses`` has ``epochs + 1`` entries, the last one
        measured after the final step.

    Raises:
        TrainingDivergedError: If the loss or a gradient becomes non-finite.
        SmoothingError: For invalid hyper-parameters.
    """
    if regime not in ("global", "adaptive"):
        raise SmoothingError(f"unknown regime '{regime}' (expected global or adaptive)")
    lr = DEFAULT_LR[regime] if lr is None else lr
    epochs = DEFAULT_EPOCHS[regime] if epochs is None else epochs
    if not lr >= 0.0:
        raise SmoothingError(f"learning rate must be >= 0, got {lr}")
    if epochs < 0:
        raise SmoothingError(f"epochs must be >= 0, got {epochs}")
    if k < 1 or k % 2 == 0:
        raise SmoothingError(f"K must be odd (got {k})")

    if isinstance(dataset, SyntheticDatasetSpec):
        pairs = gen_synthetic(dataset, threads=threads)
    else:
        pairs = list(dataset)
    clean, jittered = pairs_to_arrays(pairs)
    logger.debug(f"training {regime} smoother on {clean.shape[0]} sequences (lr={lr}, epochs={epochs})")

    if regime == "global":
        return _train_global(clean, jittered, k, lr, epochs, seed, on_epoch)
    return _train_adaptive(clean, jittered, SmootherArchitecture(k=k), lr, epochs, seed, on_epoch)


# ============================================================================
# EVALUATION
# ============================================================================


def predict_weights(model: Union[SmootherModel, np.ndarray], jittered: np.ndarray) -> np.ndarray:
    """
    B×T×K weights of a smoother for a batch of jittered sequences.

    Args:
        model: Adaptive or global parameters, or a fixed length-K kernel row.
        jittered: B×T×N×2 coordinates.
    """
    batch, frames = jittered.shape[:2]
    if isinstance(model, AdaptiveSmootherParams):
        weights, _ = forward_batch(model, batch_features(jittered), training=False)
        return weights
    row = global_row(model) if isinstance(model, GlobalSmootherParams) else np.asarray(model, dtype=np.float64)
    return np.broadcast_to(row, (batch, frames, row.size))


def evaluate_smoother(model: Union[SmootherModel, np.ndarray], pairs: Sequence[SyntheticPair]) -> float:
    """Clean-signal MSE of a smoother over held-out pairs."""
    clean, jittered = pairs_to_arrays(list(pairs))
    weights = predict_weights(model, jittered)
    loss, _ = _mse(weights, clean, jittered, _deltas(jittered, weights.shape[2]))
    return loss


def best_fixed_gaussian(
    pairs: Sequence[SyntheticPair], k: int = 5, grid: Sequence[float] = GAUSSIAN_GRID
) -> tuple[float, float]:
    """
    Best gaussian kernel width on a grid.

    Returns:
        (σ_w, MSE) of the grid entry with the lowest clean-signal MSE.
    """
    scores = [(evaluate_smoother(gaussian_row(k, sigma), pairs), sigma) for sigma in grid]
    mse, sigma = min(scores)
    return sigma, mse


def effective_widths(model: AdaptiveSmootherParams, pairs: Sequence[SyntheticPair]) -> dict[str, float]:
    """Fitted gaussian width of the mean predicted row, per signal family."""
    widths = {}
    for family in sorted({pair.family for pair in pairs}):
        _, jittered = pairs_to_arrays(list(pairs), families={family})
        mean_row = predict_weights(model, jittered).mean(axis=(0, 1))
        widths[family] = fit_gaussian_width(mean_row)
    return widths
