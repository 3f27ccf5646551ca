"""Alternating adversarial training at desk scale.

One training step updates the discriminator on the four-term mismatch loss
(real/fake samples under true/false conditions), then the generator on the
adversarial loss plus the weighted feature loss. Updates use Adam with the
small-beta1 moment configuration; an optional exponential moving average of
the generator weights smooths the sampling-time parameters.

Everything is deterministic for a fixed seed: one PCG64 stream drives
initialization, batching, noise, and false-condition draws in a fixed order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .losses import FeatureExtractor, disc_loss_and_grad, gen_loss_and_grad
from .net import NetSpec, ParamBundle, gen_forward, init_params, param_count

__all__ = [
    "Adam",
    "DataSource",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "load_checkpoint",
    "sample_false_conditions",
    "save_checkpoint",
    "train",
]


class TrainingDiverged(RuntimeError):
    """Raised when any loss goes non-finite during training."""


@dataclass(frozen=True)
class TrainConfig:
    epochs: int
    batch_size: int = 64
    batches_per_epoch: int = 16
    lr_g: float = 0.0025
    lr_d: float = 0.002
    beta1: float = 0.0
    beta2: float = 0.99
    seed: int = 0
    feature_weight: float = 1.0
    mismatch: bool = True
    eq4_generator: bool = False
    ema_decay: float | None = None  # e.g. 0.999; None disables the average

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 2:
            raise ValueError("batch size must be >= 2")
        if not (self.lr_g > 0 and self.lr_d > 0):
            raise ValueError("learning rates must be positive")
        for b in (self.beta1, self.beta2):
            if not 0 <= b < 1:
                raise ValueError("betas must lie in [0, 1)")
        if self.ema_decay is not None and not 0 < self.ema_decay < 1:
            raise ValueError("ema_decay must lie in (0, 1)")


class DataSource(Protocol):
    """Yields (sample, condition) batches and exposes the condition domain."""

    sample_dim: int
    cond_dim: int
    conditions: np.ndarray  # (K, cond_dim) distinct condition vectors

    def batch(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        ...


class Adam:
    """Adam on a flat parameter vector (decoupled weight decay omitted: the
    reference configuration uses decay 0, which reduces to plain Adam)."""

    def __init__(self, lr: float, beta1: float, beta2: float, eps: float = 1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> None:
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        params -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def sample_false_conditions(
    true_c: np.ndarray, conditions: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Uniform draws from the condition set, resampled per row until each
    false condition differs from the corresponding true one."""
    conditions = np.atleast_2d(np.asarray(conditions, dtype=np.float64))
    true_c = np.atleast_2d(np.asarray(true_c, dtype=np.float64))
    if true_c.shape[0] == 0:
        raise ValueError("true condition batch must be nonempty")
    distinct = np.unique(conditions, axis=0)
    if distinct.shape[0] < 2:
        raise ValueError("condition domain must contain at least 2 distinct points")
    out = np.empty_like(true_c)
    for i in range(true_c.shape[0]):
        while True:
            cand = conditions[rng.integers(0, conditions.shape[0])]
            if not np.array_equal(cand, true_c[i]):
                out[i] = cand
                break
    return out


@dataclass
class TrainResult:
    generator: ParamBundle
    discriminator: ParamBundle
    history: list[dict[str, float]]
    generator_ema: ParamBundle | None = None
    config: TrainConfig | None = None

    def sampling_params(self) -> ParamBundle:
        """EMA weights when tracked, else the raw generator weights."""
        return self.generator_ema if self.generator_ema is not None else self.generator


def train(
    config: TrainConfig,
    source: DataSource,
    g_spec: NetSpec,
    d_spec: NetSpec,
    z_dim: int,
    extractor: FeatureExtractor | None = None,
) -> TrainResult:
    """Run the alternating update loop and return trained parameters plus a
    per-epoch loss history (mean discriminator, generator, and feature loss
    over the epoch's batches)."""
    if g_spec.n_in != z_dim + source.cond_dim:
        raise ValueError("generator input must be z_dim + cond_dim wide")
    if d_spec.n_in != source.sample_dim + source.cond_dim:
        raise ValueError("discriminator input must be sample_dim + cond_dim wide")
    if d_spec.n_out != 1:
        raise ValueError("discriminator must emit a single probability")

    rng = np.random.default_rng(config.seed)
    g_params = init_params(g_spec, rng)
    d_params = init_params(d_spec, rng)
    ema = g_params.copy() if config.ema_decay is not None else None

    opt_g = Adam(config.lr_g, config.beta1, config.beta2)
    opt_d = Adam(config.lr_d, config.beta1, config.beta2)
    history: list[dict[str, float]] = []

    for epoch in range(config.epochs):
        d_losses, g_losses, f_losses = [], [], []
        for _ in range(config.batches_per_epoch):
            x, c_t = source.batch(rng, config.batch_size)
            z = rng.standard_normal((config.batch_size, z_dim))
            c_f = sample_false_conditions(c_t, source.conditions, rng)

            x_fake = gen_forward(g_params, z, c_t)
            loss_d_val, grad_d = disc_loss_and_grad(
                d_params, x, x_fake, c_t, c_f=c_f, mismatch=config.mismatch
            )
            opt_d.step(d_params.values, grad_d)

            z2 = rng.standard_normal((config.batch_size, z_dim))
            loss_g_val, grad_g, parts = gen_loss_and_grad(
                g_params,
                d_params,
                z2,
                c_t,
                x_real=x,
                extractor=extractor,
                feature_weight=config.feature_weight,
                c_f=c_f if config.eq4_generator else None,
            )
            opt_g.step(g_params.values, grad_g)
            if ema is not None:
                d = config.ema_decay
                ema.values *= d
                ema.values += (1.0 - d) * g_params.values

            if not (np.isfinite(loss_d_val) and np.isfinite(loss_g_val)):
                raise TrainingDiverged(
                    f"non-finite loss at epoch {epoch}: d={loss_d_val}, g={loss_g_val}"
                )
            d_losses.append(loss_d_val)
            g_losses.append(parts["g"])
            f_losses.append(parts["feature"])

        history.append(
            {
                "epoch": float(epoch),
                "loss_d": float(np.mean(d_losses)),
                "loss_g": float(np.mean(g_losses)),
                "loss_feature": float(np.mean(f_losses)),
            }
        )

    return TrainResult(
        generator=g_params,
        discriminator=d_params,
        history=history,
        generator_ema=ema,
        config=config,
    )


# ---------------------------------------------------------------------------
# Checkpoints: one JSON header line + raw little-endian float64 parameters
# ---------------------------------------------------------------------------

_CKPT_MAGIC = b"BUBBLEFLOW-GAN-1\n"


def save_checkpoint(
    path: str | Path,
    params: ParamBundle,
    z_dim: int,
    cond_dim: int,
    seed: int,
    mode: str = "vector",
    image_size: tuple[int, int] | None = None,
    meta: dict | None = None,
) -> None:
    header = {
        "layer_sizes": list(params.spec.layer_sizes),
        "leaky_slope": params.spec.leaky_slope,
        "output": params.spec.output,
        "z_dim": z_dim,
        "cond_dim": cond_dim,
        "seed": seed,
        "mode": mode,
        "image_size": list(image_size) if image_size else None,
        "dtype": "<f8",
    }
    if meta:
        header["meta"] = meta
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        fh.write(params.values.astype("<f8").tobytes())


def load_checkpoint(path: str | Path) -> tuple[ParamBundle, dict]:
    with open(path, "rb") as fh:
        magic = fh.readline()
        if magic != _CKPT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        header = json.loads(fh.readline().decode("utf-8"))
        raw = fh.read()
    spec = NetSpec(
        layer_sizes=tuple(header["layer_sizes"]),
        leaky_slope=header["leaky_slope"],
        output=header["output"],
    )
    values = np.frombuffer(raw, dtype="<f8").astype(np.float64)
    if values.size != param_count(spec):
        raise ValueError(f"{path}: payload length does not match the schema")
    return ParamBundle(values=values, spec=spec), header
