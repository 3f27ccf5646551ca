"""Canned desk-scale training setups.

The Gaussian-cloud experiment trains the conditional generator to match a
3-D normal target (mean [0, 0, 0], unit variances) and is the standard
smoke test that the whole adversarial loop actually converges. The image
setup trains on 16x16 renders from the procedural bubble generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import FlowCondition
from ..synth import RenderSpec, render, sample_population
from .net import NetSpec, ParamBundle, gen_forward
from .train import TrainConfig, TrainResult, train

__all__ = [
    "Gaussian3DSource",
    "SynthImageSource",
    "default_conditions",
    "run_gaussian_cloud",
    "sample_generator",
]


def default_conditions() -> np.ndarray:
    """Small (j_g, j_f) grid used when a trainer needs a condition domain."""
    grid = [(0.03, 0.2), (0.03, 0.6), (0.1, 0.2), (0.1, 0.6)]
    return np.array(grid, dtype=np.float64)


@dataclass
class Gaussian3DSource:
    """Real samples are N(mean, diag(std^2)) in R^3, independent of the
    condition label; conditions are drawn uniformly from a finite set."""

    mean: np.ndarray
    std: np.ndarray
    conditions: np.ndarray

    def __post_init__(self) -> None:
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        self.conditions = np.atleast_2d(np.asarray(self.conditions, dtype=np.float64))
        self.sample_dim = self.mean.size
        self.cond_dim = self.conditions.shape[1]

    def batch(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        x = self.mean + self.std * rng.standard_normal((n, self.sample_dim))
        idx = rng.integers(0, self.conditions.shape[0], size=n)
        return x, self.conditions[idx]


@dataclass
class SynthImageSource:
    """Pre-rendered pool of procedural bubble frames per condition, flattened
    to [0, 1] vectors. Pool rendering is seeded, so the source is a pure
    function of its arguments."""

    size: int = 16
    pool_per_condition: int = 48
    seed: int = 0
    conditions: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.conditions is None:
            self.conditions = default_conditions()
        self.conditions = np.atleast_2d(np.asarray(self.conditions, dtype=np.float64))
        self.sample_dim = self.size * self.size
        self.cond_dim = self.conditions.shape[1]
        pools = []
        for ci, (j_g, j_f) in enumerate(self.conditions):
            frames = []
            for k in range(self.pool_per_condition):
                spec = RenderSpec(
                    condition=FlowCondition(j_g=float(j_g), j_f=float(j_f)),
                    width=self.size,
                    height=self.size,
                    mm_per_pixel=1.2,
                    size_median_m=1.8e-3,
                    rim_width=1,
                    seed=self.seed * 1_000_003 + ci * 1009 + k,
                )
                img = render(spec, sample_population(spec))
                frames.append(img.pixels.astype(np.float64).ravel() / 255.0)
            pools.append(np.stack(frames))
        self._pools = pools

    def batch(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        ci = rng.integers(0, len(self._pools), size=n)
        x = np.empty((n, self.sample_dim))
        for row, c in enumerate(ci):
            pool = self._pools[c]
            x[row] = pool[rng.integers(0, pool.shape[0])]
        return x, self.conditions[ci]


def specs_for(
    sample_dim: int, cond_dim: int, z_dim: int, hidden: int, output: str
) -> tuple[NetSpec, NetSpec]:
    g_spec = NetSpec(
        layer_sizes=(z_dim + cond_dim, hidden, hidden, sample_dim), output=output
    )
    d_spec = NetSpec(
        layer_sizes=(sample_dim + cond_dim, hidden, hidden, 1), output="sigmoid"
    )
    return g_spec, d_spec


def sample_generator(
    params: ParamBundle, conditions: np.ndarray, z_dim: int, n: int, seed: int
) -> np.ndarray:
    """n generator samples with conditions cycled from the given set."""
    rng = np.random.default_rng(seed)
    conditions = np.atleast_2d(np.asarray(conditions, dtype=np.float64))
    z = rng.standard_normal((n, z_dim))
    c = conditions[np.arange(n) % conditions.shape[0]]
    return gen_forward(params, z, c)


def run_gaussian_cloud(
    seed: int,
    epochs: int = 160,
    batch_size: int = 128,
    z_dim: int = 8,
    hidden: int = 32,
) -> tuple[TrainResult, Gaussian3DSource]:
    """Train the plain conditional objective against the 3-D unit Gaussian.

    Feature and mismatch terms are off here: the point of the experiment is
    to watch the bare adversarial pair pull the generated cloud onto the
    target distribution. EMA weights are tracked for sampling.
    """
    source = Gaussian3DSource(
        mean=np.zeros(3), std=np.ones(3), conditions=default_conditions()
    )
    g_spec, d_spec = specs_for(source.sample_dim, source.cond_dim, z_dim, hidden, "linear")
    config = TrainConfig(
        epochs=epochs,
        batch_size=batch_size,
        batches_per_epoch=25,
        seed=seed,
        feature_weight=0.0,
        mismatch=False,
        ema_decay=0.999,
    )
    result = train(config, source, g_spec, d_spec, z_dim=z_dim)
    return result, source
