"""Distribution-level quality metrics over pluggable sample embeddings.

Frechet distance, kernel (MMD^2) distance, inception-style score, and
k-nearest-neighbour precision/recall, all defined on embedded sample sets.
Absolute values depend entirely on the chosen embedding, so reports should
always record which embedder produced them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import GrayImage

__all__ = [
    "SampleSet",
    "embed_images",
    "fid",
    "inception_score",
    "kid",
    "precision_recall",
]

EIG_CLIP_REL = 1e-10  # eigenvalues below this fraction of the max are zeroed


@dataclass(frozen=True)
class SampleSet:
    """n embedded samples of dimension d as an (n, d) float64 matrix."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ValueError("rows must be a nonempty (n, d) matrix")
        if not np.all(np.isfinite(rows)):
            raise ValueError("sample embeddings must be finite")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


def _clipped_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(m)
    top = float(vals.max(initial=0.0))
    vals = np.where(vals < max(top * EIG_CLIP_REL, 0.0), 0.0, vals)
    return vals, vecs

def _mean_cov(s: SampleSet) -> tuple[np.ndarray, np.ndarray]:
    if s.n < 2:
        raise ValueError("need at least 2 samples for a covariance")
    mu = s.rows.mean(axis=0)
    centered = s.rows - mu
    cov = centered.T @ centered / (s.n - 1)
    return mu, cov


def fid(a: SampleSet, b: SampleSet) -> float:
    """Frechet distance between the Gaussian fits of two embedded sets:
    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)).

    The matrix square root goes through symmetric eigendecompositions with
    small/negative eigenvalues clipped to zero, which keeps the result
    finite and nonnegative for rank-deficient covariances.
    """
    if a.d != b.d:
        raise ValueError("sample sets must share the embedding dimension")
    if a.n < a.d or b.n < b.d:
        warnings.warn(
            "fewer samples than embedding dimensions; covariance estimate is singular",
            stacklevel=2,
        )
    mu_a, cov_a = _mean_cov(a)
    mu_b, cov_b = _mean_cov(b)
    if not (np.all(np.isfinite(cov_a)) and np.all(np.isfinite(cov_b))):
        raise ValueError("non-finite covariance")

    vals_a, vecs_a = _clipped_eigh(cov_a)
    sqrt_a = (vecs_a * np.sqrt(vals_a)) @ vecs_a.T
    cross_vals, _ = _clipped_eigh(sqrt_a @ cov_b @ sqrt_a)
    tr_cross = float(np.sqrt(cross_vals).sum())

    diff = mu_a - mu_b
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * tr_cross)
    return max(value, 0.0)


def _poly_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    d = x.shape[1]
    return (x @ y.T / d + 1.0) ** 3


def _mmd2_unbiased(x: np.ndarray, y: np.ndarray) -> float:
    m, n = x.shape[0], y.shape[0]
    kxx = _poly_kernel(x, x)
    kyy = _poly_kernel(y, y)
    kxy = _poly_kernel(x, y)
    sum_xx = (kxx.sum() - np.trace(kxx)) / (m * (m - 1))
    sum_yy = (kyy.sum() - np.trace(kyy)) / (n * (n - 1))
    return float(sum_xx + sum_yy - 2.0 * kxy.mean())


def kid(a: SampleSet, b: SampleSet, block: int | None = None) -> float:
    """Unbiased MMD^2 with the cubic polynomial kernel (x.y/d + 1)^3,
    averaged over consecutive equal-size blocks of both sets.

    block=None uses one block covering min(n_a, n_b) samples; with block
    equal to the full size this is exactly the quadratic-time estimator.
    Trailing samples that do not fill a block are ignored.
    """
    if a.d != b.d:
        raise ValueError("sample sets must share the embedding dimension")
    n = min(a.n, b.n)
    if block is None:
        block = n
    if block < 2:
        raise ValueError("block must be >= 2")
    if block > n:
        raise ValueError(f"block {block} exceeds available samples {n}")
    n_blocks = n // block
    vals = [
        _mmd2_unbiased(
            a.rows[i * block : (i + 1) * block], b.rows[i * block : (i + 1) * block]
        )
        for i in range(n_blocks)
    ]
    return float(np.mean(vals))


def inception_score(
    probe: Callable[[np.ndarray], np.ndarray],
    samples: Sequence[np.ndarray] | np.ndarray,
    eps: float = 1e-12,
) -> float:
    """exp of the mean KL divergence between per-sample class posteriors and
    the marginal class distribution. Lies in [1, K] for a K-class probe."""
    rows = [np.asarray(probe(np.asarray(s)), dtype=np.float64).ravel() for s in samples]
    if not rows:
        raise ValueError("need at least one sample")
    p = np.stack(rows)
    if np.any(p < 0) or np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("probe outputs must be probability vectors")
    marginal = p.mean(axis=0)
    kl = np.sum(p * (np.log(p + eps) - np.log(marginal + eps)), axis=1)
    return float(np.exp(kl.mean()))


def _pairwise_dist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    xx = np.sum(x * x, axis=1)[:, None]
    yy = np.sum(y * y, axis=1)[None, :]
    sq = np.maximum(xx + yy - 2.0 * (x @ y.T), 0.0)
    return np.sqrt(sq)


def _knn_radii(x: np.ndarray, k: int) -> np.ndarray:
    d = _pairwise_dist(x, x)
    np.fill_diagonal(d, np.inf)
    return np.sort(d, axis=1)[:, k - 1]


def precision_recall(
    real: SampleSet, fake: SampleSet, k: int = 3
) -> tuple[float, float]:
    """Manifold-membership precision/recall with k-th neighbour radii.

    A fake sample counts toward precision when it falls within the k-th
    nearest-neighbour radius of any real sample; recall swaps the roles.
    Comparisons are inclusive, so duplicated points (radius 0) still match.
    """
    if real.d != fake.d:
        raise ValueError("sample sets must share the embedding dimension")
    if real.n < k + 1 or fake.n < k + 1:
        raise ValueError(f"need at least k+1={k + 1} samples in each set")
    real_radii = _knn_radii(real.rows, k)
    fake_radii = _knn_radii(fake.rows, k)
    d_rf = _pairwise_dist(real.rows, fake.rows)
    precision = float(np.mean(np.any(d_rf <= real_radii[:, None], axis=0)))
    recall = float(np.mean(np.any(d_rf <= fake_radii[None, :], axis=1)))
    return precision, recall


def embed_images(
    images: Sequence[GrayImage],
    embedder: str = "identity",
    dim: int = 64,
    seed: int = 0,
) -> SampleSet:
    """Embed equal-size images into a SampleSet.

    "identity" flattens raw intensities to a w*h vector; "random" applies a
    fixed-seed Gaussian projection to ``dim`` components (scaled by
    1/sqrt(dim), which approximately preserves pairwise distances).
    """
    if not images:
        raise ValueError("need at least one image")
    shape = (images[0].height, images[0].width)
    flat = []
    for i, img in enumerate(images):
        if (img.height, img.width) != shape:
            raise ValueError(f"image {i} has size {img.pixels.shape}, expected {shape}")
        flat.append(img.pixels.astype(np.float64).ravel())
    x = np.stack(flat)
    if embedder == "identity":
        return SampleSet(rows=x)
    if embedder == "random":
        rng = np.random.default_rng(seed)
        proj = rng.standard_normal((x.shape[1], dim)) / np.sqrt(dim)
        return SampleSet(rows=x @ proj)
    raise ValueError(f"unknown embedder '{embedder}'")
