"""Image-correspondence indicators for grayscale bubbly-flow frames.

Five indicators: luminance (mean intensity), contrast (population standard
deviation), Sobel gradient magnitude, and two co-occurrence texture measures
(homogeneity and correlation). All arithmetic runs in float64; numpy's
pairwise summation keeps the reductions stable on large frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GrayImage

__all__ = [
    "DegenerateTextureError",
    "Glcm",
    "MetricVector",
    "contrast",
    "glcm",
    "glcm_correlation",
    "homogeneity",
    "luminance",
    "metric_vector",
    "sobel_magnitude",
]


class DegenerateTextureError(ValueError):
    """Raised when a GLCM marginal has zero spread (e.g. constant image)."""


# Unnormalized 3x3 Sobel kernels, applied as correlation.
SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


@dataclass(frozen=True)
class Glcm:
    """Gray-level co-occurrence matrix normalized to total mass 1.

    ``p[i, j]`` is the relative frequency of a pixel in level-bin i having a
    neighbour (at the construction offset) in level-bin j.
    """

    p: np.ndarray
    levels: int
    symmetric: bool

    def __post_init__(self) -> None:
        p = np.asarray(self.p, dtype=np.float64)
        if p.shape != (self.levels, self.levels):
            raise ValueError("GLCM must be levels x levels")
        if np.any(p < 0):
            raise ValueError("GLCM frequencies must be nonnegative")
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise ValueError("GLCM must be normalized to sum 1")
        p = np.ascontiguousarray(p)
        p.setflags(write=False)
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class MetricVector:
    """The five indicators of one image. ``correlation`` is NaN when the
    texture is degenerate and the caller asked for that policy."""

    luminance: float
    contrast: float
    magnitude: float
    homogeneity: float
    correlation: float


def luminance(img: GrayImage) -> float:
    """Mean pixel intensity."""
    return float(np.mean(img.pixels, dtype=np.float64))


def contrast(img: GrayImage) -> float:
    """Population standard deviation of pixel intensities (1/n normalization)."""
    return float(np.std(img.pixels.astype(np.float64)))


def sobel_magnitude(img: GrayImage, aggregate: str = "mean") -> float:
    """Sobel gradient magnitude aggregated over interior pixels.

    Applies the unnormalized 3x3 kernels to every pixel whose 3x3
    neighbourhood lies inside the frame (no padding) and aggregates
    sqrt(gx^2 + gy^2). ``aggregate`` is "mean" (default) or "sum".
    """
    if img.width < 3 or img.height < 3:
        raise ValueError("image must be at least 3x3 for the Sobel operator")
    if aggregate not in ("mean", "sum"):
        raise ValueError("aggregate must be 'mean' or 'sum'")
    a = img.pixels.astype(np.float64)
    # correlation with the 3x3 kernels via shifted slices
    gx = np.zeros((img.height - 2, img.width - 2))
    gy = np.zeros_like(gx)
    for dy in range(3):
        for dx in range(3):
            block = a[dy : dy + img.height - 2, dx : dx + img.width - 2]
            gx += SOBEL_X[dy, dx] * block
            gy += SOBEL_Y[dy, dx] * block
    mag = np.sqrt(gx * gx + gy * gy)
    return float(mag.sum() if aggregate == "sum" else mag.mean())


def glcm(
    img: GrayImage,
    offset: tuple[int, int] = (1, 0),
    symmetric: bool = True,
    levels: int = 256,
) -> Glcm:
    """Co-occurrence matrix of intensity pairs at a fixed pixel offset.

    ``offset`` is (dx, dy) in pixels (dx along width, dy along height). With
    ``levels`` < 256 the intensities are quantized as v * levels // 256.
    In symmetric mode each pair is counted in both orders.
    """
    dx, dy = offset
    if dx == 0 and dy == 0:
        raise ValueError("offset must be nonzero")
    if levels < 2:
        raise ValueError("levels must be >= 2")
    h, w = img.height, img.width
    if w - abs(dx) <= 0 or h - abs(dy) <= 0:
        raise ValueError("no valid pixel pairs at this offset")

    vals = img.pixels.astype(np.int64)
    if levels != 256:
        vals = vals * levels // 256

    x0, x1 = max(0, -dx), min(w, w - dx)
    y0, y1 = max(0, -dy), min(h, h - dy)
    src = vals[y0:y1, x0:x1]
    dst = vals[y0 + dy : y1 + dy, x0 + dx : x1 + dx]

    counts = np.zeros((levels, levels), dtype=np.float64)
    np.add.at(counts, (src.ravel(), dst.ravel()), 1.0)
    if symmetric:
        counts += counts.T
    return Glcm(p=counts / counts.sum(), levels=levels, symmetric=symmetric)


def homogeneity(g: Glcm) -> float:
    """Inverse difference moment: sum of p[i,j] / (1 + (i - j)^2)."""
    i, j = np.indices(g.p.shape)
    return float(np.sum(g.p / (1.0 + (i - j) ** 2)))


def _marginal_stats(g: Glcm) -> tuple[float, float, float, float]:
    levels = np.arange(g.levels, dtype=np.float64)
    p_i = g.p.sum(axis=1)
    p_j = g.p.sum(axis=0)
    mu_i = float(levels @ p_i)
    mu_j = float(levels @ p_j)
    var_i = float(((levels - mu_i) ** 2) @ p_i)
    var_j = float(((levels - mu_j) ** 2) @ p_j)
    return mu_i, mu_j, math.sqrt(var_i), math.sqrt(var_j)


def glcm_correlation(g: Glcm) -> float:
    """Linear correlation of the co-occurring gray levels, in [-1, 1].

    Raises DegenerateTextureError when a marginal standard deviation is zero
    (constant image); the caller decides how to handle that case.
    """
    mu_i, mu_j, sigma_i, sigma_j = _marginal_stats(g)
    if sigma_i == 0.0 or sigma_j == 0.0:
        raise DegenerateTextureError("GLCM marginal has zero standard deviation")
    levels = np.arange(g.levels, dtype=np.float64)
    di = levels - mu_i
    dj = levels - mu_j
    return float(di @ g.p @ dj / (sigma_i * sigma_j))


def metric_vector(
    img: GrayImage,
    offset: tuple[int, int] = (1, 0),
    symmetric: bool = True,
    levels: int = 256,
    aggregate: str = "mean",
    on_degenerate: str = "raise",
) -> MetricVector:
    """All five indicators of one image.

    ``on_degenerate`` selects the policy for a zero-spread texture:
    "raise" propagates DegenerateTextureError, "nan" records NaN instead
    (useful for batch CLI runs over constant frames).
    """
    if on_degenerate not in ("raise", "nan"):
        raise ValueError("on_degenerate must be 'raise' or 'nan'")
    g = glcm(img, offset=offset, symmetric=symmetric, levels=levels)
    try:
        corr = glcm_correlation(g)
    except DegenerateTextureError:
        if on_degenerate == "raise":
            raise
        corr = float("nan")
    return MetricVector(
        luminance=luminance(img),
        contrast=contrast(img),
        magnitude=sobel_magnitude(img, aggregate=aggregate),
        homogeneity=homogeneity(g),
        correlation=corr,
    )
