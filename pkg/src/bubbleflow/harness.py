"""Relative-error comparison machinery and the condition-grid generator.

Builds signed mean-relative-error rows out of reference/candidate manifest
columns, aggregates them (MAMRE, max |MRE|), rasterizes grayscale MRE maps
over the (j_g, j_f) plane, and generates geometric condition lattices inside
a polygon boundary.

Sign convention everywhere: mre = (candidate - reference) / reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConditionRecord, FlowCondition, GrayImage

__all__ = [
    "ConditionGrid",
    "MreRow",
    "compare_manifests",
    "condition_grid",
    "max_abs_mre",
    "mamre",
    "mre",
    "mre_map",
    "mre_rows_from_manifest",
    "parse_mre_csv",
    "render_mre_csv",
]


@dataclass(frozen=True)
class MreRow:
    """One condition's reference/candidate pair and its signed relative error."""

    num: int
    condition: FlowCondition
    reference: float
    candidate: float
    mre: float


def mre(reference: float, candidate: float) -> float:
    """Signed relative error (candidate - reference) / reference."""
    if reference == 0:
        raise ZeroDivisionError("MRE undefined for a zero reference value")
    return (candidate - reference) / reference


def _as_mre_values(rows: list[MreRow] | np.ndarray | list[float]) -> np.ndarray:
    if len(rows) == 0:
        raise ValueError("need at least one row")
    if isinstance(rows[0], MreRow):
        return np.array([r.mre for r in rows], dtype=np.float64)
    return np.asarray(rows, dtype=np.float64)


def mamre(rows: list[MreRow] | list[float]) -> float:
    """Mean of the absolute relative errors."""
    return float(np.mean(np.abs(_as_mre_values(rows))))


def max_abs_mre(rows: list[MreRow] | list[float]) -> float:
    """Largest absolute relative error."""
    return float(np.max(np.abs(_as_mre_values(rows))))


def mre_rows_from_manifest(
    records: list[ConditionRecord], ref_col: str, cand_col: str
) -> list[MreRow]:
    """MRE rows from two value columns of a single manifest."""
    rows = []
    for rec in records:
        for col in (ref_col, cand_col):
            if col not in rec.values:
                raise KeyError(f"record {rec.num} has no column '{col}'")
        ref = rec.values[ref_col]
        cand = rec.values[cand_col]
        rows.append(
            MreRow(
                num=rec.num,
                condition=rec.condition,
                reference=ref,
                candidate=cand,
                mre=mre(ref, cand),
            )
        )
    return rows


def compare_manifests(
    reference: list[ConditionRecord],
    candidate: list[ConditionRecord],
    columns: list[str] | None = None,
) -> dict[str, list[MreRow]]:
    """Align two manifests by condition number and build MRE rows for every
    shared value column (or the requested subset). Conditions must agree."""
    cand_by_num = {rec.num: rec for rec in candidate}
    if columns is None:
        if not reference or not candidate:
            return {}
        columns = [c for c in reference[0].values if c in candidate[0].values]
    out: dict[str, list[MreRow]] = {col: [] for col in columns}
    for rec in reference:
        if rec.num not in cand_by_num:
            raise KeyError(f"candidate manifest missing condition num {rec.num}")
        other = cand_by_num[rec.num]
        for axis in ("j_g", "j_f"):
            a, b = getattr(rec.condition, axis), getattr(other.condition, axis)
            if not math.isclose(a, b, rel_tol=1e-9, abs_tol=0.0):
                raise ValueError(
                    f"condition num {rec.num}: {axis} mismatch ({a} vs {b})"
                )
        for col in columns:
            if col not in rec.values or col not in other.values:
                raise KeyError(f"column '{col}' missing for condition num {rec.num}")
            ref, cand = rec.values[col], other.values[col]
            out[col].append(
                MreRow(
                    num=rec.num,
                    condition=rec.condition,
                    reference=ref,
                    candidate=cand,
                    mre=mre(ref, cand),
                )
            )
    return out


# ---------------------------------------------------------------------------
# MRE map rasterization
# ---------------------------------------------------------------------------


def render_mre_csv(rows: list[MreRow]) -> str:
    """Canonical CSV of the exact row values. repr() keeps float round-trip
    exact, so parse_mre_csv(render_mre_csv(rows)) reproduces the rows."""
    lines = ["num,j_g,j_f,reference,candidate,mre"]
    for r in rows:
        lines.append(
            f"{r.num},{r.condition.j_g!r},{r.condition.j_f!r},"
            f"{r.reference!r},{r.candidate!r},{r.mre!r}"
        )
    return "\n".join(lines) + "\n"


def parse_mre_csv(text: str) -> list[MreRow]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "num,j_g,j_f,reference,candidate,mre":
        raise ValueError("not an MRE csv")
    rows = []
    for ln in lines[1:]:
        num, j_g, j_f, ref, cand, err = ln.split(",")
        rows.append(
            MreRow(
                num=int(num),
                condition=FlowCondition(j_g=float(j_g), j_f=float(j_f)),
                reference=float(ref),
                candidate=float(cand),
                mre=float(err),
            )
        )
    return rows


def mre_map(
    rows: list[MreRow],
    width: int,
    height: int,
    value_range: tuple[float, float],
    idw_power: float = 2.0,
) -> tuple[GrayImage, str]:
    """Rasterize MRE values over the (j_g, j_f) extent of the rows.

    Pixels at a sample position take that sample's value; everywhere else is
    filled by inverse-distance weighting (default power 2) in normalized
    condition coordinates. Values map linearly onto intensities 0..255 over
    ``value_range``. Row 0 is the largest j_f (plot orientation).

    The raster is illustrative; the returned CSV of exact values is the
    authoritative artifact and round-trips bit-exactly.
    """
    if not rows:
        raise ValueError("need at least one row")
    if width < 1 or height < 1:
        raise ValueError("raster must be at least 1x1")
    lo, hi = value_range
    if not hi > lo:
        raise ValueError("value range must be increasing")

    jg = np.array([r.condition.j_g for r in rows])
    jf = np.array([r.condition.j_f for r in rows])
    vals = np.array([r.mre for r in rows])

    def to_intensity(v: np.ndarray) -> np.ndarray:
        t = np.clip((v - lo) / (hi - lo), 0.0, 1.0)
        return np.rint(t * 255.0).astype(np.uint8)

    jg_span = jg.max() - jg.min()
    jf_span = jf.max() - jf.min()
    if jg_span == 0.0 and jf_span == 0.0:
        if np.unique(vals).size > 1:
            raise ValueError(
                "all rows share one condition point with differing values; extent undefined"
            )
        pixel = to_intensity(vals[:1])[0]
        img = GrayImage(pixels=np.full((height, width), pixel, dtype=np.uint8))
        return img, render_mre_csv(rows)

    # normalized sample coordinates in [0, 1]^2 (degenerate axes pin to 0.5)
    nx = (jg - jg.min()) / jg_span if jg_span > 0 else np.full_like(jg, 0.5)
    ny = (jf - jf.min()) / jf_span if jf_span > 0 else np.full_like(jf, 0.5)

    px = np.linspace(0.0, 1.0, width) if width > 1 else np.array([0.5])
    py = np.linspace(0.0, 1.0, height) if height > 1 else np.array([0.5])
    gx, gy = np.meshgrid(px, py)

    dist2 = (gx[..., None] - nx) ** 2 + ((1.0 - gy)[..., None] - ny) ** 2
    exact = dist2 <= 0.0
    with np.errstate(divide="ignore"):
        w = dist2 ** (-idw_power / 2.0)
    hit_any = exact.any(axis=2)
    w_masked = np.where(np.isfinite(w), w, 0.0)
    denom = w_masked.sum(axis=2)
    denom[denom == 0.0] = 1.0
    field = (w_masked * vals).sum(axis=2) / denom
    if hit_any.any():
        # exact sample hits override the interpolation (mean over coincident rows)
        counts = exact.sum(axis=2)
        sums = (exact * vals).sum(axis=2)
        field = np.where(hit_any, sums / np.maximum(counts, 1), field)

    img = GrayImage(pixels=to_intensity(field))
    return img, render_mre_csv(rows)


# ---------------------------------------------------------------------------
# Condition grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionGrid:
    """Geometric lattice of conditions inside a boundary polygon.

    ``jg_values``/``jf_values`` are the per-axis chains built by repeated
    multiplication, so consecutive entries satisfy next == value * ratio
    exactly (the same float operation that produced them).
    """

    boundary: tuple[tuple[float, float], ...]
    ratio: float
    jg_values: tuple[float, ...]
    jf_values: tuple[float, ...]
    points: tuple[FlowCondition, ...]


def _on_segment(p, a, b, eps: float = 1e-12) -> bool:
    (px, py), (ax, ay), (bx, by) = p, a, b
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    scale = max(abs(bx - ax), abs(by - ay), 1.0)
    if abs(cross) > eps * scale * max(abs(px) + abs(py), 1.0):
        return False
    dot = (px - ax) * (bx - ax) + (py - ay) * (by - ay)
    return -eps <= dot <= (bx - ax) ** 2 + (by - ay) ** 2 + eps


def point_in_polygon(point: tuple[float, float], polygon) -> bool:
    """Even-odd containment; points on an edge count as inside."""
    n = len(polygon)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    px, py = point
    for i in range(n):
        if _on_segment(point, polygon[i], polygon[(i + 1) % n]):
            return True
    inside = False
    for i in range(n):
        x1, y1 = polygon[i]
        x2, y2 = polygon[(i + 1) % n]
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


def _axis_chain(seed: float, ratio: float, hi: float) -> list[float]:
    """Ascending chain seed, seed*ratio, ... while the value stays <= hi."""
    chain = []
    v = seed
    while v <= hi:
        chain.append(v)
        v = v * ratio
    return chain


def condition_grid(
    boundary: list[tuple[float, float]],
    j_g0: float,
    j_f0: float,
    ratio: float = 1.05,
) -> ConditionGrid:
    """Lattice j_g0 * ratio^i x j_f0 * ratio^j (i, j >= 0) clipped to the
    polygon. Seeds belong at the lower-left of the region: the chains only
    grow upward from them.
    """
    if ratio <= 1.0:
        raise ValueError("ratio must exceed 1")
    if not (j_g0 > 0 and j_f0 > 0):
        raise ValueError("seed condition must be positive")
    poly = tuple((float(x), float(y)) for x, y in boundary)
    if not point_in_polygon((j_g0, j_f0), poly):
        raise ValueError("seed condition lies outside the boundary polygon")

    xs = [p[0] for p in poly]
    ys = [p[1] for p in poly]
    jg_chain = _axis_chain(j_g0, ratio, max(xs))
    jf_chain = _axis_chain(j_f0, ratio, max(ys))

    points = [
        FlowCondition(j_g=jg, j_f=jf)
        for jf in jf_chain
        for jg in jg_chain
        if point_in_polygon((jg, jf), poly)
    ]
    return ConditionGrid(
        boundary=poly,
        ratio=ratio,
        jg_values=tuple(jg_chain),
        jf_values=tuple(jf_chain),
        points=tuple(points),
    )
