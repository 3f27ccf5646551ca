"""Domain types and file ingestion shared by every other module.

Covers calibrated grayscale images (binary PGM on disk), flow conditions,
bubble bounding-box annotations with their ellipsoid conversion, and the
per-condition manifest CSV consumed by the comparison harness.

All physical quantities are stored in SI units (m, m/s); millimetres appear
only at the ingestion boundary through ``mm_per_pixel``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "AnnotationError",
    "AnnotationSet",
    "BubbleBox",
    "BubbleEllipsoid",
    "ConditionRecord",
    "FlowCondition",
    "GrayImage",
    "ManifestError",
    "PgmError",
    "PipeGeometry",
    "box_to_ellipsoid",
    "encode_pgm",
    "load_annotations",
    "load_gray_image",
    "parse_manifest",
    "parse_manifest_text",
    "save_annotations",
    "save_gray_image",
]


class PgmError(ValueError):
    """Malformed or unsupported PGM data."""


class AnnotationError(ValueError):
    """Malformed annotation JSON."""


class ManifestError(ValueError):
    """Malformed manifest CSV; message carries the offending row."""


@dataclass(frozen=True)
class GrayImage:
    """2-D grid of 8-bit intensities with an optional mm-per-pixel scale.

    ``pixels`` is a (height, width) uint8 array, row-major, top-left origin.
    ``mm_per_pixel`` is only required when physical quantities are extracted.
    """

    pixels: np.ndarray
    mm_per_pixel: float | None = None

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a nonempty 2-D array")
        if px.dtype != np.uint8:
            if np.any((px < 0) | (px > 255)):
                raise ValueError("pixel intensities must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)
        if self.mm_per_pixel is not None and not self.mm_per_pixel > 0:
            raise ValueError("mm_per_pixel must be positive")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class FlowCondition:
    """Superficial gas and liquid velocities (j_g, j_f) in m/s."""

    j_g: float
    j_f: float

    def __post_init__(self) -> None:
        if not (self.j_g > 0 and self.j_f > 0):
            raise ValueError("superficial velocities must be positive")

    def as_vector(self) -> np.ndarray:
        return np.array([self.j_g, self.j_f], dtype=np.float64)


@dataclass(frozen=True)
class BubbleBox:
    """Axis-aligned pixel bounding box of one detected bubble."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self) -> None:
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise ValueError("degenerate box: x_max > x_min and y_max > y_min required")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    def inside(self, image_width: int, image_height: int) -> bool:
        return (
            self.x_min >= 0
            and self.y_min >= 0
            and self.x_max <= image_width
            and self.y_max <= image_height
        )


@dataclass(frozen=True)
class BubbleEllipsoid:
    """Physical semi-axes of one bubble in metres.

    a is half the shorter box side, b half the longer one (so a/b <= 1), and
    the out-of-plane axis is their average: c = (a + b) / 2.
    """

    a: float
    b: float
    c: float

    def __post_init__(self) -> None:
        if not (0 < self.a <= self.b):
            raise ValueError("require 0 < a <= b")
        if not math.isclose(self.c, (self.a + self.b) / 2.0, rel_tol=1e-12):
            raise ValueError("require c == (a + b) / 2")


@dataclass(frozen=True)
class PipeGeometry:
    """Internal pipe diameter D and imaged axial length L, both in metres."""

    D: float
    L: float

    def __post_init__(self) -> None:
        if not (self.D > 0 and self.L > 0):
            raise ValueError("pipe geometry must be positive")

    @property
    def volume(self) -> float:
        """Imaged pipe volume pi * D^2 * L / 4 in m^3."""
        return math.pi * self.D**2 * self.L / 4.0


@dataclass(frozen=True)
class AnnotationSet:
    """Bubble boxes for one image together with its condition and calibration.

    ``extras`` carries optional metadata (image size, renderer seed, ...) that
    round-trips through the JSON file untouched.
    """

    image_id: str
    condition: FlowCondition
    boxes: tuple[BubbleBox, ...]
    mm_per_pixel: float
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.mm_per_pixel > 0:
            raise ValueError("mm_per_pixel must be positive")
        object.__setattr__(self, "boxes", tuple(self.boxes))


@dataclass(frozen=True)
class ConditionRecord:
    """One manifest row: a numbered condition plus named metric values."""

    num: int
    condition: FlowCondition
    values: dict[str, float]


# ---------------------------------------------------------------------------
# PGM (P5, maxval 255) encode/decode
# ---------------------------------------------------------------------------


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Return the first `count` whitespace-separated header tokens and the
    offset just past the single whitespace byte that terminates the last one.
    '#' starts a comment running to end of line, as in the netpbm formats.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i : i + 1].isspace():
            i += 1
        if i < n and data[i] == ord("#"):
            while i < n and data[i] not in (10, 13):
                i += 1
            continue
        start = i
        while i < n and not data[i : i + 1].isspace() and data[i] != ord("#"):
            i += 1
        if start == i:
            raise PgmError("truncated PGM header")
        tokens.append(data[start:i])
        if len(tokens) == count:
            if i >= n or not data[i : i + 1].isspace():
                raise PgmError("PGM header not terminated by whitespace")
            i += 1  # exactly one whitespace byte before the payload
    return tokens, i


def decode_pgm(data: bytes) -> GrayImage:
    """Decode binary 8-bit PGM (P5, maxval 255) bytes into a GrayImage."""
    tokens, offset = _read_pgm_tokens(data, 4)
    if tokens[0] != b"P5":
        raise PgmError(f"unsupported magic {tokens[0]!r}; only binary P5 is accepted")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
    except ValueError as exc:
        raise PgmError(f"non-numeric PGM header field: {exc}") from exc
    if width <= 0 or height <= 0:
        raise PgmError("PGM dimensions must be positive")
    if maxval != 255:
        raise PgmError(f"unsupported max-value {maxval}; only 255 is accepted")
    payload = data[offset : offset + width * height]
    if len(payload) < width * height:
        raise PgmError(
            f"truncated PGM payload: expected {width * height} bytes, got {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(pixels=pixels.copy())


def encode_pgm(img: GrayImage) -> bytes:
    """Encode a GrayImage as binary PGM: ``P5\\n<w> <h>\\n255\\n`` + payload."""
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def load_gray_image(path: str | Path, mm_per_pixel: float | None = None) -> GrayImage:
    """Load a binary PGM file; intensities are taken byte-per-pixel, unscaled."""
    data = Path(path).read_bytes()
    img = decode_pgm(data)
    if mm_per_pixel is None:
        return img
    return GrayImage(pixels=img.pixels.copy(), mm_per_pixel=mm_per_pixel)


def save_gray_image(img: GrayImage, path: str | Path) -> None:
    Path(path).write_bytes(encode_pgm(img))


# ---------------------------------------------------------------------------
# Bubble geometry
# ---------------------------------------------------------------------------


def box_to_ellipsoid(box: BubbleBox, mm_per_pixel: float) -> BubbleEllipsoid:
    """Convert a pixel bounding box to physical semi-axes in metres.

    a = half the shorter side, b = half the longer side (keeps a/b <= 1),
    c = (a + b) / 2.
    """
    if not mm_per_pixel > 0:
        raise ValueError("mm_per_pixel must be positive")
    scale_m = mm_per_pixel * 1e-3
    short, long_ = sorted((box.width, box.height))
    a = short / 2.0 * scale_m
    b = long_ / 2.0 * scale_m
    return BubbleEllipsoid(a=a, b=b, c=(a + b) / 2.0)


# ---------------------------------------------------------------------------
# Annotation JSON
# ---------------------------------------------------------------------------

_ANNOTATION_CORE_KEYS = ("image_id", "j_g", "j_f", "mm_per_pixel", "boxes")


def annotations_from_dict(obj: dict) -> AnnotationSet:
    missing = [k for k in _ANNOTATION_CORE_KEYS if k not in obj]
    if missing:
        raise AnnotationError(f"annotation file missing keys: {', '.join(missing)}")
    boxes = []
    for i, row in enumerate(obj["boxes"]):
        if len(row) != 4:
            raise AnnotationError(f"box {i} must have 4 entries, got {len(row)}")
        try:
            boxes.append(BubbleBox(*(int(v) for v in row)))
        except (TypeError, ValueError) as exc:
            raise AnnotationError(f"box {i} invalid: {exc}") from exc
    extras = {k: v for k, v in obj.items() if k not in _ANNOTATION_CORE_KEYS}
    try:
        condition = FlowCondition(j_g=float(obj["j_g"]), j_f=float(obj["j_f"]))
        return AnnotationSet(
            image_id=str(obj["image_id"]),
            condition=condition,
            boxes=tuple(boxes),
            mm_per_pixel=float(obj["mm_per_pixel"]),
            extras=extras,
        )
    except ValueError as exc:
        raise AnnotationError(str(exc)) from exc


def annotations_to_dict(ann: AnnotationSet) -> dict:
    obj = {
        "image_id": ann.image_id,
        "j_g": ann.condition.j_g,
        "j_f": ann.condition.j_f,
        "mm_per_pixel": ann.mm_per_pixel,
        "boxes": [[b.x_min, b.y_min, b.x_max, b.y_max] for b in ann.boxes],
    }
    obj.update(ann.extras)
    return obj


def load_annotations(path: str | Path) -> AnnotationSet:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AnnotationError(f"{path}: {exc}") from exc
    return annotations_from_dict(obj)


def save_annotations(ann: AnnotationSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(annotations_to_dict(ann), fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Manifest CSV
# ---------------------------------------------------------------------------

_MANIFEST_REQUIRED = ("num", "j_g", "j_f")


def parse_manifest_text(text: str) -> list[ConditionRecord]:
    """Parse manifest CSV text: header ``num,j_g,j_f,<metric columns...>``.

    Rows are returned in file order. Every failure names the offending
    1-based data row so broken manifests can be located quickly.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ManifestError("empty manifest: header row missing") from None
    names = [h.strip().lower() for h in header]
    for required in _MANIFEST_REQUIRED:
        if required not in names:
            raise ManifestError(f"manifest header missing column '{required}'")
    idx = {name: i for i, name in enumerate(names)}
    metric_names = [n for n in names if n not in _MANIFEST_REQUIRED]

    records: list[ConditionRecord] = []
    seen: set[int] = set()
    for rownum, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(names):
            raise ManifestError(
                f"row {rownum}: expected {len(names)} cells, got {len(row)}"
            )

        def cell(col: str) -> float:
            raw = row[idx[col]].strip()
            try:
                return float(raw)
            except ValueError:
                raise ManifestError(
                    f"row {rownum}: non-numeric value {raw!r} in column '{col}'"
                ) from None

        num = int(cell("num"))
        if num in seen:
            raise ManifestError(f"row {rownum}: duplicate condition id {num}")
        seen.add(num)
        try:
            condition = FlowCondition(j_g=cell("j_g"), j_f=cell("j_f"))
        except ValueError as exc:
            raise ManifestError(f"row {rownum}: {exc}") from exc
        values = {name: cell(name) for name in metric_names}
        records.append(ConditionRecord(num=num, condition=condition, values=values))
    return records


def parse_manifest(path: str | Path) -> list[ConditionRecord]:
    return parse_manifest_text(Path(path).read_text(encoding="utf-8"))
