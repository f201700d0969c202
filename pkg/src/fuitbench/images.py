"""8-bit grayscale images, index images, and their file formats.

Supported on-disk formats:

* binary PGM (``P5``, maxval <= 255) for both raw images and index images
  (index images are written with ``maxval = r_used``),
* 8-bit grayscale PNG (mode ``L``, via Pillow),
* IDX ubyte tensors (the classic ``images``/``labels`` pair),
* plain CSV of integers for index images.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


class ImageFormatError(ValueError):
    """A file is not a valid instance of the format it claims to be."""


@dataclass(frozen=True)
class ImageU8:
    """A grayscale image with integer pixel values in [0, 255].

    ``pixels`` is a row-major ``(rows, cols)`` uint8 array.
    """

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError(f"pixels must be a non-empty 2-D grid, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any((px < 0) | (px > 255)) or np.any(px != np.floor(px)):
                raise ValueError("pixel values must be integers in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    def to_unit(self) -> np.ndarray:
        """Pixels rescaled to [0, 1] floats (value / 255)."""
        return self.pixels.astype(np.float64) / 255.0


@dataclass(frozen=True)
class IndexImage:
    """An image whose entries are 1-based quantizer bin indices in [1, r_used]."""

    indices: np.ndarray
    r_used: int

    def __post_init__(self) -> None:
        idx = np.asarray(self.indices)
        if idx.ndim != 2 or idx.size == 0:
            raise ValueError(f"indices must be a non-empty 2-D grid, got shape {idx.shape}")
        if self.r_used < 1:
            raise ValueError(f"r_used must be >= 1, got {self.r_used}")
        idx = idx.astype(np.int64, copy=False)
        if idx.min() < 1 or idx.max() > self.r_used:
            raise ValueError(f"indices must lie in [1, {self.r_used}]")
        object.__setattr__(self, "indices", idx)

    @property
    def rows(self) -> int:
        return self.indices.shape[0]

    @property
    def cols(self) -> int:
        return self.indices.shape[1]

    def to_unit(self) -> np.ndarray:
        """Indices rescaled to (0, 1] floats (index / r_used)."""
        return self.indices.astype(np.float64) / float(self.r_used)


# --------------------------------------------------------------------------
# PGM (P5)
# --------------------------------------------------------------------------

_PGM_TOKEN = re.compile(rb"^\s*(?:#[^\n]*\n\s*)*(\S+)")


def _read_pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens = []
    pos = 0
    for _ in range(count):
        m = _PGM_TOKEN.match(data[pos:])
        if m is None:
            raise ImageFormatError(f"PGM header truncated at byte {pos}")
        tokens.append(m.group(1))
        pos += m.end(1)
    return tokens, pos


def read_pgm(path: str | Path) -> ImageU8:
    """Read a binary (P5) PGM file with maxval <= 255."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _read_pgm_tokens(data, 4)
    if magic != b"P5":
        raise ImageFormatError(f"{path}: expected P5 magic, got {magic!r}")
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise ImageFormatError(f"{path}: malformed PGM header") from exc
    if not (0 < maxval <= 255):
        raise ImageFormatError(f"{path}: maxval {maxval} outside (0, 255]")
    pos += 1  # single whitespace byte after maxval
    need = w * h
    raster = data[pos : pos + need]
    if len(raster) < need:
        raise ImageFormatError(
            f"{path}: raster truncated at byte {pos + len(raster)} (need {pos + need} bytes)"
        )
    px = np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
    return ImageU8(px)


def write_pgm(path: str | Path, pixels: np.ndarray, maxval: int = 255) -> None:
    """Write a binary (P5) PGM; index images pass ``maxval = r_used``."""
    px = np.asarray(pixels)
    if px.ndim != 2:
        raise ValueError("PGM payload must be 2-D")
    if not (0 < maxval <= 255):
        raise ValueError(f"maxval {maxval} outside (0, 255]")
    if px.min() < 0 or px.max() > maxval:
        raise ValueError(f"pixel values exceed maxval {maxval}")
    h, w = px.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + px.astype(np.uint8).tobytes())


# --------------------------------------------------------------------------
# PNG (8-bit grayscale)
# --------------------------------------------------------------------------


def read_png(path: str | Path) -> ImageU8:
    """Read an 8-bit grayscale PNG (mode ``L``)."""
    with Image.open(path) as im:
        if im.mode != "L":
            raise ImageFormatError(f"{path}: expected 8-bit grayscale PNG, got mode {im.mode}")
        return ImageU8(np.asarray(im, dtype=np.uint8))


def write_png(path: str | Path, pixels: np.ndarray) -> None:
    px = np.asarray(pixels, dtype=np.uint8)
    Image.fromarray(px, mode="L").save(path, format="PNG")


def read_image(path: str | Path) -> ImageU8:
    """Read a grayscale image, dispatching on file extension (.pgm / .png)."""
    suffix = Path(path).suffix.lower()
    if suffix == ".pgm":
        return read_pgm(path)
    if suffix == ".png":
        return read_png(path)
    raise ImageFormatError(f"{path}: unsupported image extension {suffix!r}")


# --------------------------------------------------------------------------
# IDX ubyte tensors
# --------------------------------------------------------------------------

IDX_UBYTE_IMAGES = 0x00000803  # 3-D ubyte tensor: count x rows x cols
IDX_UBYTE_LABELS = 0x00000801  # 1-D ubyte tensor


def _idx_be32(data: bytes, offset: int, path: str | Path) -> int:
    if offset + 4 > len(data):
        raise ImageFormatError(f"{path}: IDX file truncated at byte {len(data)} (need {offset + 4})")
    return int.from_bytes(data[offset : offset + 4], "big")


def read_idx_images(path: str | Path) -> np.ndarray:
    """Read an IDX 3-D ubyte tensor as an (n, rows, cols) uint8 array."""
    data = Path(path).read_bytes()
    magic = _idx_be32(data, 0, path)
    if magic != IDX_UBYTE_IMAGES:
        raise ImageFormatError(f"{path}: bad IDX image magic 0x{magic:08x}")
    n = _idx_be32(data, 4, path)
    rows = _idx_be32(data, 8, path)
    cols = _idx_be32(data, 12, path)
    need = 16 + n * rows * cols
    if len(data) < need:
        raise ImageFormatError(f"{path}: IDX file truncated at byte {len(data)} (need {need})")
    return np.frombuffer(data[16:need], dtype=np.uint8).reshape(n, rows, cols)


def read_idx_labels(path: str | Path) -> np.ndarray:
    """Read an IDX 1-D ubyte tensor as an (n,) uint8 array."""
    data = Path(path).read_bytes()
    magic = _idx_be32(data, 0, path)
    if magic != IDX_UBYTE_LABELS:
        raise ImageFormatError(f"{path}: bad IDX label magic 0x{magic:08x}")
    n = _idx_be32(data, 4, path)
    need = 8 + n
    if len(data) < need:
        raise ImageFormatError(f"{path}: IDX file truncated at byte {len(data)} (need {need})")
    return np.frombuffer(data[8:need], dtype=np.uint8)


def write_idx_images(path: str | Path, images: np.ndarray) -> None:
    arr = np.asarray(images, dtype=np.uint8)
    if arr.ndim != 3:
        raise ValueError("IDX image tensor must be (n, rows, cols)")
    buf = io.BytesIO()
    buf.write(IDX_UBYTE_IMAGES.to_bytes(4, "big"))
    for dim in arr.shape:
        buf.write(int(dim).to_bytes(4, "big"))
    buf.write(arr.tobytes())
    Path(path).write_bytes(buf.getvalue())


def write_idx_labels(path: str | Path, labels: np.ndarray) -> None:
    arr = np.asarray(labels, dtype=np.uint8)
    if arr.ndim != 1:
        raise ValueError("IDX label tensor must be 1-D")
    buf = io.BytesIO()
    buf.write(IDX_UBYTE_LABELS.to_bytes(4, "big"))
    buf.write(int(arr.shape[0]).to_bytes(4, "big"))
    buf.write(arr.tobytes())
    Path(path).write_bytes(buf.getvalue())


# --------------------------------------------------------------------------
# CSV (index images)
# --------------------------------------------------------------------------


def write_index_csv(path: str | Path, image: IndexImage) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in image.indices:
            writer.writerow(int(v) for v in row)


def read_index_csv(path: str | Path, r_used: int) -> IndexImage:
    with open(path, newline="") as fh:
        rows = [[int(v) for v in row] for row in csv.reader(fh) if row]
    return IndexImage(np.array(rows, dtype=np.int64), r_used)
