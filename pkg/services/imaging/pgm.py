"""PGM (P2 ASCII / P5 binary) reading, writing and binarization."""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from services.svd.errors import (
    MalformedHeader,
    MatrixFormatError,
    TruncatedPixels,
    UnsupportedMagic,
)
from services.svd.matrix_core import DataMatrix

WHITESPACE = b" \t\r\n\v\f"
MAX_MAXVAL = 65535


@dataclass(frozen=True)
class ImageMatrix:
    width: int
    height: int
    maxval: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise MalformedHeader("image size must be positive")
        if not 1 <= self.maxval <= MAX_MAXVAL:
            raise MalformedHeader("maxval {0} outside [1, 65535]".format(self.maxval))
        pixels = np.array(self.pixels, dtype=np.int64)
        if pixels.shape != (self.height, self.width):
            raise MatrixFormatError("pixel array has shape {0}, expected {1}".format(
                pixels.shape, (self.height, self.width)))
        if pixels.size and (pixels.min() < 0 or pixels.max() > self.maxval):
            raise MatrixFormatError("pixel values outside [0, {0}]".format(self.maxval))
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)


def _skip_space_and_comments(data: bytes, pos: int) -> int:
    while pos < len(data):
        ch = data[pos:pos + 1]
        if ch == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
        elif ch in WHITESPACE:
            pos += 1
        else:
            break
    return pos


def _tokens(data: bytes, pos: int, count: int) -> Tuple[List[bytes], int]:
    found = []
    while len(found) < count:
        pos = _skip_space_and_comments(data, pos)
        start = pos
        while pos < len(data) and data[pos:pos + 1] not in WHITESPACE \
                and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            break
        found.append(data[start:pos])
    return found, pos


def _header_int(token: bytes, name: str) -> int:
    try:
        value = int(token.decode("ascii"))
    except (UnicodeDecodeError, ValueError):
        raise MalformedHeader("bad {0} field {1!r}".format(name, token))
    if value < 1:
        raise MalformedHeader("{0} must be positive, got {1}".format(name, value))
    return value


def parse_pgm(data: bytes) -> ImageMatrix:
    magic = data[:2]
    if magic not in (b"P2", b"P5"):
        raise UnsupportedMagic(magic.decode("latin-1"))
    header, pos = _tokens(data, 2, 3)
    if len(header) < 3:
        raise MalformedHeader("header needs width, height and maxval")
    width = _header_int(header[0], "width")
    height = _header_int(header[1], "height")
    maxval = _header_int(header[2], "maxval")
    if maxval > MAX_MAXVAL:
        raise MalformedHeader("maxval {0} exceeds 65535".format(maxval))
    count = width * height

    if magic == b"P5":
        # exactly one whitespace byte separates maxval from the raster
        pos += 1
        dtype = np.dtype(np.uint8) if maxval <= 255 else np.dtype(">u2")
        raster = data[pos:pos + count * dtype.itemsize]
        found = len(raster) // dtype.itemsize
        if found < count:
            raise TruncatedPixels(count, found)
        values = np.frombuffer(raster, dtype=dtype).astype(np.int64)
    else:
        words, _ = _tokens(data, pos, count)
        if len(words) < count:
            raise TruncatedPixels(count, len(words))
        try:
            values = np.array([int(w) for w in words], dtype=np.int64)
        except ValueError:
            raise MatrixFormatError("non-integer pixel in ASCII raster")
    return ImageMatrix(width, height, maxval, values.reshape(height, width))


def write_pgm(img: ImageMatrix, binary: bool = True) -> bytes:
    header = "{0}\n{1} {2}\n{3}\n".format(
        "P5" if binary else "P2", img.width, img.height, img.maxval).encode("ascii")
    if binary:
        dtype = np.uint8 if img.maxval <= 255 else np.dtype(">u2")
        return header + img.pixels.astype(dtype).tobytes()
    lines = [" ".join(str(int(p)) for p in row) for row in img.pixels]
    return header + ("\n".join(lines) + "\n").encode("ascii")


def binarize(img: ImageMatrix, threshold: Optional[int] = None) -> DataMatrix:
    """+1 where pixel >= threshold, -1 elsewhere; rows follow image rows."""
    if threshold is None:
        threshold = int(math.ceil(img.maxval / 2))
    return DataMatrix(np.where(img.pixels >= threshold, 1.0, -1.0))


def to_image(values, maxval: int = 255) -> ImageMatrix:
    """Min-max rescale a real matrix onto [0, maxval]."""
    arr = np.asarray(values, dtype=float)
    lo, hi = float(arr.min()), float(arr.max())
    if hi > lo:
        pixels = np.rint((arr - lo) / (hi - lo) * maxval)
    else:
        pixels = np.full(arr.shape, maxval if lo > 0 else 0)
    return ImageMatrix(arr.shape[1], arr.shape[0], maxval, pixels.astype(np.int64))
