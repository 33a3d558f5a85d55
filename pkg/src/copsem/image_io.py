"""Grayscale image container, binary PGM (P5) I/O, and synthetic sources.

Images live in one of two pixel domains: 8-bit integers ("u8", the only
domain that can be persisted) or unbounded reals ("real", produced by
real-valued transforms and consumed by the rank pipeline, which only
looks at order). Persisting a real image requires an explicit
requantization step (see transforms.requantize).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

U8 = "u8"
REAL = "real"


class PgmError(ValueError):
    """Malformed PGM stream."""


class PgmHeaderError(PgmError):
    """Bad magic or non-integer header token."""


class PgmDimensionError(PgmError):
    """Width or height below 1."""


class PgmMaxvalError(PgmError):
    """Maxval outside [1, 255]; 16-bit PGM is out of scope."""


class PgmTruncatedError(PgmError):
    """Payload shorter than width * height."""


class DomainError(ValueError):
    """Operation applied to an image in the wrong pixel domain."""


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Single-channel image. pixels is a (height, width) row-major array."""

    width: int
    height: int
    pixels: np.ndarray
    domain: str = U8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"dimensions must be >= 1, got {self.width}x{self.height}")
        if self.domain not in (U8, REAL):
            raise ValueError(f"unknown pixel domain {self.domain!r}")
        px = np.asarray(self.pixels)
        if px.ndim >= 2 and px.shape != (self.height, self.width):
            # a mis-oriented 2-D array would survive a bare size check and
            # be silently reshaped into scrambled rows
            raise ValueError(
                f"pixel array shape {px.shape} does not match "
                f"(height, width) = ({self.height}, {self.width})"
            )
        if px.size != self.width * self.height:
            raise ValueError(
                f"pixel count {px.size} does not match {self.width}x{self.height}"
            )
        px = px.reshape(self.height, self.width)
        if self.domain == U8:
            arr = np.asarray(px)
            if not np.issubdtype(arr.dtype, np.integer):
                if not np.all(arr == np.round(arr)):
                    raise DomainError("u8 image requires integer pixel values")
            if arr.min() < 0 or arr.max() > 255:
                raise DomainError("u8 image requires pixel values in [0, 255]")
            px = px.astype(np.uint8)
        else:
            px = px.astype(np.float64)
            if not np.all(np.isfinite(px)):
                raise ValueError("real image requires finite pixel values")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


def read_pgm(data: bytes) -> GrayImage:
    """Parse a binary (P5) PGM byte stream into a u8 GrayImage.

    Header comments (lines starting with '#') are skipped. Exactly one
    whitespace byte separates the maxval token from the payload.
    """
    if not data.startswith(b"P5"):
        raise PgmHeaderError("not a binary PGM stream (magic != P5)")
    pos = 2
    tokens: list[int] = []
    n = len(data)
    while len(tokens) < 3:
        while pos < n and data[pos : pos + 1].isspace():
            pos += 1
        if pos < n and data[pos : pos + 1] == b"#":
            while pos < n and data[pos] not in (0x0A, 0x0D):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos : pos + 1].isspace():
            pos += 1
        tok = data[start:pos]
        if not tok:
            raise PgmHeaderError("header ended before width/height/maxval")
        try:
            tokens.append(int(tok))
        except ValueError:
            raise PgmHeaderError(f"non-integer header token {tok!r}") from None
    if pos >= n or not data[pos : pos + 1].isspace():
        raise PgmHeaderError("missing whitespace after maxval")
    pos += 1
    width, height, maxval = tokens
    if width < 1 or height < 1:
        raise PgmDimensionError(f"invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 255:
        raise PgmMaxvalError(f"maxval {maxval} outside [1, 255]")
    payload = data[pos : pos + width * height]
    if len(payload) < width * height:
        raise PgmTruncatedError(
            f"payload holds {len(payload)} bytes, needs {width * height}"
        )
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(width, height, px.copy(), U8)


def write_pgm(img: GrayImage) -> bytes:
    """Serialize a u8 GrayImage to canonical binary PGM bytes."""
    if img.domain != U8:
        raise DomainError("only u8 images can be written; requantize first")
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def synth_gradient(width: int, height: int) -> GrayImage:
    """Raster ramp: pixel k of N is round(k * 255 / (N - 1)).

    Strictly increasing in raster order (all values distinct) whenever
    width * height <= 256.
    """
    n = width * height
    if n == 1:
        px = np.zeros((1, 1), dtype=np.uint8)
    else:
        px = np.round(np.arange(n) * 255.0 / (n - 1)).astype(np.uint8)
    return GrayImage(width, height, px.reshape(height, width), U8)


def synth_noise(width: int, height: int, seed: int) -> GrayImage:
    """Reproducible uniform byte noise."""
    rng = np.random.default_rng(seed)
    px = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
    return GrayImage(width, height, px, U8)
