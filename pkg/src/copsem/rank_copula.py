"""Rank transform and pairwise empirical copula estimation.

The representation of an image is the family of B x B empirical copulas
of the pairs (u(p), u(p + delta)) over a set of pixel displacements,
where u is the normalized midrank of the pixel value. Ranks depend only
on the order of pixel values, so any strictly increasing pixel-wise map
leaves the family bit-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata

from .image_io import GrayImage

SERIAL_VERSION = 1


class Displacement(NamedTuple):
    """Pixel offset (dx = columns right, dy = rows down)."""

    dx: int
    dy: int


DEFAULT_DELTAS: tuple[Displacement, ...] = (
    Displacement(1, 0),
    Displacement(0, 1),
    Displacement(1, 1),
    Displacement(1, -1),
)
DEFAULT_BINS = 8


class EmptySampleError(ValueError):
    """No valid anchor pairs for the requested displacement and stride."""


@dataclass(frozen=True, eq=False)
class RankField:
    """Normalized midranks u = midrank / (N + 1), all strictly inside (0, 1)."""

    width: int
    height: int
    u: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.u, dtype=np.float64).reshape(self.height, self.width)
        if arr.size == 0:
            raise ValueError("empty rank field")
        if arr.min() <= 0.0 or arr.max() >= 1.0:
            raise ValueError("rank field values must lie strictly inside (0, 1)")
        arr.flags.writeable = False
        object.__setattr__(self, "u", arr)


@dataclass(frozen=True, eq=False)
class EmpiricalCopula:
    """B x B cell masses, nonnegative, summing to 1.

    cells[i, j] is the fraction of anchor pairs whose (u(p), u(p+delta))
    fell in row-bin i and column-bin j. n_pairs = 0 marks a copula that
    is not a direct estimate (e.g. a decoded one).
    """

    bins: int
    cells: np.ndarray
    n_pairs: int

    def __post_init__(self):
        if self.bins < 1:
            raise ValueError(f"bins must be >= 1, got {self.bins}")
        if self.n_pairs < 0:
            raise ValueError("n_pairs must be >= 0")
        arr = np.asarray(self.cells, dtype=np.float64)
        if arr.shape != (self.bins, self.bins):
            raise ValueError(f"cells shape {arr.shape} != ({self.bins}, {self.bins})")
        if arr.min() < 0.0:
            raise ValueError("cell masses must be nonnegative")
        total = float(arr.sum())
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"cell masses sum to {total!r}, expected 1 within 1e-12")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "cells", arr)

    def __eq__(self, other):
        if not isinstance(other, EmpiricalCopula):
            return NotImplemented
        return (
            self.bins == other.bins
            and self.n_pairs == other.n_pairs
            and np.array_equal(self.cells, other.cells)
        )


@dataclass(frozen=True, eq=False)
class CopulaFamily:
    """One empirical copula per displacement, all at the same bin count.

    stride records the anchor sub-sampling used at estimation time;
    stride = 0 marks a family that is not a direct estimate.
    """

    deltas: tuple[Displacement, ...]
    copulas: tuple[EmpiricalCopula, ...]
    stride: int = 1

    def __post_init__(self):
        deltas = tuple(Displacement(*d) for d in self.deltas)
        if not deltas:
            raise ValueError("a family needs at least one displacement")
        if len(set(deltas)) != len(deltas):
            raise ValueError("displacements must be distinct")
        copulas = tuple(self.copulas)
        if len(copulas) != len(deltas):
            raise ValueError("one copula per displacement required")
        bins = {c.bins for c in copulas}
        if len(bins) != 1:
            raise ValueError("all copulas in a family must share the bin count")
        if self.stride < 0:
            raise ValueError("stride must be >= 0")
        object.__setattr__(self, "deltas", deltas)
        object.__setattr__(self, "copulas", copulas)

    @property
    def bins(self) -> int:
        return self.copulas[0].bins

    def __eq__(self, other):
        if not isinstance(other, CopulaFamily):
            return NotImplemented
        return (
            self.deltas == other.deltas
            and self.stride == other.stride
            and all(a == b for a, b in zip(self.copulas, other.copulas))
        )

    def to_json(self) -> str:
        """Serialize with 17-significant-digit reals (exact float round-trip)."""
        cells = [
            "[" + ",".join(format(v, ".17g") for v in c.cells.ravel()) + "]"
            for c in self.copulas
        ]
        head = {
            "version": SERIAL_VERSION,
            "bins": self.bins,
            "stride": self.stride,
            "deltas": [[d.dx, d.dy] for d in self.deltas],
            "n_pairs": [c.n_pairs for c in self.copulas],
        }
        body = json.dumps(head, separators=(",", ":"))
        return body[:-1] + ',"cells":[' + ",".join(cells) + "]}"

    @classmethod
    def from_json(cls, text: str) -> "CopulaFamily":
        doc = json.loads(text)
        if doc.get("version") != SERIAL_VERSION:
            raise ValueError(f"unsupported serialization version {doc.get('version')!r}")
        bins = int(doc["bins"])
        deltas = tuple(Displacement(int(dx), int(dy)) for dx, dy in doc["deltas"])
        copulas = tuple(
            EmpiricalCopula(
                bins,
                np.asarray(cells, dtype=np.float64).reshape(bins, bins),
                int(n),
            )
            for cells, n in zip(doc["cells"], doc["n_pairs"])
        )
        return cls(deltas, copulas, int(doc["stride"]))


def rank_transform(img: GrayImage) -> RankField:
    """Map pixels to u = midrank / (N + 1), midrank = mean rank over ties (1..N)."""
    ranks = rankdata(img.pixels.ravel(), method="average")
    u = ranks / (img.pixels.size + 1)
    return RankField(img.width, img.height, u.reshape(img.height, img.width))


def _anchor_axis(extent: int, offset: int, stride: int) -> np.ndarray:
    lo = max(0, -offset)
    hi = extent - max(0, offset)
    xs = np.arange(0, extent, stride)
    return xs[(xs >= lo) & (xs < hi)]


def extract_copula(
    field: RankField,
    delta: Displacement,
    bins: int = DEFAULT_BINS,
    stride: int = 1,
) -> EmpiricalCopula:
    """Histogram (u(p), u(p + delta)) over the stride-lattice of anchors p.

    Cell (i, j) with i = floor(u(p) * B) and j = floor(u(p+delta) * B), both
    clamped to B - 1, normalized by the pair count. stride = 1 uses every
    valid pair; stride >= 2 * max(|dx|, |dy|) + 1 makes the pairs disjoint
    (no pixel participates twice).
    """
    delta = Displacement(*delta)
    if bins < 2:
        raise ValueError(f"bins must be >= 2 for estimation, got {bins}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if delta == (0, 0):
        raise ValueError("displacement (0, 0) is degenerate")
    xs = _anchor_axis(field.width, delta.dx, stride)
    ys = _anchor_axis(field.height, delta.dy, stride)
    n_pairs = xs.size * ys.size
    if n_pairs == 0:
        raise EmptySampleError(
            f"no valid anchors for delta={tuple(delta)} stride={stride} "
            f"on a {field.width}x{field.height} field"
        )
    a = field.u[np.ix_(ys, xs)].ravel()
    b = field.u[np.ix_(ys + delta.dy, xs + delta.dx)].ravel()
    i = np.minimum((a * bins).astype(np.int64), bins - 1)
    j = np.minimum((b * bins).astype(np.int64), bins - 1)
    counts = np.bincount(i * bins + j, minlength=bins * bins)
    cells = counts.reshape(bins, bins) / n_pairs
    return EmpiricalCopula(bins, cells, int(n_pairs))


def extract_family(
    img: GrayImage,
    deltas: Sequence[Displacement] = DEFAULT_DELTAS,
    bins: int = DEFAULT_BINS,
    stride: int = 1,
) -> CopulaFamily:
    """Rank once globally, then estimate one copula per displacement.

    Per-displacement estimation is independent (order does not matter).
    """
    field = rank_transform(img)
    deltas = tuple(Displacement(*d) for d in deltas)
    copulas = tuple(extract_copula(field, d, bins, stride) for d in deltas)
    return CopulaFamily(deltas, copulas, stride)


def coarsen(copula: EmpiricalCopula, factor: int) -> EmpiricalCopula:
    """Merge factor x factor blocks of cells. factor must divide bins."""
    if factor < 2:
        raise ValueError(f"factor must be >= 2, got {factor}")
    if copula.bins % factor != 0:
        raise ValueError(f"factor {factor} does not divide bins {copula.bins}")
    nb = copula.bins // factor
    merged = copula.cells.reshape(nb, factor, nb, factor).sum(axis=(1, 3))
    return EmpiricalCopula(nb, merged, copula.n_pairs)


def non_overlapping_stride(deltas: Sequence[Displacement]) -> int:
    """Smallest lattice stride at which no pixel appears in two pairs."""
    m = max(max(abs(d[0]), abs(d[1])) for d in deltas)
    return 2 * m + 1
