"""Structural distortion metric and pixel-domain baselines.

The structural metric between two images is the mean, over displacements,
of the square root of the Jensen-Shannon divergence (natural log) between
their empirical copulas. sqrt(JS) is a true metric, bounded by sqrt(ln 2),
so the mean over a fixed displacement set is one too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image_io import U8, GrayImage
from .rank_copula import CopulaFamily, Displacement

LN2 = math.log(2.0)
SQRT_LN2 = math.sqrt(LN2)

SSIM_C1 = (0.01 * 255.0) ** 2
SSIM_C2 = (0.03 * 255.0) ** 2
SSIM_WINDOW = 8


class IncomparableFamiliesError(ValueError):
    """Families differ in displacement set or bin count."""


def _as_dist(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError(f"{name}: empty distribution")
    if arr.min() < 0.0:
        raise ValueError(f"{name}: negative mass")
    total = float(arr.sum())
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"{name}: masses sum to {total!r}, expected 1 within 1e-12")
    return arr


def js_divergence(p, q) -> float:
    """Jensen-Shannon divergence in nats, with the 0 * log 0 = 0 convention.

    JS(P, Q) = KL(P || M) / 2 + KL(Q || M) / 2 with M = (P + Q) / 2.
    Symmetric, and bounded by ln 2 (attained on disjoint supports). The
    total-variation comparison JS <= ln(2) * TV(P, Q) holds for every pair
    and is tight exactly on disjoint supports.
    """
    p = _as_dist(p, "p")
    q = _as_dist(q, "q")
    if p.size != q.size:
        raise ValueError(f"length mismatch: {p.size} vs {q.size}")
    m = 0.5 * (p + q)
    pm = p > 0.0
    qm = q > 0.0
    js = 0.5 * float(np.sum(p[pm] * np.log(p[pm] / m[pm]))) + 0.5 * float(
        np.sum(q[qm] * np.log(q[qm] / m[qm]))
    )
    # clamp the last-ulp float residue; mathematically 0 <= JS <= ln 2
    return min(max(js, 0.0), LN2)


def l1_distance(p, q) -> float:
    p = _as_dist(p, "p")
    q = _as_dist(q, "q")
    if p.size != q.size:
        raise ValueError(f"length mismatch: {p.size} vs {q.size}")
    return float(np.abs(p - q).sum())


def tv_distance(p, q) -> float:
    """Total variation = half the L1 distance."""
    return 0.5 * l1_distance(p, q)


@dataclass(frozen=True)
class DistortionReport:
    """Per-displacement JS terms and their aggregate.

    per_delta holds (displacement, js, sqrt_js); d_pc is the mean of the
    sqrt_js column.
    """

    per_delta: tuple[tuple[Displacement, float, float], ...]
    d_pc: float

    def __post_init__(self):
        if not self.per_delta:
            raise ValueError("empty report")
        mean = sum(r[2] for r in self.per_delta) / len(self.per_delta)
        if abs(mean - self.d_pc) > 1e-12:
            raise ValueError("d_pc must equal the mean of the sqrt_js column")
        if self.d_pc < 0.0 or self.d_pc > SQRT_LN2 + 1e-12:
            raise ValueError(f"d_pc {self.d_pc!r} outside [0, sqrt(ln 2)]")


def d_pc(a: CopulaFamily, b: CopulaFamily) -> DistortionReport:
    """Mean over displacements of sqrt(JS) between paired copulas."""
    if a.deltas != b.deltas or a.bins != b.bins:
        raise IncomparableFamiliesError(
            f"families not comparable: deltas {a.deltas} vs {b.deltas}, "
            f"bins {a.bins} vs {b.bins}"
        )
    rows = []
    for delta, ca, cb in zip(a.deltas, a.copulas, b.copulas):
        js = js_divergence(ca.cells, cb.cells)
        rows.append((delta, js, math.sqrt(js)))
    mean = sum(r[2] for r in rows) / len(rows)
    return DistortionReport(tuple(rows), mean)


def _check_u8_pair(a: GrayImage, b: GrayImage):
    if a.domain != U8 or b.domain != U8:
        raise ValueError("pixel-domain baselines require u8 images")
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def psnr(a: GrayImage, b: GrayImage) -> float:
    """10 * log10(255^2 / MSE) in dB; math.inf when the images are identical.

    The infinity is an in-memory sentinel only. Serialized output writes
    the string "inf" instead of a floating-point infinity.
    """
    _check_u8_pair(a, b)
    diff = a.pixels.astype(np.float64) - b.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / mse)


def ssim(a: GrayImage, b: GrayImage) -> float:
    """Mean SSIM over non-overlapping 8x8 windows, no Gaussian weighting.

    Window statistics use population moments. Images smaller than the
    window in either direction are treated as a single window; otherwise
    partial border strips are dropped.
    """
    _check_u8_pair(a, b)
    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)
    h, w = x.shape
    k = SSIM_WINDOW
    if h < k or w < k:
        wins_x = [x]
        wins_y = [y]
    else:
        bh, bw = h // k, w // k
        xb = x[: bh * k, : bw * k].reshape(bh, k, bw, k).transpose(0, 2, 1, 3)
        yb = y[: bh * k, : bw * k].reshape(bh, k, bw, k).transpose(0, 2, 1, 3)
        wins_x = xb.reshape(-1, k, k)
        wins_y = yb.reshape(-1, k, k)
    vals = []
    for wx, wy in zip(wins_x, wins_y):
        mx, my = wx.mean(), wy.mean()
        vx, vy = wx.var(), wy.var()
        cov = ((wx - mx) * (wy - my)).mean()
        num = (2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2)
        den = (mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2)
        vals.append(num / den)
    return float(np.mean(vals))


def format_float(x: float) -> str:
    """Deterministic CSV float form; shortest exact round-trip, 'inf' sentinel."""
    if math.isinf(x):
        return "inf"
    return repr(float(x))


def report_csv_header(deltas: tuple[Displacement, ...]) -> list[str]:
    cols = ["image_a", "image_b"]
    cols += [f"sqrt_js_{d.dx}_{d.dy}" for d in deltas]
    cols += ["d_pc", "psnr", "ssim"]
    return cols


def report_csv_row(
    name_a: str,
    name_b: str,
    report: DistortionReport,
    psnr_db: float | None = None,
    ssim_val: float | None = None,
) -> list[str]:
    row = [name_a, name_b]
    row += [format_float(r[2]) for r in report.per_delta]
    row.append(format_float(report.d_pc))
    row.append("" if psnr_db is None else format_float(psnr_db))
    row.append("" if ssim_val is None else format_float(ssim_val))
    return row
