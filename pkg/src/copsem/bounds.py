"""Closed-form design bounds for the copula pipeline.

Every formula here is a calculator over explicit parameters; the harness
checks each one against Monte-Carlo measurement. Infeasible design queries
return None rather than raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .metrics import LN2, SQRT_LN2

ENC_BOUND_COEFF = SQRT_LN2 / 4.0


@dataclass(frozen=True)
class ConcentrationParams:
    """Geometry and targets of the estimation concentration guarantee."""

    bins: int
    n_deltas: int
    t: float
    eta: float

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.n_deltas < 1:
            raise ValueError(f"n_deltas must be >= 1, got {self.n_deltas}")
        if self.t <= 0.0:
            raise ValueError(f"t must be > 0, got {self.t!r}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must be in (0, 1), got {self.eta!r}")


def sample_complexity(params: ConcentrationParams) -> int:
    """Disjoint pairs sufficient for mean L1 copula error <= t except with
    probability eta: ceil((2 / t^2) * ln(2^(B^2) * |deltas| / eta))."""
    b2 = params.bins * params.bins
    n = (2.0 / (params.t * params.t)) * (
        b2 * LN2 + math.log(params.n_deltas) + math.log(1.0 / params.eta)
    )
    return int(math.ceil(n))


def est_distortion_from_samples(n_eff: int, params: ConcentrationParams) -> float:
    """Invert sample_complexity: the sqrt-JS estimation budget eps_est that
    n_eff disjoint pairs buy. The L1 radius t is converted to sqrt-JS by
    the small-perturbation rate (sqrt(ln 2) / 2) * t, a budget convention
    (the conversion is not a pointwise bound for arbitrary pairs)."""
    if n_eff < 1:
        raise ValueError(f"n_eff must be >= 1, got {n_eff}")
    b2 = params.bins * params.bins
    t = math.sqrt(
        2.0 * (b2 * LN2 + math.log(params.n_deltas) + math.log(1.0 / params.eta)) / n_eff
    )
    return (SQRT_LN2 / 2.0) * t


def rate_achievability(n_deltas: int, bins: int, alpha: float) -> float:
    """Bits sufficient at step alpha: |deltas| * (B^2 - 1) * log2(1 / alpha)."""
    if n_deltas < 1 or bins < 2:
        raise ValueError("need n_deltas >= 1 and bins >= 2")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    return n_deltas * (bins * bins - 1) * math.log2(1.0 / alpha)


def enc_distortion_bound(bins: int, alpha: float) -> float:
    """Worst-case encoder distortion at step alpha: (sqrt(ln 2) / 4) * B^2 * alpha."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must be in (0, 1], got {alpha!r}")
    return ENC_BOUND_COEFF * bins * bins * alpha


def rate_converse(n_deltas: int, bins: int, eps_enc: float, c: float = 1.0) -> float:
    """Bits necessary for encoder distortion eps_enc:
    c * |deltas| * (B^2 - 1) * log2(1 / eps_enc), additive slack taken as 0."""
    if n_deltas < 1 or bins < 2:
        raise ValueError("need n_deltas >= 1 and bins >= 2")
    if not 0.0 < eps_enc < 1.0:
        raise ValueError(f"eps_enc must be in (0, 1), got {eps_enc!r}")
    if c <= 0.0:
        raise ValueError(f"c must be > 0, got {c!r}")
    return c * n_deltas * (bins * bins - 1) * math.log2(1.0 / eps_enc)


@dataclass(frozen=True)
class SlaBudget:
    """Additive stage budgets and their confidence slacks."""

    eps_est: float
    eps_enc: float
    eps_dec: float
    eta_est: float = 0.0
    eta_dec: float = 0.0

    def __post_init__(self):
        for name in ("eps_est", "eps_enc", "eps_dec", "eta_est", "eta_dec"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        if self.eta_est + self.eta_dec >= 1.0:
            raise ValueError("eta_est + eta_dec must be < 1")


class SlaResult(NamedTuple):
    eps_total: float
    delta_sla: float


def sla_compose(budget: SlaBudget) -> SlaResult:
    """Chain the three stages: distortions add (triangle inequality twice),
    failure probabilities add (union bound)."""
    return SlaResult(
        budget.eps_est + budget.eps_enc + budget.eps_dec,
        budget.eta_est + budget.eta_dec,
    )


@dataclass(frozen=True)
class DecoderModel:
    """Geometric decode-compute model: error after T steps is rho^T * delta0."""

    rho: float
    delta0: float

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho!r}")
        if self.delta0 <= 0.0:
            raise ValueError(f"delta0 must be > 0, got {self.delta0!r}")

    def error(self, t: float) -> float:
        if t < 0.0:
            raise ValueError(f"compute budget must be >= 0, got {t!r}")
        return (self.rho**t) * self.delta0


@dataclass(frozen=True)
class EncoderModel:
    """Exponential rate model: error at R bits is c2 * 2^(-R / d),
    with d = |deltas| * (B^2 - 1) for the nominal geometry."""

    c2: float
    d: int

    def __post_init__(self):
        if self.c2 <= 0.0:
            raise ValueError(f"c2 must be > 0, got {self.c2!r}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")

    def error(self, rate: float) -> float:
        if rate < 0.0:
            raise ValueError(f"rate must be >= 0, got {rate!r}")
        return self.c2 * 2.0 ** (-rate / self.d)


def _headroom(eps: float, eps_est: float, stage_error: float) -> float | None:
    if eps <= eps_est:
        raise ValueError("eps must exceed eps_est")
    h = eps - eps_est - stage_error
    if h <= 0.0:
        return None
    return h


def r_min(
    t_budget: float,
    eps: float,
    eps_est: float,
    dec: DecoderModel,
    enc: EncoderModel,
) -> float | None:
    """Fewest bits meeting the end-to-end target eps at compute budget T.

    None when the target is infeasible at any rate (the estimation and
    decode stages already exhaust the budget)."""
    h = _headroom(eps, eps_est, dec.error(t_budget))
    if h is None:
        return None
    return max(0.0, enc.d * math.log2(enc.c2 / h))


def t_min(
    rate: float,
    eps: float,
    eps_est: float,
    dec: DecoderModel,
    enc: EncoderModel,
) -> float | None:
    """Least compute budget meeting eps at the given rate; None if infeasible."""
    h = _headroom(eps, eps_est, enc.error(rate))
    if h is None:
        return None
    return max(0.0, math.log(dec.delta0 / h) / math.log(1.0 / dec.rho))


def sla_surface(
    r_grid: Sequence[float],
    t_grid: Sequence[float],
    eps_est: float,
    dec: DecoderModel,
    enc: EncoderModel,
) -> np.ndarray:
    """Achievable end-to-end distortion eps(R, T) = eps_est + enc.error(R)
    + dec.error(T), shaped (len(r_grid), len(t_grid))."""
    if len(r_grid) == 0 or len(t_grid) == 0:
        raise ValueError("empty grid")
    if eps_est < 0.0:
        raise ValueError(f"eps_est must be >= 0, got {eps_est!r}")
    rs = np.asarray(r_grid, dtype=np.float64)
    ts = np.asarray(t_grid, dtype=np.float64)
    if rs.min() < 0.0 or ts.min() < 0.0:
        raise ValueError("grids must be nonnegative")
    enc_err = enc.c2 * 2.0 ** (-rs / enc.d)
    dec_err = (dec.rho**ts) * dec.delta0
    return eps_est + enc_err[:, None] + dec_err[None, :]


def fit_encoder_model(
    rates: Sequence[float],
    distortions: Sequence[float],
    d: int | None = None,
) -> tuple[float, float, float]:
    """Least-squares fit of log2(distortion) = log2(c2) - rate / d_eff.

    Zero-distortion points are excluded. With d given, only the intercept is
    fitted at the fixed slope. Returns (c2, d_eff, r_squared)."""
    r = np.asarray(rates, dtype=np.float64)
    dist = np.asarray(distortions, dtype=np.float64)
    keep = dist > 0.0
    r, dist = r[keep], dist[keep]
    if r.size < 2:
        raise ValueError("need at least two positive-distortion points")
    y = np.log2(dist)
    if d is None:
        slope, intercept = np.polyfit(r, y, 1)
        if slope >= 0.0:
            raise ValueError("distortion does not decay with rate; no valid fit")
        d_eff = -1.0 / slope
    else:
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        slope = -1.0 / d
        intercept = float(np.mean(y - slope * r))
        d_eff = float(d)
    pred = intercept + slope * r
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(2.0**intercept), float(d_eff), r2
