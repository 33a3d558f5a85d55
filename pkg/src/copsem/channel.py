"""Binary symmetric channel and the end-to-end corruption experiment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import QuantizedFamily, dequantize, pack, unpack
from .metrics import d_pc
from .rank_copula import CopulaFamily


@dataclass(frozen=True)
class ChannelConfig:
    """Per-bit flip probability and the RNG seed that fixes the flip mask."""

    ber: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.ber <= 0.5:
            raise ValueError(f"ber must be in [0, 0.5], got {self.ber!r}")


def transmit(data: bytes, cfg: ChannelConfig) -> bytes:
    """Flip each bit independently with probability cfg.ber. Length-preserving,
    deterministic for a fixed seed."""
    if cfg.ber == 0.0 or not data:
        return bytes(data)
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    rng = np.random.default_rng(cfg.seed)
    mask = rng.random(bits.size) < cfg.ber
    return np.packbits(bits ^ mask).tobytes()


def trial_seed(master_seed: int, trial: int) -> int:
    """Counter-based per-trial seed; stable across platforms."""
    ss = np.random.SeedSequence((master_seed, trial))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ChannelExperiment:
    """Monte-Carlo summary of quantize -> pack -> BSC -> unpack -> dequantize."""

    ber: float
    alpha: float
    bits_per_cell: int
    trials: int
    mean_d_pc: float
    std_d_pc: float
    shape_lra: float
    distortions: tuple[float, ...]


def ber_experiment(
    q: QuantizedFamily,
    ber: float,
    trials: int,
    master_seed: int,
) -> ChannelExperiment:
    """Distortion of the corrupted decode against the error-free decode.

    The shape factor L * r * alpha is the predicted scaling shape; the
    proportionality constant in front of it is fitted by the harness, never
    assumed.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    reference = dequantize(q)
    payload = pack(q)
    out = []
    for t in range(trials):
        cfg = ChannelConfig(ber, trial_seed(master_seed, t))
        corrupted = transmit(payload, cfg)
        q2 = unpack(corrupted, q.alpha, q.bins, q.deltas)
        out.append(d_pc(reference, dequantize(q2)).d_pc)
    arr = np.asarray(out)
    return ChannelExperiment(
        ber=ber,
        alpha=q.alpha,
        bits_per_cell=q.bits,
        trials=trials,
        mean_d_pc=float(arr.mean()),
        std_d_pc=float(arr.std()),
        shape_lra=q.bits * ber * q.alpha,
        distortions=tuple(out),
    )


def family_ber_experiment(
    family: CopulaFamily,
    alpha: float,
    ber: float,
    trials: int,
    master_seed: int,
) -> ChannelExperiment:
    from .codec import quantize

    return ber_experiment(quantize(family, alpha), ber, trials, master_seed)
