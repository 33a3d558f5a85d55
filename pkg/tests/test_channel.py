import numpy as np
import pytest
from hypothesis import given, strategies as st

from copsem.channel import (
    ChannelConfig,
    ber_experiment,
    family_ber_experiment,
    transmit,
    trial_seed,
)
from copsem.codec import pack, quantize, unpack

from conftest import make_family


def test_ber_range_validated():
    with pytest.raises(ValueError):
        ChannelConfig(0.6, 1)
    with pytest.raises(ValueError):
        ChannelConfig(-0.1, 1)


def test_zero_ber_is_identity(rng):
    data = rng.integers(0, 256, 200, dtype=np.uint8).tobytes()
    assert transmit(data, ChannelConfig(0.0, 99)) == data


def test_half_ber_flip_fraction():
    data = bytes(125_000)  # 10^6 zero bits
    out = transmit(data, ChannelConfig(0.5, 2024))
    flipped = int(np.unpackbits(np.frombuffer(out, dtype=np.uint8)).sum())
    assert abs(flipped / 1e6 - 0.5) < 0.002


def test_transmit_deterministic(rng):
    data = rng.integers(0, 256, 64, dtype=np.uint8).tobytes()
    cfg = ChannelConfig(0.1, 31337)
    assert transmit(data, cfg) == transmit(data, cfg)
    assert transmit(data, ChannelConfig(0.1, 31338)) != transmit(data, cfg)


@given(st.binary(min_size=0, max_size=300), st.sampled_from([0.0, 0.01, 0.3, 0.5]))
def test_transmit_preserves_length(data, ber):
    assert len(transmit(data, ChannelConfig(ber, 5))) == len(data)


def test_trial_seeds_distinct():
    seeds = {trial_seed(42, t) for t in range(1000)}
    assert len(seeds) == 1000
    assert trial_seed(42, 7) == trial_seed(42, 7)
    assert trial_seed(42, 7) != trial_seed(43, 7)


def test_experiment_zero_ber(rng):
    q = quantize(make_family(rng), 1 / 64)
    exp = ber_experiment(q, 0.0, 5, 17)
    assert exp.mean_d_pc == 0.0
    assert exp.std_d_pc == 0.0


def test_experiment_deterministic(rng):
    q = quantize(make_family(rng), 1 / 64)
    a = ber_experiment(q, 1e-3, 20, 555)
    b = ber_experiment(q, 1e-3, 20, 555)
    assert a.distortions == b.distortions
    assert a.mean_d_pc == b.mean_d_pc


def test_experiment_shape_factor(rng):
    q = quantize(make_family(rng), 1 / 64)
    exp = ber_experiment(q, 1e-3, 5, 9)
    assert exp.bits_per_cell == 7
    assert abs(exp.shape_lra - 7 * 1e-3 / 64) < 1e-18


def test_mean_grows_with_ber(rng):
    fam = make_family(rng)
    lo = family_ber_experiment(fam, 1 / 64, 1e-3, 100, 1001)
    hi = family_ber_experiment(fam, 1 / 64, 1e-2, 100, 1002)
    assert 0.0 < lo.mean_d_pc < hi.mean_d_pc


def test_corrupted_roundtrip_still_decodes(rng):
    fam = make_family(rng)
    q = quantize(fam, 1 / 64)
    noisy = transmit(pack(q), ChannelConfig(0.05, 4))
    back = unpack(noisy, 1 / 64, 8, fam.deltas)
    for idx in back.indices:
        assert int(idx.max()) < q.levels
