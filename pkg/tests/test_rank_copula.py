import json
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, strategies as st

from copsem.image_io import REAL, GrayImage, synth_gradient, synth_noise
from copsem.rank_copula import (
    DEFAULT_DELTAS,
    CopulaFamily,
    Displacement,
    EmptySampleError,
    EmpiricalCopula,
    coarsen,
    extract_copula,
    extract_family,
    non_overlapping_stride,
    rank_transform,
)

RIGHT = Displacement(1, 0)
DOWN = Displacement(0, 1)


def as_image(values) -> GrayImage:
    px = np.asarray(values, dtype=np.uint8)
    return GrayImage(px.shape[1], px.shape[0], px)


def test_rank_midrank_values():
    img = GrayImage(4, 1, np.array([[5.0, 7.0, 7.0, 9.0]]), domain=REAL)
    field = rank_transform(img)
    assert field.u.tolist() == [[0.2, 0.5, 0.5, 0.8]]


def test_rank_constant_image():
    field = rank_transform(as_image(np.full((3, 3), 42)))
    assert np.all(field.u == 0.5)


def test_rank_open_interval(rng):
    field = rank_transform(as_image(rng.integers(0, 256, (13, 9))))
    assert np.all(field.u > 0.0) and np.all(field.u < 1.0)


def test_copula_two_by_two():
    fam = extract_family(as_image([[1, 2], [3, 4]]), deltas=(RIGHT,), bins=2)
    cop = fam.copulas[0]
    assert cop.cells.tolist() == [[0.5, 0.0], [0.0, 0.5]]
    assert cop.n_pairs == 2


def test_copula_empty_sample():
    field = rank_transform(as_image([[1], [2], [3]]))
    with pytest.raises(EmptySampleError):
        extract_copula(field, RIGHT, bins=2)


def test_copula_iid_uniform_cells():
    img = synth_noise(1024, 1024, 314)
    cop = extract_family(img, deltas=(RIGHT,), bins=4).copulas[0]
    assert np.abs(cop.cells - 1.0 / 16).max() < 0.005


def test_constant_image_point_mass():
    fam = extract_family(as_image(np.full((5, 5), 9)), deltas=(RIGHT,), bins=8)
    cells = fam.copulas[0].cells
    # every pair lands in the middle bin: u = 0.5 -> bin 4
    assert cells[4, 4] == 1.0
    assert cells.sum() == 1.0


MONOTONE_MAPS = (
    lambda x: 3.0 * x + 11.0,
    lambda x: (x / 255.0) ** 0.5,
    lambda x: (x / 255.0) ** 3,
    lambda x: np.exp(x / 64.0),
)


@given(seed=st.integers(0, 2**32 - 1), map_idx=st.integers(0, 3))
def test_monotone_invariance(seed, map_idx):
    img = synth_noise(24, 18, seed)
    remap = GrayImage(
        24, 18, MONOTONE_MAPS[map_idx](img.pixels.astype(float)), domain=REAL
    )
    fa = extract_family(img, bins=8)
    fb = extract_family(remap, bins=8)
    for ca, cb in zip(fa.copulas, fb.copulas):
        assert np.array_equal(ca.cells, cb.cells)


def test_marginal_uniformity_all_distinct(rng):
    perm = rng.permutation(256).astype(np.uint8).reshape(16, 16)
    fam = extract_family(GrayImage(16, 16, perm), bins=8)
    for cop in fam.copulas:
        bound = 8.0 / cop.n_pairs + 8.0 / 256.0
        for axis in (0, 1):
            marg = cop.cells.sum(axis=axis)
            assert np.abs(marg - 1.0 / 8).max() <= 2.0 * bound


def test_translation_consistency():
    big = synth_noise(512, 256, 424242)
    left = GrayImage(256, 256, big.pixels[:, :256].copy())
    right = GrayImage(256, 256, big.pixels[:, 256:].copy())
    fl = extract_family(left)
    fr = extract_family(right)
    for a, b in zip(fl.copulas, fr.copulas):
        assert np.abs(a.cells - b.cells).sum() < 0.05


def test_non_overlapping_stride():
    assert non_overlapping_stride(DEFAULT_DELTAS) == 3
    assert non_overlapping_stride((Displacement(2, 0),)) == 5


def test_strided_extraction_counts():
    img = synth_noise(32, 32, 4)
    dense = extract_family(img, deltas=(RIGHT,), bins=4, stride=1)
    sparse = extract_family(img, deltas=(RIGHT,), bins=4, stride=3)
    assert dense.copulas[0].n_pairs == 32 * 31
    assert sparse.copulas[0].n_pairs == 11 * 11
    assert sparse.stride == 3


def test_family_validation():
    img = synth_noise(8, 8, 0)
    with pytest.raises(ValueError):
        extract_family(img, deltas=(RIGHT, RIGHT), bins=4)
    with pytest.raises(ValueError):
        extract_family(img, deltas=(), bins=4)


def test_coarsen_blocks():
    img = synth_noise(64, 64, 12)
    cop = extract_family(img, deltas=(RIGHT,), bins=8).copulas[0]
    half = coarsen(cop, 2)
    assert half.bins == 4
    assert abs(half.cells.sum() - 1.0) < 1e-12
    assert abs(half.cells[0, 0] - cop.cells[:2, :2].sum()) < 1e-15
    single = coarsen(coarsen(half, 2), 2)
    assert single.bins == 1 and abs(single.cells[0, 0] - 1.0) < 1e-12


def test_coarsen_bad_factor():
    cop = EmpiricalCopula(8, np.full((8, 8), 1.0 / 64), 0)
    with pytest.raises(ValueError):
        coarsen(cop, 3)
    with pytest.raises(ValueError):
        coarsen(cop, 1)


def test_serialization_roundtrip():
    fam = extract_family(synth_noise(40, 30, 77), bins=8, stride=2)
    doc = fam.to_json()
    back = CopulaFamily.from_json(doc)
    assert back.deltas == fam.deltas
    assert back.stride == fam.stride
    for a, b in zip(back.copulas, fam.copulas):
        assert np.array_equal(a.cells, b.cells)
        assert a.n_pairs == b.n_pairs
    payload = json.loads(doc)
    assert payload["version"] == 1
    assert len(payload["cells"][0]) == 64


def test_serial_matches_threaded():
    img = synth_noise(50, 50, 3)
    field = rank_transform(img)
    serial = [extract_copula(field, d, 8) for d in DEFAULT_DELTAS]
    with ThreadPoolExecutor(max_workers=4) as pool:
        threaded = list(pool.map(lambda d: extract_copula(field, d, 8), DEFAULT_DELTAS))
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.cells, b.cells)


def test_gradient_family_smoke():
    fam = extract_family(synth_gradient(16, 16))
    assert len(fam.copulas) == 4
    for cop in fam.copulas:
        assert abs(cop.cells.sum() - 1.0) < 1e-12
