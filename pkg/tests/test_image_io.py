import numpy as np
import pytest

from copsem.image_io import (
    U8,
    REAL,
    DomainError,
    GrayImage,
    PgmDimensionError,
    PgmHeaderError,
    PgmMaxvalError,
    PgmTruncatedError,
    read_pgm,
    synth_gradient,
    synth_noise,
    write_pgm,
)


def test_roundtrip_noise():
    img = synth_noise(33, 17, 5)
    back = read_pgm(write_pgm(img))
    assert back == img
    assert back.width == 33 and back.height == 17


def test_write_single_pixel_layout():
    img = GrayImage(1, 1, np.zeros((1, 1), dtype=np.uint8))
    data = write_pgm(img)
    assert data == b"P5\n1 1\n255\n\x00"
    assert read_pgm(data) == img


def test_header_comments_skipped():
    data = b"P5\n# made by hand\n2 2\n# another note\n255\n\x01\x02\x03\x04"
    img = read_pgm(data)
    assert img.pixels.tolist() == [[1, 2], [3, 4]]


def test_bad_magic():
    with pytest.raises(PgmHeaderError):
        read_pgm(b"P6\n1 1\n255\n\x00")


def test_bad_maxval():
    with pytest.raises(PgmMaxvalError):
        read_pgm(b"P5\n1 1\n65535\n\x00\x00")


def test_bad_dimensions():
    with pytest.raises(PgmDimensionError):
        read_pgm(b"P5\n0 4\n255\n")


def test_truncated_payload():
    with pytest.raises(PgmTruncatedError):
        read_pgm(b"P5\n2 2\n255\n\x01\x02\x03")


def test_gradient_values():
    img = synth_gradient(4, 3)
    assert img.pixels.tolist() == [
        [0, 23, 46, 70],
        [93, 116, 139, 162],
        [185, 209, 232, 255],
    ]
    assert img.pixels.dtype == np.uint8


def test_gradient_single_pixel():
    assert synth_gradient(1, 1).pixels.tolist() == [[0]]


def test_noise_deterministic():
    a = synth_noise(16, 16, 7)
    b = synth_noise(16, 16, 7)
    assert a == b
    assert a != synth_noise(16, 16, 8)


def test_pixels_not_writeable():
    img = synth_noise(8, 8, 1)
    with pytest.raises(ValueError):
        img.pixels[0, 0] = 3


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        GrayImage(4, 3, np.zeros((4, 3), dtype=np.uint8))


def test_real_domain_accepts_floats():
    img = GrayImage(2, 2, np.array([[0.5, 300.0], [-4.0, 1.0]]), domain=REAL)
    assert img.domain == REAL


def test_u8_domain_rejects_floats():
    with pytest.raises(DomainError):
        GrayImage(2, 2, np.array([[0.5, 1.0], [2.0, 3.0]]), domain=U8)
