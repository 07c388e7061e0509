import math

import numpy as np
import pytest

from topocode.channel import (
    LINE_SUBSET,
    NOISELESS,
    PIXEL_SUBSET,
    ChannelConfig,
    NoisePattern,
    awgn,
    bits_to_bytes,
    bpsk_modulate,
    bytes_to_bits,
    demodulate,
    noise_sigma,
    selected_pixels,
    split_seed,
    transmit_bytes,
    transmit_image,
    transmit_packet,
    uncoded_ber,
)
from topocode.codec import corruptible_mask, decode_packet, encode_packet
from topocode.homology import GrayImage, PersistenceDiagram


def test_modulation_conventions():
    np.testing.assert_array_equal(bpsk_modulate([1, 0, 1]), [-1, 1, -1])
    assert bpsk_modulate([]).size == 0
    np.testing.assert_array_equal(demodulate([-0.2, 0.9]), [1, 0])
    np.testing.assert_array_equal(demodulate([0.0]), [0])
    bits = np.random.default_rng(0).integers(0, 2, 500)
    np.testing.assert_array_equal(demodulate(bpsk_modulate(bits)), bits)


def test_noise_disabled_and_seeded_determinism():
    x = bpsk_modulate(np.random.default_rng(1).integers(0, 2, 100))
    np.testing.assert_array_equal(awgn(x, NOISELESS), x)
    np.testing.assert_array_equal(awgn(x, 3.0, seed=42), awgn(x, 3.0, seed=42))
    assert not np.array_equal(awgn(x, 3.0, seed=42), awgn(x, 3.0, seed=43))


def test_noise_variance():
    assert noise_sigma(0.0) == pytest.approx(math.sqrt(0.5))
    y = awgn(np.zeros(200_000), 3.0, seed=0)
    assert y.var() == pytest.approx(0.5 * 10 ** -0.3, rel=0.02)


def test_ber_at_three_db():
    assert uncoded_ber(3.0) == pytest.approx(0.0229, abs=1e-4)
    bits = np.zeros(1_000_000, dtype=np.uint8)
    ber = demodulate(awgn(bpsk_modulate(bits), 3.0, seed=3)).mean()
    assert abs(ber - uncoded_ber(3.0)) <= 0.05 * uncoded_ber(3.0)


def test_bit_packing_is_msb_first():
    np.testing.assert_array_equal(bytes_to_bits([0x80, 0x01]), [1, 0, 0, 0, 0, 0, 0, 0,
                                                                0, 0, 0, 0, 0, 0, 0, 1])
    data = np.arange(256, dtype=np.uint8)
    np.testing.assert_array_equal(bits_to_bytes(bytes_to_bits(data)), data)


def test_split_seed_is_deterministic_and_distinct():
    assert split_seed(0, 1, 2) == split_seed(0, 1, 2)
    assert len({split_seed(0, i, j) for i in range(20) for j in range(5)}) == 100


def test_noise_locality_for_pixel_subset():
    raw = np.full((28, 28), 170, np.uint8)
    cfg = ChannelConfig(-3.0, seed=5, pattern=NoisePattern(PIXEL_SUBSET, 0.25))
    out = transmit_bytes(raw, cfg)
    chosen = selected_pixels(raw.shape, cfg.pattern, np.random.default_rng(5))
    assert len(chosen) == math.ceil(0.25 * 784)
    untouched = np.ones(784, bool)
    untouched[chosen] = False
    np.testing.assert_array_equal(out.ravel()[untouched], raw.ravel()[untouched])
    assert np.any(out.ravel()[chosen] != 170)


def test_line_subset_hits_whole_rows_or_columns():
    shape = (28, 28)
    pat = NoisePattern(LINE_SUBSET, count=2)
    pix = selected_pixels(shape, pat, np.random.default_rng(0))
    mask = np.zeros(784, bool)
    mask[pix] = True
    mask = mask.reshape(shape)
    full_rows = mask.all(axis=1).sum()
    full_cols = mask.all(axis=0).sum()
    assert full_rows + full_cols == 2
    pinned = selected_pixels(shape, NoisePattern(LINE_SUBSET, lines=(0, 28 + 27)), None)
    assert set(pinned) == set(range(28)) | set(range(27, 784, 28))
    frac = selected_pixels(shape, NoisePattern(LINE_SUBSET, 0.1), np.random.default_rng(1))
    assert len(frac) >= 6 * 28 - 9  # ceil(0.1 * 56) = 6 lines, crossings counted once


def test_transmit_image_noise_disabled_is_identity_after_normalization():
    img = GrayImage(np.random.default_rng(2).integers(0, 256, (8, 8)) / 255.0)
    cfg = ChannelConfig(NOISELESS, seed=1)
    out = transmit_image(img, cfg)
    np.testing.assert_allclose(out.pixels, img.to_bytes() / img.to_bytes().max())


def test_transmit_image_is_deterministic():
    img = GrayImage(np.random.default_rng(2).uniform(0, 1, (8, 8)))
    cfg = ChannelConfig(1.0, seed=9, pattern=NoisePattern(LINE_SUBSET, count=2))
    assert transmit_image(img, cfg) == transmit_image(img, cfg)


def test_packet_headers_survive_heavy_noise():
    d = PersistenceDiagram.from_pairs({0: [(0.1, 0.9)]}, {0: [0.0]})
    pkt = encode_packet(np.zeros((6, 6), np.uint8), d)
    rx = transmit_packet(pkt, ChannelConfig(-5.0), corruptible_mask(pkt), np.random.default_rng(0))
    assert rx[:11] == pkt[:11] and rx != pkt
    decode_packet(rx)  # structure intact, only values changed


def test_config_validation():
    with pytest.raises(ValueError):
        NoisePattern(PIXEL_SUBSET, 1.5)
    with pytest.raises(ValueError):
        NoisePattern("bursty")
    with pytest.raises(ValueError):
        ChannelConfig(float("nan"))
