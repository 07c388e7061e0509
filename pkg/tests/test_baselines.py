import numpy as np
import pytest

from topocode.baselines import (
    ConvCode,
    LdpcCode,
    conv_encode,
    conv_length,
    ldpc_decode,
    ldpc_encode,
    ldpc_length,
    viterbi_decode,
)
from topocode.channel import bpsk_modulate, transmit_bits, uncoded_ber


@pytest.fixture(scope="module")
def ldpc():
    return LdpcCode.build()


def test_ldpc_structure(ldpc):
    H = ldpc.H
    assert H.shape == (250, 1000)
    assert np.all(H.sum(axis=0) == 5) and np.all(H.sum(axis=1) == 20)
    assert ldpc.k == 750 and ldpc.rate == 0.75


def test_ldpc_codewords_satisfy_parity(ldpc):
    zero = ldpc.encode_blocks(np.zeros(ldpc.k, np.uint8))
    assert not zero.any() and not ldpc.syndrome(zero).any()
    msg = np.random.default_rng(0).integers(0, 2, (20, ldpc.k), dtype=np.uint8)
    assert not ldpc.syndrome(ldpc.encode_blocks(msg)).any()


def test_ldpc_noiseless_identity(ldpc):
    bits = np.random.default_rng(1).integers(0, 2, 100 * ldpc.k, dtype=np.uint8)
    cw, pad = ldpc_encode(bits, ldpc)
    assert pad == 0 and len(cw) == 100 * 1000
    np.testing.assert_array_equal(ldpc_decode(bpsk_modulate(cw), ldpc, len(bits)), bits)


def test_ldpc_padding_for_image_payload(ldpc):
    bits = np.random.default_rng(2).integers(0, 2, 6272, dtype=np.uint8)
    cw, pad = ldpc_encode(bits, ldpc)
    assert len(cw) == 9000 == ldpc_length(6272) and pad == 9 * 750 - 6272
    np.testing.assert_array_equal(ldpc_decode(bpsk_modulate(cw), ldpc, 6272), bits)


def test_ldpc_small_profile_keeps_degrees():
    code = LdpcCode.build(n=200)
    assert np.all(code.H.sum(axis=0) == 5) and np.all(code.H.sum(axis=1) == 20)
    with pytest.raises(ValueError):
        LdpcCode.build(n=210)


def test_ldpc_corrects_at_moderate_snr(ldpc):
    rng = np.random.default_rng(4)
    bits = rng.integers(0, 2, 40 * ldpc.k, dtype=np.uint8)
    cw, _ = ldpc_encode(bits, ldpc)
    sym, hard = transmit_bits(cw, 3.0, rng)
    assert hard.mean() > 0.01  # the channel really corrupts bits
    assert np.mean(ldpc_decode(sym, ldpc, len(bits)) != bits) < 1e-3


def test_conv_trellis_and_rate():
    code = ConvCode()
    assert code.n_states == 64 and code.tail == 6
    assert code.rate == pytest.approx(2 / 3)
    assert conv_length(6272) == 9408 + 9
    assert len(conv_encode(np.zeros(6272, np.uint8), code)) == conv_length(6272)
    assert conv_length(1000) == 1500 + 9
    # unpunctured mother code for comparison
    half = ConvCode(puncture=((1,), (1,)))
    assert half.rate == 0.5


def test_conv_noiseless_and_single_error():
    code = ConvCode()
    bits = np.random.default_rng(5).integers(0, 2, 3000, dtype=np.uint8)
    sym = bpsk_modulate(conv_encode(bits, code))
    np.testing.assert_array_equal(viterbi_decode(sym, code, len(bits)), bits)
    flipped = sym.copy()
    flipped[1234] *= -1
    np.testing.assert_array_equal(viterbi_decode(flipped, code, len(bits)), bits)


def test_conv_beats_uncoded_at_four_db():
    code = ConvCode()
    rng = np.random.default_rng(6)
    bits = rng.integers(0, 2, 20000, dtype=np.uint8)
    sym, _ = transmit_bits(conv_encode(bits, code), 4.0, rng)
    assert np.mean(viterbi_decode(sym, code, len(bits)) != bits) < uncoded_ber(4.0)


def test_viterbi_rejects_wrong_length():
    code = ConvCode()
    with pytest.raises(ValueError):
        viterbi_decode(np.ones(10), code, 100)
