import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topocode.codec import (
    GROUP_HEADER,
    HEADER,
    corruptible_mask,
    decode_packet,
    encode_packet,
    header_size,
    topocode_size,
)
from topocode.diagram import quantize
from topocode.errors import (
    BadMagicError,
    CodecError,
    DimensionOverflowError,
    NonMonotoneGroupsError,
    TrailingBytesError,
    TruncatedError,
)
from topocode.homology import SUBLEVEL, SUPERLEVEL, PersistenceDiagram


def sample_diagram():
    return PersistenceDiagram.from_pairs({0: [(0.1, 0.6), (0.0, 1.0)], 1: [(0.2, 0.9)]}, {0: [0.0]})


def test_layout_is_byte_exact():
    img = np.arange(6, dtype=np.uint8).reshape(2, 3)
    pkt = encode_packet(img, sample_diagram(), SUPERLEVEL)
    assert pkt[:11] == b"TPC1" + struct.pack(">HHBBB", 3, 2, 8, 1, 2)
    assert pkt[11:17] == bytes(range(6))
    g0 = struct.pack(">BHB", 0, 2, 1) + bytes([26, 153, 0, 255, 0])
    g1 = struct.pack(">BHB", 1, 1, 0) + bytes([51, 230])
    assert pkt[17:] == g0 + g1
    assert header_size() == 11 and GROUP_HEADER.size == 4


def test_round_trip():
    img = np.random.default_rng(0).integers(0, 256, (5, 7), dtype=np.uint8)
    d = sample_diagram()
    out = decode_packet(encode_packet(img, d, SUBLEVEL))
    np.testing.assert_array_equal(out.image_bytes, img)
    assert out.orientation == SUBLEVEL and (out.width, out.height) == (7, 5)
    for h in (0, 1):
        assert np.abs(out.diagram[h].pairs - d[h].pairs).max() <= 1 / 510
    assert out.warnings == []


def test_worked_overhead_example():
    # 15 finite pairs and one essential class in H0 on a 28x28 image
    pairs = [(i / 40, 0.5 + i / 40) for i in range(15)]
    d = PersistenceDiagram.from_pairs({0: pairs}, {0: [0.0]})
    q = quantize(d)
    bits = 8 * topocode_size(q)
    assert bits == 8 * (4 + 2 * 15 + 1) == 280
    assert 240 <= bits <= 300 and bits <= 0.05 * 6272
    pkt = encode_packet(np.zeros((28, 28), np.uint8), q)
    assert len(pkt) == HEADER.size + 784 + 35
    # dense form always carries the (empty) H1 group header as well
    dense = PersistenceDiagram.from_pairs({0: pairs, 1: []}, {0: [0.0]})
    assert topocode_size(quantize(dense), include_empty=True) == 39


def test_empty_groups_declared_with_zero_counts():
    d = PersistenceDiagram.from_pairs({0: [], 1: []}, {})
    pkt = encode_packet(np.zeros((3, 3), np.uint8), d, include_empty=True)
    assert len(pkt) == 11 + 9 + 2 * 4
    out = decode_packet(pkt)
    assert len(out.diagram[0]) == 0 and len(out.diagram[1]) == 0
    assert len(encode_packet(np.zeros((3, 3), np.uint8), d)) == 20


def test_structural_errors_name_field_and_offset():
    pkt = bytearray(encode_packet(np.zeros((4, 4), np.uint8), sample_diagram()))
    bad = bytearray(pkt)
    bad[0] ^= 0xFF
    with pytest.raises(BadMagicError) as e:
        decode_packet(bytes(bad))
    assert e.value.field == "magic" and e.value.offset == 0
    with pytest.raises(TruncatedError):
        decode_packet(bytes(pkt[:-1]))
    with pytest.raises(TruncatedError):
        decode_packet(bytes(pkt[:5]))
    with pytest.raises(TrailingBytesError):
        decode_packet(bytes(pkt) + b"\x00")
    swapped = bytearray(pkt)
    second = 11 + 16 + 4 + 2 * 2 + 1
    swapped[second] = 0  # group id 1 -> 0 after group 0
    with pytest.raises(NonMonotoneGroupsError):
        decode_packet(bytes(swapped))


def test_payload_bit_flip_is_opaque():
    img = np.full((4, 4), 100, np.uint8)
    pkt = bytearray(encode_packet(img, sample_diagram()))
    pkt[11 + 5] ^= 0x10
    out = decode_packet(bytes(pkt))
    diff = np.unpackbits(out.payload ^ img.ravel())
    assert diff.sum() == 1


def test_degenerate_pair_dropped_with_warning():
    pkt = bytearray(encode_packet(np.zeros((2, 2), np.uint8), sample_diagram()))
    death_of_first = 11 + 4 + 4 + 1
    pkt[death_of_first] = 10  # below its birth byte 26
    out = decode_packet(bytes(pkt))
    assert len(out.warnings) == 1 and "degenerate-pair" in out.warnings[0]
    np.testing.assert_array_equal(out.quantized.pairs[0], [[0, 255]])
    assert len(out.diagram[1]) == 1


def test_overflow_rejected():
    with pytest.raises(DimensionOverflowError):
        encode_packet(np.zeros((1, 70000), np.uint8), sample_diagram())


def test_corruptible_mask_covers_payload_and_coordinates_only():
    pkt = encode_packet(np.zeros((3, 3), np.uint8), sample_diagram())
    mask = corruptible_mask(pkt)
    expected = np.zeros(len(pkt), bool)
    expected[11:20] = True
    expected[24:29] = True  # H0: two pairs plus one essential
    expected[33:35] = True  # H1: one pair
    np.testing.assert_array_equal(mask, expected)


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=80))
def test_decoder_is_total(data):
    try:
        decode_packet(data)
    except CodecError:
        pass


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 59), st.integers(0, 7))
def test_decoder_survives_bit_flips_in_valid_packets(pos, bit):
    pkt = bytearray(encode_packet(np.zeros((3, 3), np.uint8), sample_diagram()))
    pkt[pos % len(pkt)] ^= 1 << bit
    try:
        decode_packet(bytes(pkt))
    except CodecError:
        pass
