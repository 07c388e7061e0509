"""BPSK over AWGN with the pixel- and line-localized noise patterns.

Conventions: bit 0 -> +1, bit 1 -> -1; SNR is Es/N0 per symbol with unit
symbol energy, so the real noise variance is ``N0 / 2 = 10 ** (-snr_db / 10) / 2``
and hard-decision BER is ``Q(sqrt(2 * snr))``.  Pixels are
sent as 8 bits each, row-major, MSB first.
"""
import math
from dataclasses import dataclass

import numpy as np

from .homology import GrayImage, normalize

NOISELESS = math.inf

ALL = "all"
PIXEL_SUBSET = "pixel_subset"
LINE_SUBSET = "line_subset"


def split_seed(seed, *indices):
    """Derive an independent 64-bit seed for ``(seed, *indices)``."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), *(int(i) for i in indices)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class NoisePattern:
    """Where noise lands: every symbol, a random pixel subset, or random
    whole rows/columns.  ``count`` overrides the fraction-derived size and
    ``lines`` pins explicit line indices (rows are 0..H-1, columns H..H+W-1)."""

    kind: str = ALL
    fraction: float = 1.0
    count: int = None
    lines: tuple = None

    def __post_init__(self):
        if self.kind not in (ALL, PIXEL_SUBSET, LINE_SUBSET):
            raise ValueError(f"unknown noise pattern {self.kind!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")


@dataclass(frozen=True)
class ChannelConfig:
    snr_db: float = 3.0
    seed: int = 0
    pattern: NoisePattern = NoisePattern()

    def __post_init__(self):
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ValueError("snr_db must be finite or +inf")


def noise_sigma(snr_db):
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    return math.sqrt(0.5 * 10.0 ** (-snr_db / 10.0))


def bpsk_modulate(bits):
    b = np.asarray(bits, dtype=np.uint8)
    return 1.0 - 2.0 * b.astype(np.float64)


def demodulate(symbols):
    """Hard decision; exactly 0 decides bit 0."""
    return (np.asarray(symbols, dtype=np.float64) < 0).astype(np.uint8)


def awgn(symbols, snr_db, seed=None, rng=None):
    """Add i.i.d. Gaussian noise at ``snr_db``; ``+inf`` disables noise."""
    x = np.asarray(symbols, dtype=np.float64)
    sigma = noise_sigma(snr_db)
    if sigma == 0.0:
        return x.copy()
    rng = rng if rng is not None else np.random.default_rng(seed)
    return x + sigma * rng.standard_normal(x.shape)


def bytes_to_bits(data):
    return np.unpackbits(np.asarray(data, dtype=np.uint8).reshape(-1))


def bits_to_bytes(bits):
    return np.packbits(np.asarray(bits, dtype=np.uint8).reshape(-1))


def selected_pixels(shape, pattern, rng):
    """Flat indices of the pixels whose symbols receive noise."""
    h, w = shape
    n = h * w
    if pattern.kind == ALL:
        return np.arange(n)
    if pattern.kind == PIXEL_SUBSET:
        k = pattern.count if pattern.count is not None else math.ceil(pattern.fraction * n)
        return np.sort(rng.choice(n, size=min(k, n), replace=False))
    if pattern.lines is not None:
        lines = np.asarray(pattern.lines, dtype=np.int64)
    else:
        k = pattern.count if pattern.count is not None else math.ceil(pattern.fraction * (h + w))
        lines = rng.choice(h + w, size=min(k, h + w), replace=False)
    mask = np.zeros((h, w), dtype=bool)
    for line in lines:
        if line < h:
            mask[line, :] = True
        else:
            mask[:, line - h] = True
    return np.flatnonzero(mask)


def transmit_bits(bits, snr_db, rng, mask=None):
    """Modulate, add noise where ``mask`` is True (everywhere by default),
    and return ``(received_symbols, hard_bits)``."""
    sym = bpsk_modulate(bits)
    if mask is None:
        rx = awgn(sym, snr_db, rng=rng)
    else:
        rx = sym.copy()
        idx = np.flatnonzero(mask)
        rx[idx] = awgn(sym[idx], snr_db, rng=rng)
    return rx, demodulate(rx)


def transmit_bytes(data, config, rng=None):
    """Send raw pixel bytes ``(H, W)`` through the channel; returns received bytes."""
    raw = np.asarray(data, dtype=np.uint8)
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    pix = selected_pixels(raw.shape, config.pattern, rng)
    mask = np.zeros(raw.size, dtype=bool)
    mask[pix] = True
    bit_mask = np.repeat(mask, 8)
    _, bits = transmit_bits(bytes_to_bits(raw), config.snr_db, rng, bit_mask)
    return bits_to_bytes(bits).reshape(raw.shape)


def transmit_image(image, config, rng=None):
    """Quantize to 8 bits, transmit, and re-normalize by the received maximum."""
    if not isinstance(image, GrayImage):
        image = GrayImage(image)
    return normalize(transmit_bytes(image.to_bytes(), config, rng))


def transmit_packet(packet, config, mask, rng=None):
    """Corrupt the bytes of ``packet`` selected by ``mask`` (see
    :func:`topocode.codec.corruptible_mask`) with full-AWGN BPSK."""
    buf = np.frombuffer(bytes(packet), dtype=np.uint8)
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    _, bits = transmit_bits(bytes_to_bits(buf), config.snr_db, rng, np.repeat(mask, 8))
    return bits_to_bytes(bits).tobytes()


def q_function(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def uncoded_ber(snr_db):
    """Closed-form hard-decision BPSK bit error rate."""
    return q_function(math.sqrt(2.0 * 10.0 ** (snr_db / 10.0)))
