"""Topocode packet serialization.

Wire layout (all multi-byte integers big-endian)::

    offset  size   field
    0       4      magic b"TPC1"
    4       2      width
    6       2      height
    8       1      bits per pixel (always 8)
    9       1      orientation (0 sublevel, 1 superlevel)
    10      1      group count G
    11      W*H    payload, row-major 8-bit pixels
    then G groups, ids strictly increasing:
            1      homology dimension
            2      finite pair count k
            1      essential count e
            2k     (birth, death) bytes per finite pair
            e      essential birth bytes

Coordinates are quantized to ``round(v * 255)``.  The fixed header and
the group headers are structural; the payload and the coordinate bytes
are the parts a channel is allowed to corrupt (see
:func:`corruptible_mask`).
"""
import struct
from dataclasses import dataclass, field

import numpy as np

from .diagram import QuantizedDiagram, dequantize, quantize
from .errors import (
    BadMagicError,
    DimensionOverflowError,
    NonMonotoneGroupsError,
    TrailingBytesError,
    TruncatedError,
    UnsupportedFieldError,
)
from .homology import ORIENTATIONS, SUBLEVEL, SUPERLEVEL

MAGIC = b"TPC1"
HEADER = struct.Struct(">4sHHBBB")
GROUP_HEADER = struct.Struct(">BHB")
ORIENTATION_CODES = {SUBLEVEL: 0, SUPERLEVEL: 1}


@dataclass
class DecodedPacket:
    width: int
    height: int
    payload: np.ndarray
    quantized: QuantizedDiagram
    orientation: str
    warnings: list = field(default_factory=list)

    @property
    def diagram(self):
        return dequantize(self.quantized)

    @property
    def image_bytes(self):
        return self.payload.reshape(self.height, self.width)


def topocode_size(quantized, include_empty=False):
    """Bytes taken by the group sections (everything after the payload)."""
    total = 0
    for h in quantized.dims:
        k = len(quantized.pairs.get(h, ()))
        e = len(quantized.essential.get(h, ()))
        if k or e or include_empty:
            total += GROUP_HEADER.size + 2 * k + e
    return total


def header_size():
    return HEADER.size


def encode_packet(image_bytes, diagram, orientation=SUPERLEVEL, include_empty=False):
    """Serialize payload pixels and a persistence diagram.

    ``image_bytes`` is a ``(height, width)`` uint8 array.  Dimensions with
    no finite and no essential pairs are omitted unless ``include_empty``.
    """
    img = np.asarray(image_bytes)
    if img.ndim != 2:
        raise ValueError("image_bytes must be a 2-D array")
    if img.dtype != np.uint8:
        if img.size and (img.min() < 0 or img.max() > 255 or not np.all(img == np.round(img))):
            raise ValueError("payload pixels must be integers in 0..255")
        img = img.astype(np.uint8)
    height, width = img.shape
    if width > 0xFFFF or height > 0xFFFF:
        raise DimensionOverflowError("image dimensions must fit in 16 bits")
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    q = diagram if isinstance(diagram, QuantizedDiagram) else quantize(diagram)

    sections = []
    for h in q.dims:
        pairs = np.asarray(q.pairs.get(h, np.zeros((0, 2))), dtype=np.uint8).reshape(-1, 2)
        ess = np.asarray(q.essential.get(h, np.zeros(0)), dtype=np.uint8)
        if not (len(pairs) or len(ess) or include_empty):
            continue
        if not 0 <= h <= 0xFF or len(pairs) > 0xFFFF or len(ess) > 0xFF:
            raise DimensionOverflowError(f"group {h} does not fit its header fields")
        sections.append(GROUP_HEADER.pack(h, len(pairs), len(ess)) + pairs.tobytes() + ess.tobytes())

    head = HEADER.pack(MAGIC, width, height, 8, ORIENTATION_CODES[orientation], len(sections))
    return head + np.ascontiguousarray(img).tobytes() + b"".join(sections)


def _need(buf, offset, size, name):
    if offset + size > len(buf):
        raise TruncatedError(name, offset, f"need {size} bytes, {len(buf) - offset} left")


def decode_packet(data):
    """Parse a packet produced by :func:`encode_packet`.

    Structural faults raise a :class:`~topocode.errors.CodecError` naming
    the field and offset.  Finite pairs whose death byte is not above the
    birth byte are dropped with a warning and parsing continues.
    """
    buf = bytes(data)
    _need(buf, 0, HEADER.size, "header")
    magic, width, height, bpp, orient, ngroups = HEADER.unpack_from(buf, 0)
    if magic != MAGIC:
        raise BadMagicError("magic", 0, f"got {magic!r}")
    if bpp != 8:
        raise UnsupportedFieldError("bits_per_pixel", 8, f"got {bpp}")
    if orient not in (0, 1):
        raise UnsupportedFieldError("orientation", 9, f"got {orient}")
    orientation = SUBLEVEL if orient == 0 else SUPERLEVEL
    offset = HEADER.size
    npix = width * height
    _need(buf, offset, npix, "payload")
    payload = np.frombuffer(buf, dtype=np.uint8, count=npix, offset=offset).copy()
    offset += npix

    pairs, essential, warnings = {}, {}, []
    last = -1
    for _ in range(ngroups):
        _need(buf, offset, GROUP_HEADER.size, "group_header")
        h, k, e = GROUP_HEADER.unpack_from(buf, offset)
        if h <= last:
            raise NonMonotoneGroupsError("group_id", offset, f"{h} after {last}")
        last = h
        offset += GROUP_HEADER.size
        _need(buf, offset, 2 * k, f"group{h}.pairs")
        p = np.frombuffer(buf, dtype=np.uint8, count=2 * k, offset=offset).reshape(-1, 2)
        bad = p[:, 1] <= p[:, 0]
        for idx in np.flatnonzero(bad):
            warnings.append(f"degenerate-pair: group {h} pair {idx} at offset "
                            f"{offset + 2 * idx} (birth {p[idx, 0]}, death {p[idx, 1]}) dropped")
        pairs[h] = p[~bad].copy()
        offset += 2 * k
        _need(buf, offset, e, f"group{h}.essential")
        essential[h] = np.frombuffer(buf, dtype=np.uint8, count=e, offset=offset).copy()
        offset += e
    if offset != len(buf):
        raise TrailingBytesError("end", offset, f"{len(buf) - offset} unexpected bytes")
    return DecodedPacket(width, height, payload, QuantizedDiagram(pairs, essential),
                         orientation, warnings)


def corruptible_mask(data):
    """Boolean mask over packet bytes: True for payload and coordinate bytes.

    Header fields (magic, sizes, counts, group ids) are left False; the
    simulator treats them as protected control information.
    """
    buf = bytes(data)
    mask = np.zeros(len(buf), dtype=bool)
    _, width, height, _, _, ngroups = HEADER.unpack_from(buf, 0)
    offset = HEADER.size
    mask[offset:offset + width * height] = True
    offset += width * height
    for _ in range(ngroups):
        _, k, e = GROUP_HEADER.unpack_from(buf, offset)
        offset += GROUP_HEADER.size
        mask[offset:offset + 2 * k + e] = True
        offset += 2 * k + e
    return mask
