"""Dataset ingestion: IDX (MNIST container), binary PGM directories, the
small handwritten digit set bundled with scikit-learn (upsampled to 28x28),
and a procedurally drawn glyph set that needs no data files at all."""
import os
import struct
from pathlib import Path

import numpy as np

from .errors import DatasetNotFoundError, FormatError
from .homology import normalize

IDX_UBYTE_3D = 0x00000803


def read_idx(path):
    """Raw ``(N, H, W)`` uint8 array from an IDX3 unsigned-byte file."""
    path = Path(path)
    if not path.exists():
        raise DatasetNotFoundError(str(path))
    data = path.read_bytes()
    if len(data) < 16:
        raise FormatError(f"{path}: truncated IDX header")
    magic, n, h, w = struct.unpack(">IIII", data[:16])
    if magic != IDX_UBYTE_3D:
        raise FormatError(f"{path}: bad IDX magic 0x{magic:08x}")
    need = 16 + n * h * w
    if len(data) < need:
        raise FormatError(f"{path}: truncated, expected {need} bytes, found {len(data)}")
    return np.frombuffer(data, dtype=np.uint8, count=n * h * w, offset=16).reshape(n, h, w).copy()


def write_idx(path, images):
    arr = np.asarray(images, dtype=np.uint8)
    n, h, w = arr.shape
    Path(path).write_bytes(struct.pack(">IIII", IDX_UBYTE_3D, n, h, w) + arr.tobytes())


def load_idx(path, mode="per_image_max"):
    return [normalize(x, mode) for x in read_idx(path)]


def _pgm_tokens(data, count, start):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens, i = [], start
    while len(tokens) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise FormatError("truncated PGM header")
        tokens.append(data[i:j])
        i = j
    return tokens, i + 1  # exactly one whitespace byte before the raster


def read_pgm(path):
    """Raw ``(H, W)`` uint8 raster of a binary (P5) PGM with maxval <= 255."""
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise FormatError(f"{path}: unsupported PGM format {data[:2]!r} (only binary P5)")
    (w, h, maxval), offset = _pgm_tokens(data, 3, 2)
    try:
        w, h, maxval = int(w), int(h), int(maxval)
    except ValueError:
        raise FormatError(f"{path}: malformed PGM header") from None
    if not 0 < maxval <= 255:
        raise FormatError(f"{path}: maxval {maxval} not supported")
    if len(data) - offset < w * h:
        raise FormatError(f"{path}: truncated raster")
    return np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset).reshape(h, w).copy()


def write_pgm(path, raw):
    arr = np.asarray(raw, dtype=np.uint8)
    h, w = arr.shape
    Path(path).write_bytes(b"P5\n%d %d\n255\n" % (w, h) + arr.tobytes())


def read_pgm_dir(path):
    path = Path(path)
    if not path.is_dir():
        raise DatasetNotFoundError(str(path))
    files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".pgm")
    return [read_pgm(p) for p in files]


def load_pgm_dir(path, mode="per_image_max"):
    return [normalize(x, mode) for x in read_pgm_dir(path)]


# -- synthetic glyphs -------------------------------------------------------

GLYPHS = ("bar", "ring", "double_ring", "cross", "hook", "two_bars")


def _segment_dist(px, py, x0, y0, x1, y1):
    dx, dy = x1 - x0, y1 - y0
    t = np.clip(((px - x0) * dx + (py - y0) * dy) / max(dx * dx + dy * dy, 1e-12), 0, 1)
    return np.hypot(px - (x0 + t * dx), py - (y0 + t * dy))


def draw_glyph(kind, rng, size=28, supersample=4):
    """Anti-aliased bright strokes on a dark background, uint8 ``(size, size)``."""
    n = size * supersample
    yy, xx = (np.mgrid[0:n, 0:n] + 0.5) / supersample
    c = size / 2 + rng.uniform(-2, 2, size=2)
    width = rng.uniform(1.6, 2.6)
    ang = rng.uniform(-0.35, 0.35)
    s, co = np.sin(ang), np.cos(ang)

    def seg(x0, y0, x1, y1):
        # rotate endpoints about the glyph centre
        def rot(x, y):
            return (c[0] + co * (x - c[0]) - s * (y - c[1]), c[1] + s * (x - c[0]) + co * (y - c[1]))
        (a, b), (e, f) = rot(x0, y0), rot(x1, y1)
        return _segment_dist(xx, yy, a, b, e, f) <= width / 2

    def ring(cx, cy, rx, ry):
        r = np.hypot((xx - cx) / rx, (yy - cy) / ry)
        return np.abs(r - 1.0) * min(rx, ry) <= width / 2

    if kind == "bar":
        L = rng.uniform(7, 10)
        mask = seg(c[0], c[1] - L, c[0], c[1] + L)
    elif kind == "ring":
        mask = ring(c[0], c[1], rng.uniform(4.5, 7), rng.uniform(6.5, 9))
    elif kind == "double_ring":
        r = rng.uniform(3.5, 4.5)
        mask = ring(c[0], c[1] - r - 0.2, r, r) | ring(c[0], c[1] + r + 0.2, r * 1.1, r * 1.1)
    elif kind == "cross":
        L = rng.uniform(6, 9)
        mask = seg(c[0] - L, c[1], c[0] + L, c[1]) | seg(c[0], c[1] - L, c[0], c[1] + L)
    elif kind == "hook":
        L = rng.uniform(7, 10)
        mask = seg(c[0] - 5, c[1] - L, c[0] + 4, c[1] - L) | seg(c[0] + 4, c[1] - L, c[0] - 2, c[1] + L)
    elif kind == "two_bars":
        L = rng.uniform(6, 9)
        gap = rng.uniform(3.5, 5)
        mask = seg(c[0] - gap, c[1] - L, c[0] - gap, c[1] + L) | seg(c[0] + gap, c[1] - L, c[0] + gap, c[1] + L)
    else:
        raise ValueError(f"unknown glyph {kind!r}")
    cover = mask.reshape(size, supersample, size, supersample).mean(axis=(1, 3))
    return np.rint(255 * cover).astype(np.uint8)


def synthetic_digits(count, seed=0, size=28):
    """``count`` raw uint8 glyphs cycling through :data:`GLYPHS`."""
    rng = np.random.default_rng(seed)
    return [draw_glyph(GLYPHS[i % len(GLYPHS)], rng, size) for i in range(count)]


# -- bundled handwritten digits -------------------------------------------

def handwritten_digits(count=None, offset=0, size=28):
    """Raw uint8 ``(size, size)`` handwritten digits.

    The source is the 8x8, 17-level digit set shipped with scikit-learn.
    Each image is padded by one blank pixel on every side and upsampled
    bilinearly, which gives MNIST-like strokes with soft gray edges.
    """
    from scipy.ndimage import zoom
    try:
        from sklearn.datasets import load_digits
    except ImportError:  # pragma: no cover - scikit-learn is a declared dependency
        raise DatasetNotFoundError("the 'digits' dataset needs scikit-learn") from None
    images = load_digits().images
    stop = len(images) if count is None else offset + count
    if offset < 0 or stop > len(images):
        raise DatasetNotFoundError(f"digits: requested images {offset}..{stop - 1} of {len(images)}")
    out = []
    for im in images[offset:stop]:
        padded = np.pad(im, 1)
        up = zoom(padded, size / padded.shape[0], order=1)
        out.append(np.rint(np.clip(up / 16.0, 0.0, 1.0) * 255).astype(np.uint8))
    return out


def load_dataset(source, count=None, seed=0):
    """Raw uint8 images from ``"digits"``, ``"synthetic"``, an IDX file, or a
    PGM directory.  ``seed`` only affects the synthetic glyphs."""
    if source in (None, "synthetic"):
        return synthetic_digits(count or 50, seed)
    if source == "digits":
        return handwritten_digits(count)
    if not os.path.exists(source):
        raise DatasetNotFoundError(str(source))
    raws = read_pgm_dir(source) if os.path.isdir(source) else list(read_idx(source))
    return raws[:count] if count else raws
