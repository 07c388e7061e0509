"""Cubical persistent homology of grayscale images.

Images are filtered with the T-construction: every pixel is a closed
unit square (a 2-cell) and every edge and vertex of the grid enters the
filtration together with its earliest incident pixel.  Cells live on a
``(2H+1) x (2W+1)`` grid; a cell at grid position ``(r, c)`` has
dimension ``(r % 2) + (c % 2)`` and pixel ``(i, j)`` sits at
``(2i+1, 2j+1)``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import (
    DimensionTooSmallError,
    InvalidFiltrationError,
    NegativeIntensityError,
    OutOfRangeError,
)

SUBLEVEL = "sublevel"
SUPERLEVEL = "superlevel"
ORIENTATIONS = (SUBLEVEL, SUPERLEVEL)


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Normalized grayscale image, row-major ``(height, width)`` floats in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 2:
            raise ValueError(f"expected a 2-D pixel grid, got shape {px.shape}")
        if px.shape[0] < 2 or px.shape[1] < 2:
            raise DimensionTooSmallError(
                f"image must be at least 2x2, got {px.shape[0]}x{px.shape[1]}")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise OutOfRangeError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", _readonly(px))

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def shape(self):
        return self.pixels.shape

    def to_bytes(self):
        """8-bit quantization used on the wire: ``round(v * 255)``."""
        return np.rint(self.pixels * 255.0).astype(np.uint8)

    def __eq__(self, other):
        return isinstance(other, GrayImage) and np.array_equal(self.pixels, other.pixels)

    __hash__ = None


def normalize(raw, mode="per_image_max"):
    """Scale raw nonnegative intensities into [0, 1].

    ``per_image_max`` divides by the grid maximum (an all-zero grid is
    returned unchanged); ``fixed_255`` divides by 255.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.size and arr.min() < 0:
        raise NegativeIntensityError("raw intensities must be nonnegative")
    if mode == "per_image_max":
        peak = arr.max() if arr.size else 0.0
        out = arr / peak if peak > 0 else arr.copy()
    elif mode == "fixed_255":
        out = arr / 255.0
    else:
        raise ValueError(f"unknown normalization mode {mode!r}")
    return GrayImage(out)


@dataclass(frozen=True, eq=False)
class CubicalComplex:
    """Filtered cubical complex of an image.

    ``values`` and ``provenance`` are grid-shaped ``(2H+1, 2W+1)`` arrays:
    the filtration value of each cell and the flat index of the pixel that
    determines it.
    """

    image_shape: tuple
    values: np.ndarray
    provenance: np.ndarray
    orientation: str = SUBLEVEL

    def __post_init__(self):
        h, w = self.image_shape
        grid = (2 * h + 1, 2 * w + 1)
        if self.values.shape != grid or self.provenance.shape != grid:
            raise ValueError(f"cell arrays must have grid shape {grid}")
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=np.float64)))
        object.__setattr__(self, "provenance", _readonly(np.asarray(self.provenance, dtype=np.int64)))

    @property
    def grid_shape(self):
        return self.values.shape

    @property
    def dims(self):
        r, c = np.indices(self.grid_shape)
        return (r % 2) + (c % 2)

    def __len__(self):
        return self.values.size

    def cell_counts(self):
        d = self.dims
        return tuple(int(np.count_nonzero(d == k)) for k in range(3))

    def boundary(self, cell):
        """Flat indices of the codimension-1 faces of ``cell``."""
        rows, cols = self.grid_shape
        r, c = divmod(int(cell), cols)
        faces = []
        if r % 2:
            faces += [(r - 1) * cols + c, (r + 1) * cols + c]
        if c % 2:
            faces += [r * cols + c - 1, r * cols + c + 1]
        return sorted(faces)

    def euler_characteristic(self, threshold=np.inf):
        mask = self.values <= threshold
        d = self.dims
        return sum((-1) ** k * int(np.count_nonzero(mask & (d == k))) for k in range(3))


def build_complex(image, orientation=SUPERLEVEL):
    """Filtered T-construction complex of ``image``.

    Under ``superlevel`` each pixel carries ``1 - value``.  Faces take the
    minimum over their incident pixels; ties go to the smaller pixel index.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}")
    if not isinstance(image, GrayImage):
        image = GrayImage(image)
    f = image.pixels if orientation == SUBLEVEL else 1.0 - image.pixels
    h, w = f.shape
    r = np.arange(2 * h + 1)
    c = np.arange(2 * w + 1)
    # candidate pixel rows/cols for each grid coordinate, lo <= hi
    rlo, rhi = (r - 1) // 2, r // 2
    clo, chi = (c - 1) // 2, c // 2
    best_val = np.full((2 * h + 1, 2 * w + 1), np.inf)
    best_pix = np.full((2 * h + 1, 2 * w + 1), -1, dtype=np.int64)
    # visit candidates in increasing pixel index so strict '<' keeps the smallest
    for rr in (rlo, rhi):
        for cc in (clo, chi):
            ok = ((rr >= 0) & (rr < h))[:, None] & ((cc >= 0) & (cc < w))[None, :]
            pix = np.clip(rr, 0, h - 1)[:, None] * w + np.clip(cc, 0, w - 1)[None, :]
            val = np.where(ok, f.ravel()[pix], np.inf)
            take = val < best_val
            best_val = np.where(take, val, best_val)
            best_pix = np.where(take, pix, best_pix)
    return CubicalComplex((h, w), best_val, best_pix, orientation)


@dataclass(frozen=True, eq=False)
class DiagramGroup:
    """Finite pairs and essential births of one homology dimension.

    Pixel provenance uses -1 for "absent" (e.g. after dequantization).
    """

    births: np.ndarray = field(default_factory=lambda: np.zeros(0))
    deaths: np.ndarray = field(default_factory=lambda: np.zeros(0))
    birth_pixels: np.ndarray = None
    death_pixels: np.ndarray = None
    essential: np.ndarray = field(default_factory=lambda: np.zeros(0))
    essential_pixels: np.ndarray = None

    def __post_init__(self):
        b = np.asarray(self.births, dtype=np.float64).reshape(-1)
        d = np.asarray(self.deaths, dtype=np.float64).reshape(-1)
        e = np.asarray(self.essential, dtype=np.float64).reshape(-1)
        if b.shape != d.shape:
            raise ValueError("births and deaths must have equal length")
        if np.any(d <= b):
            raise ValueError("every finite pair needs death > birth")

        def pixels(p, n):
            if p is None:
                return np.full(n, -1, dtype=np.int64)
            p = np.asarray(p, dtype=np.int64).reshape(-1)
            if p.shape != (n,):
                raise ValueError("provenance length mismatch")
            return p

        for name, value in (
            ("births", b), ("deaths", d), ("essential", e),
            ("birth_pixels", pixels(self.birth_pixels, len(b))),
            ("death_pixels", pixels(self.death_pixels, len(b))),
            ("essential_pixels", pixels(self.essential_pixels, len(e))),
        ):
            object.__setattr__(self, name, _readonly(value))

    def __len__(self):
        return len(self.births)

    @property
    def pairs(self):
        return np.column_stack([self.births, self.deaths]) if len(self) else np.zeros((0, 2))

    @property
    def persistence(self):
        return self.deaths - self.births

    def subset(self, keep):
        """Group restricted to the finite pairs selected by ``keep``; essentials kept."""
        return DiagramGroup(self.births[keep], self.deaths[keep],
                            self.birth_pixels[keep], self.death_pixels[keep],
                            self.essential, self.essential_pixels)


EMPTY_GROUP = DiagramGroup()


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Per-dimension persistence; missing dimensions read as empty."""

    groups: dict

    def __post_init__(self):
        object.__setattr__(self, "groups", {int(h): g for h, g in sorted(self.groups.items())})

    def __getitem__(self, h):
        return self.groups.get(h, EMPTY_GROUP)

    @property
    def dims(self):
        return tuple(self.groups)

    def pairs(self, h):
        return self[h].pairs

    def essential(self, h):
        return self[h].essential

    @classmethod
    def from_pairs(cls, pairs=None, essential=None):
        """Build from ``{h: [(birth, death), ...]}`` and ``{h: [birth, ...]}``."""
        pairs = pairs or {}
        essential = essential or {}
        groups = {}
        for h in sorted(set(pairs) | set(essential)):
            p = np.asarray(pairs.get(h, []), dtype=np.float64).reshape(-1, 2)
            groups[h] = DiagramGroup(p[:, 0], p[:, 1], essential=essential.get(h, []))
        return cls(groups)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        for h in set(self.dims) | set(other.dims):
            a, b = self[h], other[h]
            if not (np.array_equal(a.pairs, b.pairs) and np.array_equal(a.essential, b.essential)):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        parts = [f"H{h}: {len(g)} finite, {len(g.essential)} essential" for h, g in self.groups.items()]
        return f"PersistenceDiagram({'; '.join(parts)})"


def _sorted_boundary(cplx):
    """Cells in filtration order plus the CSR boundary matrix in that order."""
    rows, cols = cplx.grid_shape
    values = cplx.values.ravel()
    dims = cplx.dims.ravel()
    n = values.size
    order = np.lexsort((np.arange(n), dims, values))
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)

    r, c = np.divmod(np.arange(n), cols)
    faces = np.full((n, 4), -1, dtype=np.int64)
    vert = (r % 2) == 1
    horiz = (c % 2) == 1
    faces[vert, 0] = (r[vert] - 1) * cols + c[vert]
    faces[vert, 1] = (r[vert] + 1) * cols + c[vert]
    faces[horiz, 2] = r[horiz] * cols + c[horiz] - 1
    faces[horiz, 3] = r[horiz] * cols + c[horiz] + 1

    ranked = np.where(faces >= 0, rank[np.maximum(faces, 0)], -1)[order]
    ranked.sort(axis=1)
    counts = (ranked >= 0).sum(axis=1)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    indices = ranked[ranked >= 0]
    return order, indptr, indices, dims[order].astype(np.int8), faces


def check_filtration(cplx):
    values = cplx.values.ravel()
    _, _, _, _, faces = _sorted_boundary(cplx)
    has = faces >= 0
    face_vals = np.where(has, values[np.maximum(faces, 0)], -np.inf)
    bad = face_vals > values[:, None]
    if bad.any():
        cell = int(np.flatnonzero(bad.any(axis=1))[0])
        raise InvalidFiltrationError(f"cell {cell} has a face with a larger filtration value")


def compute_persistence(cplx, max_dim=1):
    """Persistence diagram of a filtered cubical complex, dimensions 0..max_dim.

    Cells are ordered by (value, dimension, index) and the boundary matrix
    is reduced over Z/2 with clearing.  Each pair inherits the provenance
    pixels of its creating and destroying cells; zero-persistence pairs are
    dropped.
    """
    check_filtration(cplx)
    order, indptr, indices, sdims, _ = _sorted_boundary(cplx)
    low = kernels.reduce_boundary(indptr, indices, sdims, 2)
    values = cplx.values.ravel()[order]
    prov = cplx.provenance.ravel()[order]

    cols = np.flatnonzero(low >= 0)
    rows = low[cols]
    keep = values[cols] > values[rows]
    cols, rows = cols[keep], rows[keep]
    pair_dim = sdims[rows]

    is_pivot = np.zeros(len(low), dtype=bool)
    is_pivot[low[low >= 0]] = True
    ess = np.flatnonzero((low < 0) & ~is_pivot)
    ess_dim = sdims[ess]

    groups = {}
    for h in range(max_dim + 1):
        sel = pair_dim == h
        b, d = rows[sel], cols[sel]
        e = ess[ess_dim == h]
        groups[h] = DiagramGroup(values[b], values[d], prov[b], prov[d], values[e], prov[e])
    return PersistenceDiagram(groups)


def persistence_diagram(image, orientation=SUPERLEVEL, max_dim=1):
    """Shorthand for ``compute_persistence(build_complex(image, orientation))``."""
    return compute_persistence(build_complex(image, orientation), max_dim=max_dim)


def filtration_function(image, orientation):
    """Per-pixel filtration values: the image itself or its complement."""
    px = image.pixels if isinstance(image, GrayImage) else np.asarray(image, dtype=np.float64)
    return px if orientation == SUBLEVEL else 1.0 - px
