"""Diagram statistics and transforms: total persistence, noise-floor
denoising, and 8-bit quantization for the wire."""
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError
from .homology import DiagramGroup, PersistenceDiagram

LEVELS = 255


@dataclass(frozen=True)
class DenoiseConfig:
    alpha: float = 0.0
    dims: tuple = (0, 1)

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


def total_persistence(diagram, h):
    """Sum of ``death - birth`` over the finite pairs of dimension ``h``."""
    return float(np.sum(diagram[h].persistence))


def denoise(diagram, alpha, dims=None):
    """Drop finite pairs whose persistence is strictly below ``alpha * T_h``.

    ``T_h`` is the total persistence of the input diagram in dimension h,
    so each dimension gets its own noise floor.  Essential classes are
    always kept.  ``dims`` restricts which dimensions are thresholded.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    groups = {}
    for h, g in diagram.groups.items():
        if dims is not None and h not in dims:
            groups[h] = g
            continue
        floor = alpha * total_persistence(diagram, h)
        groups[h] = g.subset(g.persistence >= floor)
    return PersistenceDiagram(groups)


@dataclass(frozen=True, eq=False)
class QuantizedDiagram:
    """``pairs[h]`` is a ``(k, 2)`` uint8 array, ``essential[h]`` a uint8 vector."""

    pairs: dict
    essential: dict

    @property
    def dims(self):
        return tuple(sorted(set(self.pairs) | set(self.essential)))

    def __eq__(self, other):
        if not isinstance(other, QuantizedDiagram) or self.dims != other.dims:
            return False
        return all(
            np.array_equal(self.pairs.get(h, _NO_PAIRS), other.pairs.get(h, _NO_PAIRS))
            and np.array_equal(self.essential.get(h, _NO_ESS), other.essential.get(h, _NO_ESS))
            for h in self.dims)

    __hash__ = None


_NO_PAIRS = np.zeros((0, 2), dtype=np.uint8)
_NO_ESS = np.zeros(0, dtype=np.uint8)


def quantize_values(values):
    v = np.asarray(values, dtype=np.float64)
    if v.size and (not np.all(np.isfinite(v)) or v.min() < 0.0 or v.max() > 1.0):
        raise OutOfRangeError("diagram coordinates must lie in [0, 1] to quantize")
    return np.rint(v * LEVELS).astype(np.uint8)


def quantize(diagram):
    pairs, essential = {}, {}
    for h, g in diagram.groups.items():
        pairs[h] = quantize_values(g.pairs).reshape(-1, 2)
        essential[h] = quantize_values(g.essential)
    return QuantizedDiagram(pairs, essential)


def dequantize(q):
    """Inverse of :func:`quantize`; pairs collapsed to one level are dropped."""
    groups = {}
    for h in q.dims:
        p = np.asarray(q.pairs.get(h, _NO_PAIRS), dtype=np.int64).reshape(-1, 2)
        p = p[p[:, 1] > p[:, 0]]
        e = np.asarray(q.essential.get(h, _NO_ESS), dtype=np.int64)
        groups[h] = DiagramGroup(p[:, 0] / LEVELS, p[:, 1] / LEVELS, essential=e / LEVELS)
    return PersistenceDiagram(groups)
