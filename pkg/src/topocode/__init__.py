"""Topocode: persistent-homology sidecar for image error detection and
correction over noisy channels."""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .homology import (  # noqa: E402
    SUBLEVEL,
    SUPERLEVEL,
    CubicalComplex,
    DiagramGroup,
    GrayImage,
    PersistenceDiagram,
    build_complex,
    compute_persistence,
    normalize,
    persistence_diagram,
)
from .diagram import denoise, dequantize, quantize, total_persistence  # noqa: E402
from .transport import bottleneck, diagonal_cost, total_distance, wasserstein  # noqa: E402
from .codec import decode_packet, encode_packet  # noqa: E402
from .pipeline import (  # noqa: E402
    CorrectionConfig,
    DetectionConfig,
    correct,
    crop_interior,
    detect,
    loss_and_gradient,
)

__all__ = [
    "BACKEND", "SUBLEVEL", "SUPERLEVEL", "CubicalComplex", "DiagramGroup", "GrayImage",
    "PersistenceDiagram", "build_complex", "compute_persistence", "normalize",
    "persistence_diagram", "denoise", "dequantize", "quantize", "total_persistence",
    "bottleneck", "diagonal_cost", "total_distance", "wasserstein", "decode_packet",
    "encode_packet", "CorrectionConfig", "DetectionConfig", "correct", "crop_interior",
    "detect", "loss_and_gradient",
]
