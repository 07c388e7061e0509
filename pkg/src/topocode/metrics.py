"""Image quality metrics and packet-length accounting."""
import math

import numpy as np
from scipy.signal import convolve2d

from .baselines import ConvCode, conv_length, ldpc_length
from .homology import GrayImage

SCHEMES = ("uncoded", "topocode", "topocode-no-boundary", "ldpc", "conv")


def _pixels(x):
    return x.pixels if isinstance(x, GrayImage) else np.asarray(x, dtype=np.float64)


def psnr(a, b):
    """PSNR in dB with peak 1.0; identical images give ``inf``."""
    x, y = _pixels(a), _pixels(b)
    if x.shape != y.shape:
        raise ValueError("images must have equal dimensions")
    mse = float(np.mean((x - y) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def gaussian_window(size=11, sigma=1.5):
    ax = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
    w = np.outer(g, g)
    return w / w.sum()


def ssim(a, b, window=11, sigma=1.5, k1=0.01, k2=0.03, data_range=1.0):
    """Mean SSIM over all valid positions of a Gaussian window."""
    x, y = _pixels(a), _pixels(b)
    if x.shape != y.shape:
        raise ValueError("images must have equal dimensions")
    if min(x.shape) < window:
        raise ValueError(f"images must be at least {window}x{window} for SSIM")
    w = gaussian_window(window, sigma)

    def filt(z):
        return convolve2d(z, w, mode="valid")

    mx, my = filt(x), filt(y)
    sxx = filt(x * x) - mx * mx
    syy = filt(y * y) - my * my
    sxy = filt(x * y) - mx * my
    c1 = (k1 * data_range) ** 2
    c2 = (k2 * data_range) ** 2
    s = ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2))
    return float(np.mean(s))


def packet_length(scheme, shape, topocode_bytes=0, ldpc_n=1000, ldpc_k=750, conv_code=None):
    """Channel bits spent on one image of ``shape = (H, W)`` under ``scheme``.

    ``topocode_bytes`` is the size of the Topocode sidecar (group sections).
    """
    h, w = shape
    data = 8 * h * w
    if scheme == "uncoded":
        return data
    if scheme in ("topocode", "topocode-no-boundary"):
        return data + 8 * int(topocode_bytes)
    if scheme == "ldpc":
        return ldpc_length(data, n=ldpc_n, k=ldpc_k)
    if scheme == "conv":
        return conv_length(data, conv_code or ConvCode())
    raise ValueError(f"unknown scheme {scheme!r}")
