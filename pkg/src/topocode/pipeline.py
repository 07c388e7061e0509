"""Error detection and topological error correction."""
import math
from dataclasses import dataclass, field

import numpy as np

from .diagram import denoise
from .homology import SUBLEVEL, SUPERLEVEL, GrayImage, persistence_diagram
from .transport import wasserstein

ACCEPT = "accept"
RETRANSMIT = "retransmit"


@dataclass(frozen=True)
class DetectionConfig:
    alphas: tuple = (0.0, 0.15, 0.30, 0.45)
    p: float = 2.0
    epsilon: float = 0.05
    dims: tuple = (0, 1)
    orientation: str = SUPERLEVEL

    def __post_init__(self):
        a = tuple(float(x) for x in self.alphas)
        if not a or any(x < 0 or x > 1 for x in a) or list(a) != sorted(a):
            raise ValueError("alphas must be a non-empty ascending list in [0, 1]")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        object.__setattr__(self, "alphas", a)


@dataclass(frozen=True)
class DetectionReport:
    alphas: tuple
    distances: tuple  # total over dims, one per alpha
    per_dim: tuple  # {h: distance} per alpha
    verdict: str
    significance: float = None  # 1 - alpha at the first accepting alpha

    @property
    def accepted(self):
        return self.verdict == ACCEPT


def detect(received, topocode, cfg=DetectionConfig()):
    """Compare the received image's diagram with the transmitted one at
    each noise floor; accept iff some alpha gives a distance below epsilon."""
    observed = persistence_diagram(received, cfg.orientation)
    distances, per_dim = [], []
    significance = None
    for alpha in cfg.alphas:
        a = denoise(topocode, alpha)
        b = denoise(observed, alpha)
        dims = {h: wasserstein(a, b, h, cfg.p)[0] for h in cfg.dims}
        total = float(sum(dims.values()))
        distances.append(total)
        per_dim.append(dims)
        if significance is None and total < cfg.epsilon:
            significance = 1.0 - alpha
    verdict = ACCEPT if significance is not None else RETRANSMIT
    return DetectionReport(cfg.alphas, tuple(distances), tuple(per_dim), verdict, significance)


@dataclass(frozen=True)
class CorrectionConfig:
    gamma: float = 1000.0
    p: float = 2.0
    dims: tuple = (0, 1)
    step: float = 0.0003
    iterations: int = 300
    clamp: tuple = (0.0, 1.0)
    tol: float = 1e-6
    patience: int = 10
    orientation: str = SUPERLEVEL

    def __post_init__(self):
        if self.gamma < 0 or self.step <= 0 or self.iterations < 1:
            raise ValueError("need gamma >= 0, step > 0, iterations >= 1")


def regularizer(x):
    """Sum over pixels of the distance to the nearer of 0 and 1."""
    return float(np.sum(np.minimum(np.abs(x), np.abs(1.0 - x))))


def regularizer_grad(x):
    """Subgradient of ``min(|x|, |1 - x|)``: +1 below and at 0.5, -1 above,
    0 exactly at 0 and 1."""
    g = np.where(x <= 0.5, 1.0, -1.0)
    g[(x == 0.0) | (x == 1.0)] = 0.0
    return g


def _edge_weights(costs, dist, p):
    """d(distance)/d(cost) for each edge of the matching."""
    if dist == 0.0 or costs.size == 0:
        return np.zeros_like(costs)
    if math.isinf(p):
        w = np.zeros_like(costs)
        w[int(np.argmax(costs))] = 1.0
        return w
    if p == 1.0:
        return (costs > 0).astype(np.float64)
    return (costs / dist) ** (p - 1.0)


def topology_gradient(candidate_diagram, target, h, p, shape):
    """Distance in dimension ``h`` and its gradient with respect to the
    candidate's filtration values, scattered onto provenance pixels."""
    dist, m = wasserstein(target, candidate_diagram, h, p)
    grad = np.zeros(int(np.prod(shape)))
    if dist == 0.0:
        return dist, grad.reshape(shape)
    tg, cg = target[h], candidate_diagram[h]
    costs = m.all_costs()
    w = _edge_weights(costs, dist, p)
    k = 0
    for (i, j), _ in zip(m.matched, m.matched_costs):
        db = cg.births[j] - tg.births[i]
        dd = cg.deaths[j] - tg.deaths[i]
        if abs(db) >= abs(dd):
            grad[cg.birth_pixels[j]] += w[k] * np.sign(db)
        else:
            grad[cg.death_pixels[j]] += w[k] * np.sign(dd)
        k += 1
    k += len(m.to_diagonal_1)  # target pairs on the diagonal: no candidate dependence
    for j in m.to_diagonal_2:
        grad[cg.birth_pixels[j]] -= 0.5 * w[k]
        grad[cg.death_pixels[j]] += 0.5 * w[k]
        k += 1
    for i, j in m.essential_matched:
        grad[cg.essential_pixels[j]] += w[k] * np.sign(cg.essential[j] - tg.essential[i])
        k += 1
    return dist, grad.reshape(shape)


def loss_and_gradient(candidate, target, cfg=CorrectionConfig()):
    """Topological matching loss and its subgradient over pixels.

    ``loss = gamma * sum_h W_p,h(target, D(candidate)) + sum_i min(|x_i|, |1 - x_i|)``.
    """
    x = candidate.pixels
    diagram = persistence_diagram(candidate, cfg.orientation)
    # filtration value is x (sublevel) or 1 - x (superlevel)
    chain = 1.0 if cfg.orientation == SUBLEVEL else -1.0
    loss = regularizer(x)
    grad = regularizer_grad(x)
    wdist = 0.0
    if cfg.gamma:
        for h in cfg.dims:
            d, g = topology_gradient(diagram, target, h, cfg.p, x.shape)
            wdist += d
            grad = grad + cfg.gamma * chain * g
        loss += cfg.gamma * wdist
    return loss, grad


@dataclass
class CorrectionResult:
    image: GrayImage
    losses: list = field(default_factory=list)
    best_iteration: int = 0


def correct(received, topocode, cfg=CorrectionConfig()):
    """Projected subgradient descent on :func:`loss_and_gradient`.

    Stops after ``cfg.iterations`` steps or once the best loss has improved
    by less than ``cfg.tol`` over ``cfg.patience`` steps.  Returns the
    best-loss iterate (not the last) with the full loss trace.
    """
    lo, hi = cfg.clamp
    x = received.pixels.copy()
    best_x, best_loss, best_it = x.copy(), math.inf, 0
    trace = []
    for it in range(cfg.iterations + 1):
        loss, grad = loss_and_gradient(GrayImage(x), topocode, cfg)
        trace.append(loss)
        if loss < best_loss:
            best_x, best_loss, best_it = x.copy(), loss, it
        if it == cfg.iterations or not grad.any():
            break
        if it >= cfg.patience and min(trace[:-cfg.patience]) - best_loss < cfg.tol:
            break
        x = np.clip(x - cfg.step * grad, lo, hi)
    return CorrectionResult(GrayImage(best_x), trace, best_it)


def crop_interior(image, margin=1):
    """Drop ``margin`` rows and columns on every side."""
    px = image.pixels if isinstance(image, GrayImage) else np.asarray(image, dtype=np.float64)
    if margin < 0 or margin >= min(px.shape) // 2:
        raise ValueError(f"margin {margin} too large for a {px.shape[0]}x{px.shape[1]} image")
    if margin == 0:
        return image if isinstance(image, GrayImage) else GrayImage(px)
    return GrayImage(px[margin:-margin, margin:-margin])
