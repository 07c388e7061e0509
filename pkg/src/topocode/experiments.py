"""Experiment orchestration: detection sweeps, correction comparisons and
SNR sweeps, written as CSV plus a JSON run manifest."""
import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import BACKEND
from .baselines import ConvCode, LdpcCode, conv_encode, ldpc_decode, ldpc_encode, viterbi_decode
from .channel import (
    ALL,
    LINE_SUBSET,
    PIXEL_SUBSET,
    ChannelConfig,
    NoisePattern,
    bits_to_bytes,
    bytes_to_bits,
    split_seed,
    transmit_bits,
    transmit_bytes,
    transmit_packet,
)
from .codec import corruptible_mask, decode_packet, encode_packet, topocode_size
from .datasets import load_dataset
from .diagram import dequantize, quantize
from .errors import ConfigError
from .homology import ORIENTATIONS, SUPERLEVEL, normalize, persistence_diagram
from .metrics import SCHEMES, packet_length, psnr, ssim
from .pipeline import CorrectionConfig, DetectionConfig, correct, crop_interior, detect
from .transport import total_distance

EXPERIMENTS = ("detect-single", "detect-batch", "correct-compare", "snr-sweep")
PATTERNS = {"all": ALL, "pixel": PIXEL_SUBSET, "line": LINE_SUBSET}
# seed stream per scheme; uncoded and topocode share one so their payload
# noise is the same realization
SCHEME_STREAM = {"uncoded": 0, "topocode": 0, "topocode-no-boundary": 0, "ldpc": 1, "conv": 2}

DETECT_FIELDS = ["image", "snr_db", "alpha", "distance", "distance_h0", "distance_h1",
                 "verdict", "psnr", "ssim"]
CORRECT_FIELDS = ["image", "scheme", "snr_db", "psnr", "ssim", "wasserstein",
                  "packet_bits", "topocode_bytes"]


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    dataset: str = "digits"
    count: int = 50
    snrs: tuple = (3.0,)
    pattern: str = "all"
    fraction: float = 1.0
    lines: int = None
    alphas: tuple = (0.0, 0.15, 0.30, 0.45)
    epsilon: float = 0.05
    p: float = 2.0
    seed: int = 0
    out: str = "results"
    schemes: tuple = SCHEMES
    orientation: str = SUPERLEVEL
    image_index: int = 0
    gamma: float = 1000.0
    step: float = 0.0003
    iterations: int = 300
    ldpc_n: int = 1000
    jobs: int = 1

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.count < 1:
            raise ConfigError("image count must be >= 1")
        if not self.snrs:
            raise ConfigError("SNR list must be non-empty")
        if self.pattern not in PATTERNS:
            raise ConfigError(f"noise pattern must be one of {sorted(PATTERNS)}")
        if not self.schemes:
            raise ConfigError("scheme set must be non-empty")
        bad = set(self.schemes) - set(SCHEMES)
        if bad:
            raise ConfigError(f"unknown schemes {sorted(bad)}")
        if self.orientation not in ORIENTATIONS:
            raise ConfigError(f"orientation must be one of {ORIENTATIONS}")
        try:
            DetectionConfig(alphas=self.alphas, p=self.p, epsilon=self.epsilon)
            CorrectionConfig(gamma=self.gamma, step=self.step, iterations=self.iterations)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not 0.0 <= self.fraction <= 1.0:
            raise ConfigError("fraction must lie in [0, 1]")
        return self

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        kw = {k: v for k, v in d.items() if k in known}
        for key in ("snrs", "alphas", "schemes"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    def noise_pattern(self):
        return NoisePattern(PATTERNS[self.pattern], self.fraction, self.lines)

    def detection_config(self):
        return DetectionConfig(alphas=self.alphas, p=self.p, epsilon=self.epsilon,
                               orientation=self.orientation)

    def correction_config(self):
        return CorrectionConfig(gamma=self.gamma, p=self.p, step=self.step,
                                iterations=self.iterations, orientation=self.orientation)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _to_csv(rows, header):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: _fmt(row[k]) for k in header})
    return buf.getvalue()


# -- trials -------------------------------------------------------------------

def detect_trial(spec, index, raw, snr_index):
    snr = float(spec.snrs[snr_index])
    src = normalize(raw)
    sent = dequantize(quantize(persistence_diagram(src, spec.orientation)))
    cfg = ChannelConfig(snr, split_seed(spec.seed, index, snr_index), spec.noise_pattern())
    received = normalize(transmit_bytes(raw, cfg, np.random.default_rng(cfg.seed)))
    report = detect(received, sent, spec.detection_config())
    q_psnr, q_ssim = psnr(src, received), ssim(src, received)
    return [dict(image=index, snr_db=snr, alpha=a, distance=d,
                 distance_h0=float(per.get(0, 0.0)), distance_h1=float(per.get(1, 0.0)),
                 verdict=report.verdict, psnr=q_psnr, ssim=q_ssim)
            for a, d, per in zip(report.alphas, report.distances, report.per_dim)]


class _Codes:
    ldpc = {}
    conv = ConvCode()

    @classmethod
    def ldpc_code(cls, n):
        if n not in cls.ldpc:
            cls.ldpc[n] = LdpcCode.build(n=n, dv=5, dc=20, seed=0)
        return cls.ldpc[n]


def _rng(spec, index, snr_index, scheme):
    return np.random.default_rng(split_seed(spec.seed, index, snr_index, SCHEME_STREAM[scheme]))


def correct_trial(spec, index, raw, snr_index):
    snr = float(spec.snrs[snr_index])
    raw = np.asarray(raw, dtype=np.uint8)
    src = normalize(raw)
    sent = persistence_diagram(src, spec.orientation)
    q = quantize(sent)
    tbytes = topocode_size(q)
    shape = raw.shape
    bits = bytes_to_bits(raw)
    chan = ChannelConfig(snr)
    recovered = {}

    if "uncoded" in spec.schemes:
        _, rx = transmit_bits(bits, snr, _rng(spec, index, snr_index, "uncoded"))
        recovered["uncoded"] = normalize(bits_to_bytes(rx).reshape(shape))
    if {"topocode", "topocode-no-boundary"} & set(spec.schemes):
        packet = encode_packet(raw, q, spec.orientation)
        rx = transmit_packet(packet, chan, corruptible_mask(packet),
                             _rng(spec, index, snr_index, "topocode"))
        dec = decode_packet(rx)
        fixed = correct(normalize(dec.image_bytes), dec.diagram, spec.correction_config()).image
        recovered["topocode"] = fixed
        recovered["topocode-no-boundary"] = fixed
    if "ldpc" in spec.schemes:
        code = _Codes.ldpc_code(spec.ldpc_n)
        cw, _ = ldpc_encode(bits, code)
        sym, _ = transmit_bits(cw, snr, _rng(spec, index, snr_index, "ldpc"))
        out = ldpc_decode(sym, code, len(bits))
        recovered["ldpc"] = normalize(bits_to_bytes(out).reshape(shape))
    if "conv" in spec.schemes:
        code = _Codes.conv
        cw = conv_encode(bits, code)
        sym, _ = transmit_bits(cw, snr, _rng(spec, index, snr_index, "conv"))
        out = viterbi_decode(sym, code, len(bits))
        recovered["conv"] = normalize(bits_to_bytes(out).reshape(shape))

    rows = []
    for scheme in SCHEMES:
        if scheme not in spec.schemes:
            continue
        a, b = src, recovered[scheme]
        ref = sent
        if scheme == "topocode-no-boundary":
            a, b = crop_interior(a), crop_interior(b)
            ref = persistence_diagram(a, spec.orientation)
        got = persistence_diagram(b, spec.orientation)
        ldpc_n, ldpc_k = (spec.ldpc_n, _Codes.ldpc_code(spec.ldpc_n).k) if scheme == "ldpc" else (1000, 750)
        rows.append(dict(
            image=index, scheme=scheme, snr_db=snr, psnr=psnr(a, b), ssim=ssim(a, b),
            wasserstein=total_distance(ref, got, spec.p),
            packet_bits=packet_length(scheme, shape, tbytes, ldpc_n=ldpc_n, ldpc_k=ldpc_k),
            topocode_bytes=tbytes if scheme.startswith("topocode") else 0))
    return rows


def _job(args):
    fn, spec, index, raw, snr_index = args
    return fn(spec, index, raw, snr_index)


def _run_trials(spec, fn, jobs_args):
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            parts = list(pool.map(_job, [(fn, spec, *a) for a in jobs_args]))
    else:
        parts = [fn(spec, *a) for a in jobs_args]
    return [row for part in parts for row in part]


# -- summaries ----------------------------------------------------------------

def _mean(values):
    return float(np.mean(values)) if len(values) else math.nan


def detect_summary(rows, epsilon):
    out = []
    for snr in sorted({r["snr_db"] for r in rows}):
        for alpha in sorted({r["alpha"] for r in rows}):
            sel = [r["distance"] for r in rows if r["alpha"] == alpha and r["snr_db"] == snr]
            out.append(dict(snr_db=snr, alpha=alpha, images=len(sel),
                            mean_distance=_mean(sel),
                            fraction_below_epsilon=float(np.mean([d < epsilon for d in sel]))))
    return out


def sweep_summary(rows):
    out = []
    for scheme in SCHEMES:
        for snr in sorted({r["snr_db"] for r in rows}):
            sel = [r for r in rows if r["scheme"] == scheme and r["snr_db"] == snr]
            if not sel:
                continue
            out.append(dict(scheme=scheme, snr_db=snr, images=len(sel),
                            mean_psnr=_mean([r["psnr"] for r in sel]),
                            mean_ssim=_mean([r["ssim"] for r in sel]),
                            mean_wasserstein=_mean([r["wasserstein"] for r in sel]),
                            packet_bits=sel[0]["packet_bits"]))
    return out


DETECT_SUMMARY_FIELDS = ["snr_db", "alpha", "images", "mean_distance", "fraction_below_epsilon"]
SWEEP_SUMMARY_FIELDS = ["scheme", "snr_db", "images", "mean_psnr", "mean_ssim",
                        "mean_wasserstein", "packet_bits"]


# -- entry point --------------------------------------------------------------

def execute(spec):
    """Run ``spec`` and return ``{name: (csv_text, header)}`` without writing."""
    spec.validate()
    if spec.experiment == "detect-single":
        raws = load_dataset(spec.dataset, spec.image_index + 1, spec.seed)
        if spec.image_index >= len(raws):
            raise ConfigError(f"image index {spec.image_index} out of range")
        args = [(spec.image_index, raws[spec.image_index], s) for s in range(len(spec.snrs))]
        rows = _run_trials(spec, detect_trial, args)
        return {"detect-single": (rows, DETECT_FIELDS)}
    raws = load_dataset(spec.dataset, spec.count, spec.seed)[:spec.count]
    if not raws:
        raise ConfigError("dataset is empty")
    if spec.experiment == "detect-batch":
        args = [(i, r, s) for s in range(len(spec.snrs)) for i, r in enumerate(raws)]
        rows = _run_trials(spec, detect_trial, args)
        rows.sort(key=lambda r: (r["image"], r["snr_db"], r["alpha"]))
        return {"detect-batch": (rows, DETECT_FIELDS),
                "detect-batch_summary": (detect_summary(rows, spec.epsilon), DETECT_SUMMARY_FIELDS)}
    snr_indices = [0] if spec.experiment == "correct-compare" else range(len(spec.snrs))
    args = [(i, r, s) for s in snr_indices for i, r in enumerate(raws)]
    rows = _run_trials(spec, correct_trial, args)
    order = {s: k for k, s in enumerate(SCHEMES)}
    rows.sort(key=lambda r: (r["image"], order[r["scheme"]], r["snr_db"]))
    result = {spec.experiment: (rows, CORRECT_FIELDS)}
    if spec.experiment == "snr-sweep":
        result["snr-sweep_summary"] = (sweep_summary(rows), SWEEP_SUMMARY_FIELDS)
    return result


def run(spec):
    """Run ``spec``, write CSVs and ``manifest.json`` under ``spec.out``;
    returns ``{name: path}``."""
    results = execute(spec)
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, (rows, header) in results.items():
        path = out / f"{name}.csv"
        path.write_text(_to_csv(rows, header))
        paths[name] = str(path)
    manifest = {
        "experiment": spec.experiment,
        "spec": asdict(spec),
        "seeds": {"base": spec.seed,
                  "derivation": "numpy SeedSequence([seed, image, snr_index, scheme_stream])"},
        "code_version": __version__,
        "backend": BACKEND,
        "outputs": {k: Path(v).name for k, v in paths.items()},
    }
    mpath = out / "manifest.json"
    mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    paths["manifest"] = str(mpath)
    return paths


def rerun(manifest_path, out=None):
    """Re-execute the run recorded in a manifest (optionally elsewhere)."""
    data = json.loads(Path(manifest_path).read_text())
    spec = ExperimentSpec.from_dict(data["spec"])
    if out is not None:
        spec = replace(spec, out=str(out))
    return run(spec)
