"""Command-line entry point: ``topocode <subcommand> ...``."""
import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .codec import decode_packet, encode_packet, topocode_size
from .datasets import read_idx, read_pgm, write_pgm
from .diagram import quantize
from .errors import CodecError, ConfigError, DatasetNotFoundError, TopocodeError
from .experiments import EXPERIMENTS, ExperimentSpec, rerun, run
from .homology import ORIENTATIONS, SUPERLEVEL, normalize, persistence_diagram
from .metrics import SCHEMES

EXIT_CODES = {ConfigError: 2, DatasetNotFoundError: 3, CodecError: 4}


def _floats(text):
    return tuple(float(x) for x in text.split(",") if x.strip())


def _schemes(text):
    return tuple(s for s in text.split(",") if s.strip())


def _experiment_parser(sub, name, help_text, **defaults):
    p = sub.add_parser(name, help=help_text)
    p.add_argument("--dataset", default="digits",
                   help="'digits', 'synthetic', an IDX file, or a directory of P5 PGM files")
    p.add_argument("--count", type=int, default=defaults.get("count", 50))
    p.add_argument("--snr", type=_floats, default=defaults.get("snrs", (3.0,)),
                   help="comma-separated SNR list in dB")
    p.add_argument("--pattern", choices=["all", "pixel", "line"], default=defaults.get("pattern", "all"))
    p.add_argument("--fraction", type=float, default=defaults.get("fraction", 1.0))
    p.add_argument("--lines", type=int, default=defaults.get("lines"),
                   help="number of noisy rows/columns (overrides --fraction for line noise)")
    p.add_argument("--alphas", type=_floats, default=(0.0, 0.15, 0.30, 0.45))
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--schemes", type=_schemes, default=SCHEMES)
    p.add_argument("--orientation", choices=ORIENTATIONS, default=SUPERLEVEL)
    p.add_argument("--image-index", type=int, default=0)
    p.add_argument("--gamma", type=float, default=1000.0)
    p.add_argument("--step", type=float, default=0.0003)
    p.add_argument("--iterations", type=int, default=300)
    p.add_argument("--ldpc-n", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=f"results/{name}")
    p.set_defaults(experiment=name)
    return p


def build_parser():
    parser = argparse.ArgumentParser(prog="topocode", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _experiment_parser(sub, "detect-single", "per-alpha distances for one image",
                       snrs=(1.0,), pattern="line", lines=2)
    _experiment_parser(sub, "detect-batch", "per-image per-alpha distances over a batch",
                       pattern="pixel", fraction=0.25)
    _experiment_parser(sub, "correct-compare", "all schemes at one SNR")
    _experiment_parser(sub, "snr-sweep", "all schemes across an SNR list",
                       snrs=(0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0))

    enc = sub.add_parser("encode", help="build a Topocode packet from an image")
    enc.add_argument("image", help="P5 PGM file or IDX file")
    enc.add_argument("--index", type=int, default=0, help="image index inside an IDX file")
    enc.add_argument("--orientation", choices=ORIENTATIONS, default=SUPERLEVEL)
    enc.add_argument("--out", required=True)

    dec = sub.add_parser("decode", help="parse a Topocode packet")
    dec.add_argument("packet")
    dec.add_argument("--out", help="write the payload as a P5 PGM")

    again = sub.add_parser("rerun", help="re-execute a run manifest")
    again.add_argument("manifest")
    again.add_argument("--out")
    return parser


def _read_image(path, index):
    p = Path(path)
    if not p.exists():
        raise DatasetNotFoundError(str(p))
    if p.suffix.lower() == ".pgm":
        return read_pgm(p)
    images = read_idx(p)
    if not 0 <= index < len(images):
        raise ConfigError(f"index {index} out of range for {len(images)} images")
    return images[index]


def _cmd_encode(args):
    raw = _read_image(args.image, args.index)
    diagram = persistence_diagram(normalize(raw), args.orientation)
    q = quantize(diagram)
    packet = encode_packet(raw, q, args.orientation)
    Path(args.out).write_bytes(packet)
    return {"bytes": len(packet), "topocode_bytes": topocode_size(q),
            "pairs": {str(h): len(g) for h, g in diagram.groups.items()}}


def _cmd_decode(args):
    path = Path(args.packet)
    if not path.exists():
        raise DatasetNotFoundError(str(path))
    pkt = decode_packet(path.read_bytes())
    if args.out:
        write_pgm(args.out, pkt.image_bytes)
    d = pkt.diagram
    return {"width": pkt.width, "height": pkt.height, "orientation": pkt.orientation,
            "diagram": {str(h): {"pairs": g.pairs.tolist(), "essential": g.essential.tolist()}
                        for h, g in d.groups.items()},
            "warnings": pkt.warnings}


def _spec_from_args(args):
    return ExperimentSpec(
        experiment=args.experiment, dataset=args.dataset, count=args.count, snrs=args.snr,
        pattern=args.pattern, fraction=args.fraction, lines=args.lines, alphas=args.alphas,
        epsilon=args.epsilon, p=args.p, seed=args.seed, out=args.out, schemes=args.schemes,
        orientation=args.orientation, image_index=args.image_index, gamma=args.gamma,
        step=args.step, iterations=args.iterations, ldpc_n=args.ldpc_n, jobs=args.jobs)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "encode":
            result = _cmd_encode(args)
        elif args.command == "decode":
            result = _cmd_decode(args)
        elif args.command == "rerun":
            result = rerun(args.manifest, args.out)
        elif args.command in EXPERIMENTS:
            result = run(_spec_from_args(args))
        else:  # pragma: no cover - argparse rejects unknown commands
            raise ConfigError(f"unknown command {args.command!r}")
    except TopocodeError as exc:
        code = next((c for cls, c in EXIT_CODES.items() if isinstance(exc, cls)), 1)
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return code
    print(json.dumps(result, default=lambda o: o.tolist() if isinstance(o, np.ndarray) else str(o)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
