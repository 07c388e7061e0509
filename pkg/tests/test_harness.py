import csv
import json

import numpy as np
import pytest

from topocode.cli import main
from topocode.errors import ConfigError
from topocode.experiments import CORRECT_FIELDS, DETECT_FIELDS, ExperimentSpec, execute, rerun, run
from topocode.metrics import packet_length


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_spec_validation():
    with pytest.raises(ConfigError):
        ExperimentSpec("correct-compare", schemes=()).validate()
    with pytest.raises(ConfigError):
        ExperimentSpec("correct-compare", count=0).validate()
    with pytest.raises(ConfigError):
        ExperimentSpec("correct-compare", snrs=()).validate()
    with pytest.raises(ConfigError):
        ExperimentSpec("fly").validate()
    with pytest.raises(ConfigError):
        ExperimentSpec("detect-batch", alphas=(0.5, 0.1)).validate()
    with pytest.raises(ConfigError):
        ExperimentSpec("detect-batch", schemes=("uncoded", "turbo")).validate()


def test_detect_single_rows(tmp_path):
    spec = ExperimentSpec("detect-single", snrs=(1.0,), pattern="line", lines=2,
                          out=str(tmp_path))
    paths = run(spec)
    rows = read_csv(paths["detect-single"])
    assert list(rows[0]) == DETECT_FIELDS
    assert [float(r["alpha"]) for r in rows] == [0.0, 0.15, 0.3, 0.45]


def test_correct_compare_rows_and_packet_lengths(tmp_path):
    spec = ExperimentSpec("correct-compare", count=2, snrs=(2.0,), iterations=20,
                          out=str(tmp_path))
    rows = read_csv(run(spec)["correct-compare"])
    assert list(rows[0]) == CORRECT_FIELDS
    assert len(rows) == 2 * 5
    assert [r["scheme"] for r in rows[:5]] == list(spec.schemes)
    for r in rows:
        expected = packet_length(r["scheme"], (28, 28), int(r["topocode_bytes"]))
        assert int(r["packet_bits"]) == expected


def test_parallel_execution_matches_serial():
    base = dict(count=3, snrs=(2.0,), iterations=10, schemes=("uncoded", "topocode"))
    serial = execute(ExperimentSpec("correct-compare", **base))
    parallel = execute(ExperimentSpec("correct-compare", jobs=2, **base))
    assert serial == parallel


def test_manifest_rerun_is_byte_identical(tmp_path):
    spec = ExperimentSpec("snr-sweep", count=2, snrs=(1.0, 4.0), iterations=15,
                          out=str(tmp_path / "a"))
    first = run(spec)
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["spec"]["count"] == 2 and "code_version" in manifest
    second = rerun(first["manifest"], tmp_path / "b")
    for name in ("snr-sweep", "snr-sweep_summary"):
        assert open(first[name], "rb").read() == open(second[name], "rb").read()


def test_cli_detect_batch(tmp_path, capsys):
    assert main(["detect-batch", "--count", "3", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    rows = read_csv(out["detect-batch_summary"])
    assert [float(r["alpha"]) for r in rows] == [0.0, 0.15, 0.3, 0.45]
    assert all(int(r["images"]) == 3 for r in rows)


def test_cli_encode_decode(tmp_path, capsys):
    img = np.zeros((6, 6), np.uint8)
    img[1:5, 1:5] = 255
    img[2:4, 2:4] = 0
    src = tmp_path / "ring.pgm"
    src.write_bytes(b"P5\n6 6\n255\n" + img.tobytes())
    assert main(["encode", str(src), "--out", str(tmp_path / "ring.tpc")]) == 0
    enc = json.loads(capsys.readouterr().out)
    assert enc["pairs"] == {"0": 0, "1": 1}
    assert main(["decode", str(tmp_path / "ring.tpc"), "--out", str(tmp_path / "back.pgm")]) == 0
    dec = json.loads(capsys.readouterr().out)
    assert dec["diagram"]["1"]["pairs"] == [[0.0, 1.0]]
    assert (tmp_path / "back.pgm").read_bytes() == src.read_bytes()


def test_cli_errors_are_structured(tmp_path, capsys):
    assert main(["decode", str(tmp_path / "none.tpc")]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "DatasetNotFoundError"
    (tmp_path / "junk.tpc").write_bytes(b"XXXX" + bytes(20))
    assert main(["decode", str(tmp_path / "junk.tpc")]) == 4
    assert json.loads(capsys.readouterr().err)["error"] == "BadMagicError"
    assert main(["correct-compare", "--schemes", "", "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "ConfigError"
