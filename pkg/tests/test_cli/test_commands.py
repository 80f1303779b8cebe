"""
Tests for the fastonn command-line tool.
"""
import json
import logging

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli.main import cli


@pytest.fixture
def runner():
    """Click test runner"""
    return CliRunner()


@pytest.fixture(autouse=True)
def reset_logging():
    """Drop the handlers a command installed on the root logger"""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)


def _run(runner, *args):
    return runner.invoke(cli, [str(arg) for arg in args], catch_exceptions=False)


def test_snr_curve(runner, tmp_path):
    """The 1 mW row has an SNR of about 145"""
    result = _run(runner, "snr-curve", "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    frame = pd.read_csv(tmp_path / "snr_curve.csv", float_precision="round_trip")
    assert list(frame.columns) == ["power_w", "snr_det", "snr_shot", "snr_rin", "snr_total", "bits"]
    assert len(frame) == 91
    row = frame.iloc[(frame["power_w"] - 1e-3).abs().argmin()]
    assert row["snr_total"] == pytest.approx(145, abs=1.5)
    assert (tmp_path / "manifest.json").exists()


def test_energy_report(runner, tmp_path):
    """Current column totals about 371 fJ/OP"""
    result = _run(runner, "energy-report", "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    frame = pd.read_csv(tmp_path / "energy_report.csv", float_precision="round_trip")
    total = frame.loc[frame["component"] == "total", "per_op_fj"].iloc[0]
    assert total == pytest.approx(371, abs=10)
    text = (tmp_path / "energy_report.txt").read_text()
    assert "Throughput" in text
    assert "1815" in text or "1814" in text

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["energy"]["laser_power_per_vcsel"] == 400e-6


def test_energy_report_near_term(runner, tmp_path):
    """Near-term preset totals about 2 fJ/OP"""
    result = _run(runner, "energy-report", "--preset", "near-term", "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output
    frame = pd.read_csv(tmp_path / "energy_report.csv", float_precision="round_trip")
    assert frame["per_op_fj"].iloc[-1] == pytest.approx(2.0, abs=0.1)


def test_mvm_bench_deterministic(runner, tmp_path):
    """Two noiseless single-trial runs write identical files"""
    first, second = tmp_path / "a", tmp_path / "b"
    first.mkdir()
    second.mkdir()
    for out in (first, second):
        result = _run(runner, "mvm-bench", "--noiseless", "--trials", 1, "--seed", 0, "--out", out, "--quiet")
        assert result.exit_code == 0, result.output

    for name in ("mvm_readouts.csv", "mvm_summary.json", "manifest.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_mvm_bench_noisy_error(runner, tmp_path):
    """Measured error std tracks the requested output error"""
    result = _run(runner, "mvm-bench", "--trials", 400, "--seed", 2, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output
    summary = json.loads((tmp_path / "mvm_summary.json").read_text())
    assert summary["error_std"] == pytest.approx(0.0327, abs=0.005)
    assert summary["target_output_error"] == 0.0327


def test_manifest_records_defaults(runner, tmp_path):
    """Every default is resolved into the manifest"""
    result = _run(runner, "mvm-bench", "--noiseless", "--trials", 2, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "mvm-bench"
    assert manifest["options"] == {
        "trials": 2, "noiseless": True, "output_error": 0.0327,
        "crosstalk": None, "dac_bits": None, "adc_bits": None, "calibrated": False,
    }
    assert manifest["seed"] == 0
    config = manifest["config"]
    assert config["hardware"]["adc_bits"] == 10
    assert config["hardware"]["fanout_efficiencies"] == [1.0] * 9
    assert config["noise"]["nep"] == 5e-12
    assert config["training"]["batch_size"] == 32
    assert config["calibration"]["knots"] == 2049
    assert manifest["tool_version"]
    assert manifest["numpy_version"]


def test_mvm_bench_overrides(runner, tmp_path):
    """Per-command converter and crosstalk overrides land in the recorded config"""
    result = _run(runner, "mvm-bench", "--noiseless", "--trials", 2, "--adc-bits", 6, "--crosstalk", 0.05,
                  "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    hardware = json.loads((tmp_path / "manifest.json").read_text())["config"]["hardware"]
    assert hardware["adc_bits"] == 6
    assert hardware["crosstalk"] == 0.05
    assert hardware["dac_bits"] == 8


def test_mvm_bench_calibrated(runner, tmp_path):
    """A calibrated SLM stays inside the LUT bound plus one ADC step"""
    result = _run(runner, "mvm-bench", "--noiseless", "--calibrated", "--trials", 200, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    summary = json.loads((tmp_path / "mvm_summary.json").read_text())
    assert summary["calibrated"] is True
    assert summary["lut_max_step"] > 0.0
    adc_step = summary["full_scale"] / 2 ** 9
    assert summary["max_abs_error"] <= summary["quantization_bound"] + adc_step
    assert summary["error_std_over_full_scale"] == pytest.approx(summary["error_std"] / summary["full_scale"])
    assert isinstance(summary["noise_seed"], int)


def test_mvm_bench_bad_override(runner, tmp_path):
    """Out-of-range overrides are usage errors"""
    result = runner.invoke(cli, ["mvm-bench", "--adc-bits", "40", "--out", str(tmp_path), "--quiet"])
    assert result.exit_code == 2


def test_replay_is_byte_identical(runner, tmp_path):
    """Replaying a manifest reproduces every output file"""
    original, replayed = tmp_path / "original", tmp_path / "replayed"
    original.mkdir()
    replayed.mkdir()
    result = _run(runner, "mvm-bench", "--trials", 5, "--seed", 17, "--out", original, "--quiet")
    assert result.exit_code == 0, result.output

    result = _run(runner, "replay", original / "manifest.json", "--out", replayed, "--quiet")
    assert result.exit_code == 0, result.output
    for name in ("mvm_readouts.csv", "mvm_summary.json", "manifest.json"):
        assert (original / name).read_bytes() == (replayed / name).read_bytes()


def test_config_file_overrides(runner, tmp_path):
    """Sections in a config file replace the defaults"""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 3, "hardware": {"n_inputs": 4, "n_fanout": 2}}))
    result = _run(runner, "mvm-bench", "--config", config, "--noiseless", "--trials", 3, "--out", tmp_path,
                  "--quiet")
    assert result.exit_code == 0, result.output

    frame = pd.read_csv(tmp_path / "mvm_readouts.csv", float_precision="round_trip")
    assert len(frame) == 3 * 2
    assert sorted(frame["channel"].unique()) == [0, 1]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 3
    assert manifest["config"]["hardware"]["n_inputs"] == 4


def test_invalid_config_exits_one(runner, tmp_path):
    """Invalid values give a one-line diagnostic and exit 1"""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"hardware": {"adc_bits": 40}}))
    result = _run(runner, "snr-curve", "--config", config, "--out", tmp_path, "--quiet")
    assert result.exit_code == 1
    assert "error:" in result.output
    assert "adc_bits" in result.output


def test_missing_output_directory(runner, tmp_path):
    """Exit 1 naming the directory"""
    missing = tmp_path / "nowhere"
    result = _run(runner, "snr-curve", "--out", missing, "--quiet")
    assert result.exit_code == 1
    assert str(missing) in result.output


def test_unknown_subcommand(runner):
    """Usage error, exit 2"""
    result = runner.invoke(cli, ["levitate"])
    assert result.exit_code == 2
    assert "Usage" in result.output


def test_calibrate(runner, tmp_path):
    """LUT and residual report, with drift recovery"""
    result = _run(runner, "calibrate", "--noise-std", 0.0, "--repeats", 1, "--phase-offset", 0.05,
                  "--subset-fraction", 0.5, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output

    lut = pd.read_csv(tmp_path / "lut.csv", float_precision="round_trip")
    assert list(lut.columns) == ["weight_knot", "gray_level", "realized_weight"]
    assert lut["gray_level"].is_monotonic_increasing

    report = json.loads((tmp_path / "calibration_report.json").read_text())
    assert report["initial"]["max_abs_error"] <= 0.02
    assert report["drifted"]["max_abs_error"] > 0.02
    assert report["recalibrated"]["max_abs_error"] < 0.02
    assert report["gain_map"] == [1.0] * 9


def test_edge_detect_pgm(runner, tmp_path):
    """A PGM input yields an edge image and an agreement table"""
    image = tmp_path / "square.pgm"
    pixels = bytearray(16 * 16)
    for row in range(4, 12):
        pixels[row * 16 + 4:row * 16 + 12] = b"\xff" * 8
    image.write_bytes(b"P5\n16 16\n255\n" + bytes(pixels))

    result = _run(runner, "edge-detect", "--image", image, "--noiseless", "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "edges.pgm").read_bytes().startswith(b"P5\n16 16\n255\n")
    frame = pd.read_csv(tmp_path / "edge_agreement.csv", float_precision="round_trip")
    assert frame["agreement"].iloc[0] == 1.0


def test_edge_detect_png(runner, tmp_path):
    """Common image formats are accepted, not only graymaps"""
    from PIL import Image

    pixels = np.zeros((12, 12), dtype=np.uint8)
    pixels[3:9, 3:9] = 255
    Image.fromarray(pixels).save(tmp_path / "logo.png")

    result = _run(runner, "edge-detect", "--image", tmp_path / "logo.png", "--noiseless", "--out", tmp_path,
                  "--quiet")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "edges.pgm").read_bytes().startswith(b"P5\n12 12\n255\n")
    frame = pd.read_csv(tmp_path / "edge_agreement.csv", float_precision="round_trip")
    assert frame["image"].iloc[0].endswith("logo.png")
    assert frame["agreement"].iloc[0] == 1.0


def test_edge_detect_needs_input(runner, tmp_path):
    """Neither --image nor --dataset is a usage error"""
    result = runner.invoke(cli, ["edge-detect", "--out", str(tmp_path), "--quiet"])
    assert result.exit_code == 2


def test_train_infer_sweep(runner, tmp_path, synthetic_images):
    """Train, infer and sweep on a tiny on-disk dataset"""
    from src.datasets.idx import write_idx

    data = tmp_path / "data" / "mnist"
    data.mkdir(parents=True)
    write_idx(data / "train-images-idx3-ubyte", data / "train-labels-idx1-ubyte", synthetic_images)
    write_idx(data / "t10k-images-idx3-ubyte", data / "t10k-labels-idx1-ubyte", synthetic_images)
    data_dir = tmp_path / "data"

    result = _run(runner, "train", "--data-dir", data_dir, "--epochs", 2, "--batch-size", 20, "--out", tmp_path,
                  "--quiet")
    assert result.exit_code == 0, result.output
    history = pd.read_csv(tmp_path / "history.csv", float_precision="round_trip")
    assert history["epoch"].tolist() == [1, 2]
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["config"]["training"]["epochs"] == 2

    checkpoint = tmp_path / "model.fonn"
    result = _run(runner, "infer", "--data-dir", data_dir, "--checkpoint", checkpoint, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["images"] == len(synthetic_images)
    confusion = pd.read_csv(tmp_path / "confusion.csv", index_col="true", float_precision="round_trip")
    assert confusion.to_numpy().sum() == len(synthetic_images)

    result = _run(runner, "noise-sweep", "--data-dir", data_dir, "--checkpoint", checkpoint, "--sigma", 0.0,
                  "--sigma", 0.3, "--out", tmp_path, "--quiet")
    assert result.exit_code == 0, result.output
    sweep = pd.read_csv(tmp_path / "noise_sweep.csv", float_precision="round_trip")
    assert sweep["sigma"].tolist() == [0.0, 0.3]
    assert sweep["accuracy"].iloc[0] == metrics["accuracy"]


def test_bad_checkpoint_exits_one(runner, tmp_path, synthetic_images):
    """A corrupt checkpoint is a data error"""
    from src.datasets.idx import write_idx

    data = tmp_path / "mnist"
    data.mkdir()
    write_idx(data / "t10k-images-idx3-ubyte", data / "t10k-labels-idx1-ubyte", synthetic_images)
    checkpoint = tmp_path / "model.fonn"
    checkpoint.write_bytes(b"NOPE")

    result = _run(runner, "infer", "--data-dir", tmp_path, "--checkpoint", checkpoint, "--out", tmp_path, "--quiet")
    assert result.exit_code == 1
    assert "FONN" in result.output
