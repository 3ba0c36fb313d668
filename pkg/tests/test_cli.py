import json

import numpy as np
import pytest

from plcwt.cli import RunConfig, main
from plcwt.edge import EdgeConfig, bundled_wheel, pwt_baseline
from plcwt.errors import ConfigError
from plcwt.io import load_image, save_image
from plcwt.lct import LctParams


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_help_and_bad_arguments(capsys):
    assert run(capsys, "--help")[0] == 0
    assert run(capsys)[0] == 2
    assert run(capsys, "edge", "--fusion", "median")[0] == 2
    assert run(capsys, "edge", "--ab", "0.5")[0] == 2
    assert run(capsys, "verify", "--size", "8")[0] == 2
    assert run(capsys, "transform", "--scale-min", "-1")[0] == 2


def test_missing_input_is_config_error(capsys, tmp_path):
    code, _, err = run(capsys, "transform", str(tmp_path / "absent.pgm"), "--out",
                       str(tmp_path / "x.plcwt"))
    assert code == 2 and "plcwt:" in err
    assert run(capsys, "transform")[0] == 2


def test_threads_env_is_validated(capsys, monkeypatch):
    monkeypatch.setenv("PLCWT_THREADS", "many")
    assert run(capsys, "admissibility")[0] == 2


def test_run_config_round_trip():
    cfg = RunConfig("transform", matrix=LctParams(1.0, 2.0, 0.0, 1.0), scale_min=0.5,
                    full_circle=True, padding=2)
    assert RunConfig.loads(cfg.dumps()) == cfg
    assert RunConfig.loads(json.dumps({"run_config": cfg.to_dict()})) == cfg
    with pytest.raises(ConfigError):
        RunConfig.from_dict(dict(cfg.to_dict(), colour="red"))
    with pytest.raises(ConfigError):
        RunConfig.loads("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig("edge", scale_min=1.0)


def test_run_config_grids():
    g = RunConfig("transform").grid()
    assert np.allclose(g.scales, 1.5 ** np.arange(1, 6))
    assert np.allclose(g.angles, np.arange(8) * np.pi / 8)
    g = RunConfig("transform", scale_min=0.5, n_scales=3, full_circle=True, n_angles=4).grid()
    assert np.allclose(g.scales, [0.5, 0.75, 1.125])
    assert np.allclose(g.angles, np.arange(4) * np.pi / 2)


def test_admissibility_command(capsys, tmp_path):
    code, out, _ = run(capsys, "admissibility", "--ab", "0.1", "--wavelet-k0", "4",
                       "--zero-mean", "--wavelet-sigma", "1")
    assert code == 0
    rep = json.loads(out)
    # int |psi_hat|^2 / |eta|^2 for this wavelet; independent of the matrix
    assert abs(rep["value"] - 8.311816333513853) < 1e-6


def test_edge_ab_zero_equals_baseline(capsys, tmp_path):
    code, out, _ = run(capsys, "edge", "--ab", "0", "--out", str(tmp_path / "e"))
    assert code == 0
    rep = json.loads(out)
    img, _ = bundled_wheel()
    base = pwt_baseline(img, EdgeConfig())
    assert np.array_equal(load_image(tmp_path / "e_binary.pgm") > 0.5, base.binary)
    assert rep["edge_pixels"] == int(base.binary.sum())
    assert len(rep["files"]) == 3


def test_rerun_from_sidecar_is_identical(capsys, tmp_path):
    img = tmp_path / "in.pgm"
    save_image(np.random.default_rng(3).random((24, 24)), img)
    assert run(capsys, "edge", str(img), "--ab", "0.05", "--window", "10", "--threshold",
               "0.4", "--out", str(tmp_path / "a"))[0] == 0
    assert run(capsys, "edge", "--config", str(tmp_path / "a.json"), "--out",
               str(tmp_path / "b"))[0] == 0
    for suffix in ("_magnitude.pgm", "_binary.pgm"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()
    a = json.loads((tmp_path / "a.json").read_text())
    b = json.loads((tmp_path / "b.json").read_text())
    assert a["config"] == b["config"]


def test_transform_and_reconstruct(capsys, tmp_path):
    t = (np.arange(32) - 16) * 0.4
    x = np.exp(-(t[:, None] ** 2 + t[None, :] ** 2) / 4.5) * np.cos(2.0 * t)[None, :]
    np.save(tmp_path / "sig.npy", x)
    # 12 scales from 0.5 to 8 and 16 angles over the full circle
    common = ["--ab", "0.1", "--scale-min", "0.5", "--base", str(16 ** (1 / 11)), "--scales",
              "12", "--angles", "16", "--full-circle", "--wavelet-k0", "4", "--zero-mean"]
    code, out, _ = run(capsys, "transform", str(tmp_path / "sig.npy"), "--spacing", "0.4",
                       "--padding", "2", "--out", str(tmp_path / "v.plcwt"), *common)
    assert code == 0 and (tmp_path / "v.plcwt.json").exists()
    assert json.loads(out)["shape"] == [12, 16, 64, 64]
    code, out, _ = run(capsys, "reconstruct", str(tmp_path / "v.plcwt"), "--reference",
                       str(tmp_path / "sig.npy"), "--out", str(tmp_path / "rec.npy"))
    assert code == 0
    rep = json.loads(out)
    assert rep["relative_error"] < 0.05
    assert np.load(tmp_path / "rec.npy").shape == (32, 32)


def test_verify_passes(capsys, tmp_path):
    code, _, _ = run(capsys, "verify", "--size", "16", "--json", str(tmp_path / "v.json"))
    rep = json.loads((tmp_path / "v.json").read_text())
    assert code == 0 and rep["passed"]
    assert {c["name"] for c in rep["checks"]} >= {"lct_unitarity", "direct_oracle",
                                                  "heisenberg", "edge_recall"}
