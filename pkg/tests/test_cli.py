import json
import os

import numpy as np
import pytest

from solitoncomm import zs
from solitoncomm.cli import (
    EXIT_COMPUTE,
    EXIT_CONFIG,
    EXIT_IO,
    SCHEMAS,
    ConfigError,
    load_config,
    resolve_params,
    run,
)


def run_in(tmp_path, argv, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return run(argv)


def test_synth_scatter_round_trip(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["synth", "--mode", "1,0,0,0", "--n-samples", "2048",
                "--t-span", "40", "--out", "w.csv"]) == 0
    assert run(["scatter", "--in", "w.csv", "--out", "sd.json"]) == 0
    sd = zs.scattering_data_from_json((tmp_path / "sd.json").read_text())
    assert len(sd.modes) == 1
    assert abs(sd.modes[0].zeta - 0.5j) < 1e-5
    assert abs(sd.modes[0].t_pos) < 1e-3


def test_scatter_zero_waveform_gives_empty_modes(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with open("zero.csv", "w") as fh:
        fh.write("t,re,im\n")
        for k in range(512):
            fh.write(f"{-10.0 + (k + 0.5) * 20.0 / 512!r},0.0,0.0\n")
    assert run(["scatter", "--in", "zero.csv", "--out", "sd.json"]) == 0
    payload = json.loads((tmp_path / "sd.json").read_text())
    assert payload["modes"] == []


def test_propagate_subcommand(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["synth", "--mode", "1,0,0,0", "--n-samples", "1024",
                "--t-span", "40", "--out", "w.csv"]) == 0
    assert run(["propagate", "--in", "w.csv", "--Z", "1.0",
                "--n-steps", "500", "--out", "wz.csv"]) == 0
    from solitoncomm.waveform import read_waveform_csv

    w0 = read_waveform_csv("w.csv")
    w1 = read_waveform_csv("wz.csv")
    assert np.max(np.abs(w1.samples - w0.samples * np.exp(0.5j))) < 1e-5


def test_load_config(tmp_path):
    schema = SCHEMAS["mc-var"]
    cfg = tmp_path / "run.cfg"
    cfg.write_text("")
    assert load_config(cfg, schema) == {}
    cfg.write_text("# comment\neta = 2.5\ntrials = 10\n")
    vals = load_config(cfg, schema)
    assert vals == {"eta": 2.5, "trials": 10}
    cfg.write_text("etamax = 3\n")
    with pytest.raises(ConfigError, match="etamax"):
        load_config(cfg, schema)


def test_param_resolution_order(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("eta = 2.5\nZ = 3.0\n")
    # file over defaults
    p = resolve_params("mc-var", {}, str(cfg))
    assert p["eta"] == 2.5 and p["Z"] == 3.0 and p["trials"] == 2000
    # env over file
    monkeypatch.setenv("SOLITONCOMM_ETA", "1.5")
    p = resolve_params("mc-var", {}, str(cfg))
    assert p["eta"] == 1.5
    # flags over env
    p = resolve_params("mc-var", {"eta": 0.7}, str(cfg))
    assert p["eta"] == 0.7


def test_manifest_round_trip_bit_identical(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    args = ["mc-var", "--eta", "1.0", "--eps", "0.05", "--Z", "0.5",
            "--trials", "15", "--seed", "99", "--n-samples", "512",
            "--t-span", "20", "--out", "mc.csv"]
    assert run(args) == 0
    first = (tmp_path / "mc.csv").read_bytes()
    manifest = json.loads((tmp_path / "mc.manifest.json").read_text())
    assert manifest["command"] == "mc-var"
    assert manifest["seed"] == 99
    (tmp_path / "mc.csv").unlink()
    assert run(["--from-manifest", "mc.manifest.json"]) == 0
    assert (tmp_path / "mc.csv").read_bytes() == first


def test_exit_codes(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["scatter", "--in", "nonexistent.csv"]) == EXIT_IO
    assert "code=io" in capsys.readouterr().err
    # compute error: soliton position far outside the window
    assert run(["synth", "--mode", "1,0,90,0", "--out", "w.csv"]) == EXIT_COMPUTE
    assert "code=compute" in capsys.readouterr().err
    # config error: unknown key in config file
    (tmp_path / "bad.cfg").write_text("not_a_key = 1\n")
    assert run(["mc-var", "--config", "bad.cfg"]) == EXIT_CONFIG
    assert "code=config" in capsys.readouterr().err
    # synth with no modes at all
    assert run(["synth", "--out", "w.csv"]) == EXIT_CONFIG


def test_every_csv_has_header(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    run(["synth", "--mode", "1,0,0,0", "--n-samples", "512", "--t-span", "20",
         "--out", "w.csv"])
    run(["ba", "--n-x", "60", "--n-y", "400", "--tol", "1e-7", "--out", "prior.csv"])
    for name in ("w.csv", "prior.csv", "prior_output.csv"):
        head = (tmp_path / name).read_text().splitlines()[0]
        assert any(c.isalpha() for c in head)


def test_ba_subcommand_output(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["ba", "--n-x", "100", "--n-y", "600", "--tol", "1e-8",
                "--out", "prior.csv"]) == 0
    out = capsys.readouterr().out
    assert "capacity=1.5" in out
    data = np.loadtxt(tmp_path / "prior.csv", delimiter=",", skiprows=1)
    assert data.shape[1] == 2
    assert data[:, 1].sum() == pytest.approx(1.0, abs=1e-8)


def test_reproduce_ba_figure(tmp_path, monkeypatch, capsys):
    monkeypatch.chdir(tmp_path)
    assert run(["reproduce", "ba-figure", "--outdir", "figs"]) == 0
    out = capsys.readouterr().out
    assert "capacity=1.5" in out
    assert os.path.exists("figs/ba_prior.csv")
    assert os.path.exists("figs/ba_prior_output.csv")


def test_reproduce_unknown_target(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["reproduce", "no-such-figure"]) == EXIT_CONFIG


def test_modgain_csv_columns(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["modgain", "--sigma-eff-list", "0.1,0.2",
                "--curve-points", "50", "--out", "mg.csv"]) == 0
    lines = (tmp_path / "mg.csv").read_text().splitlines()
    assert lines[0] == "eta_min,sigma_eff,gain_single,gain_off,gain_2bound,gain_ntrain"
    assert len(lines) == 1 + 2 * 50