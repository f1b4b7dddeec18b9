import json

import pytest

from dpenc.cli import main
from dpenc.io import read_csv_signal, read_spike_events, read_stats


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_encode_dp1_synth(tmp_path, capsys):
    spk, st = tmp_path / "e.spk", tmp_path / "s.txt"
    code, out, _ = run(capsys, "encode", "--synth", "default", "--encoder", "dp1",
                       "--out", str(spk), "--stats-out", str(st))
    assert code == 0
    assert "output_channel_ratio=1" in out
    tr = read_spike_events(spk)
    assert tr.encoder_id == "dp1" and tr.source_length == 256
    assert read_stats(st).output_channel_ratio == 1


def test_encode_rate_ratio(capsys):
    code, out, _ = run(capsys, "encode", "--synth", "default", "--encoder", "rate")
    assert code == 0 and "output_channel_ratio=31" in out


def test_unknown_encoder(capsys):
    code, _, err = run(capsys, "encode", "--synth", "default", "--encoder", "nope")
    assert code == 1 and "nope" in err


def test_missing_input(capsys):
    code, _, err = run(capsys, "encode", "--encoder", "dp1")
    assert code == 1 and "input" in err


def test_bad_param(capsys):
    assert run(capsys, "encode", "--synth", "default", "--encoder", "delta", "--param", "threshold=-1")[0] == 1
    assert run(capsys, "encode", "--synth", "default", "--encoder", "delta", "--param", "junk")[0] == 1


def test_gen_corrupt_encode_stats(tmp_path, capsys):
    raw, bad = tmp_path / "raw.csv", tmp_path / "bad.csv"
    assert run(capsys, "gen", "--duration", "4", "--seed", "3", "--out", str(raw))[0] == 0
    assert read_csv_signal(raw).samples.shape == (400, 12)
    assert run(capsys, "corrupt", "--input", str(raw), "--artefact", "shift:1", "--out", str(bad))[0] == 0
    a, b = read_csv_signal(raw).samples, read_csv_signal(bad).samples
    assert abs((b - a).mean() - 1.0) < 1e-12
    files = []
    for src in (raw, bad):
        spk = tmp_path / f"{src.stem}.spk"
        assert run(capsys, "encode", "--input", str(src), "--encoder", "dp12", "--seed", "5", "--out", str(spk))[0] == 0
        files.append(spk)
    assert read_spike_events(files[0]).events.tolist() == read_spike_events(files[1]).events.tolist()
    code, out, _ = run(capsys, "stats", *map(str, files))
    assert code == 0 and "segment_count=2" in out


def test_encode_with_artefacts_and_no_preprocess(capsys):
    code, out, _ = run(capsys, "encode", "--synth", "default", "--encoder", "lc", "--no-preprocess",
                       "--artefact", "drift:rand", "--artefact", "noise:0.02:3")
    assert code == 0 and "drift:rand:0" in out and "noise:0.02:3" in out


def test_verify_passes_and_fault_fails(capsys):
    code, out, _ = run(capsys, "verify", "--segments", "4")
    assert code == 0 and "FAIL" not in out
    assert "rate_shift_sensitivity" in out
    code, out, _ = run(capsys, "verify", "--segments", "4", "--inject-fault")
    assert code == 2 and "FAIL dp1_affine_invariance" in out


def test_calibrate(tmp_path, capsys):
    out_json = tmp_path / "cal.json"
    code, out, _ = run(capsys, "calibrate", "--encoder", "ctem", "--param-name", "amplitude",
                       "--segments", "20", "--out", str(out_json))
    assert code == 0
    cal = json.loads(out_json.read_text())
    assert abs(cal["achieved_rate"] / 0.2 - 1) <= 0.05
    assert set(cal["params"]) == {"amplitude", "wavelength", "center"}
    code, out, _ = run(capsys, "calibrate", "--encoder", "iftem", "--segments", "20")
    rate = float(out.split("achieved_rate=")[1].split()[0])
    assert code == 0 and 0.05 <= rate <= 0.1


def test_calibrate_unbracketed(capsys):
    code, _, err = run(capsys, "calibrate", "--encoder", "delta", "--target", "0", "--segments", "5")
    assert code == 1 and "bracketed" in err


def test_bench(tmp_path, capsys):
    js = tmp_path / "b.json"
    code, out, _ = run(capsys, "bench", "--segments", "30", "--encoders", "dp1,fr", "--json", str(js))
    assert code == 0 and "dp1" in out
    rows = json.loads(js.read_text())
    assert rows[0]["segments_per_s"] > 0
    assert rows[1]["total_channel_output"] == 1.0
    assert run(capsys, "bench", "--encoders", "bogus")[0] == 1


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"encoder": "delta", "params": {"threshold": 0.2}, "preprocess": False,
                               "artefact": "shift:-1", "seed": 2}))
    code, out, _ = run(capsys, "--config", str(cfg), "encode", "--synth", "default")
    assert code == 0 and "encoder_id=delta" in out and "shift:-1.0" in out


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
