"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL/SKIP line that is echoed in the terminal
summary (see conftest.py) before asserting.
"""

import csv
import json
import os
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from dpenc import (
    ENCODER_IDS,
    CtemConfig,
    Drift,
    Noise,
    Rescale,
    Shift,
    Signal,
    calibrate_scalar,
    compare_trains,
    encode,
    encode_ctem,
    encode_dp,
    encode_pipeline,
    make_config,
    spike_rate_stats,
)
from dpenc.bench import run_bench
from dpenc.calibrate import CalibrationError
from dpenc.cli import main
from dpenc.io import (
    read_csv_signal,
    read_spike_events,
    read_wfdb16,
    write_csv_signal,
    write_spike_events,
    write_wfdb16,
)
from dpenc.pipeline import prepare
from dpenc.signal import extract_segment, random_segment
from dpenc.synth import EXACT_MA_QUANTUM, SynthConfig, gen_ecg, synth_segments

pytestmark = pytest.mark.acceptance

GAINS = (0.5, 1.0, 2.0, 4.0)
SHIFTS = (-1.0, -0.25, 0.0, 0.25, 1.0)
EXACT = SynthConfig(quantum=EXACT_MA_QUANTUM)


def report(n, title, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {n:>2}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def skip_report(n, title, reason):
    line = f"[SKIP] criterion {n:>2}: {title} ({reason})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    pytest.skip(reason)


@pytest.fixture(scope="module")
def exact_segments():
    return synth_segments(1000, seed=101, cfg=EXACT)


def test_c01_dp_affine_invariance(exact_segments):
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for x in exact_segments:
        for orders in ((1,), (1, 2)):
            ref = encode_dp(x, orders)
            for a in GAINS:
                for b in SHIFTS:
                    tr = encode_dp(x.replace(a * x.samples + b), orders)
                    worst = max(worst, compare_trains(ref, tr).changed_fraction)
                    cases += 1
    dt = time.perf_counter() - t0
    report(1, "DP affine invariance", worst == 0.0 and dt < 10.0,
           f"{len(exact_segments)} segments, {cases} cases, max changed_fraction={worst}, {dt:.2f}s")


def test_c02_shift_tolerance():
    t0 = time.perf_counter()
    segs = synth_segments(200, seed=102, cfg=EXACT)
    invariant = {}
    for enc in ("dp1", "dp12", "delta"):
        worst = 0.0
        for x in segs:
            ref = encode_pipeline(x, None, True, enc)
            for b in (1.0, -1.0):
                worst = max(worst, compare_trains(ref, encode_pipeline(x, Shift(b), True, enc)).changed_fraction)
        invariant[enc] = worst
    sensitive = {}
    for enc in ("rate", "fr", "lc", "bitstring"):
        diffs = [compare_trains(encode_pipeline(x, None, True, enc), encode_pipeline(x, Shift(1.0), True, enc))
                 for x in segs]
        sensitive[enc] = (max(d.changed_nonzero_fraction for d in diffs), max(d.changed_fraction for d in diffs))
    dt = time.perf_counter() - t0
    ok = (all(v == 0.0 for v in invariant.values())
          and all(nz >= 0.3 for nz, _ in sensitive.values())
          and sensitive["rate"][1] >= 0.3 and sensitive["bitstring"][1] >= 0.3
          and dt < 10.0)
    detail = ", ".join(f"{k} max changed={v}" for k, v in invariant.items()) + "; " + ", ".join(
        f"{k} best nonzero-changed={nz:.3f} (all-entry {cf:.3f})" for k, (nz, cf) in sensitive.items())
    report(2, "shift artefact tolerance", ok, f"{detail}; {dt:.2f}s")


def _robust(sig, orders):
    x = sig.samples
    return all(np.all(np.abs(np.diff(x, n=k, axis=0)) > 1e-9) for k in orders)


def test_c03_rescale_tolerance():
    segs = synth_segments(200, seed=103, cfg=EXACT)
    worst_dyadic = 0.0
    for x in segs:
        for enc in ("dp1", "dp12"):
            ref = encode_pipeline(x, None, True, enc)
            for a in (0.5, 2.0, 4.0):
                worst_dyadic = max(worst_dyadic, compare_trains(ref, encode_pipeline(x, Rescale(a), True, enc)).changed_fraction)
    # a = 3 needs difference signs that survive rounding; seeded noise removes flat runs
    noisy = [prepare(x, Noise(0.02, seed=i), preprocess=False) for i, x in enumerate(synth_segments(200, seed=104))]
    qualifying, worst3 = 0, 0.0
    for x in noisy:
        for enc, orders in (("dp1", (1,)), ("dp12", (1, 2))):
            clean, scaled = prepare(x), prepare(x, Rescale(3.0))
            if not (_robust(clean, orders) and _robust(scaled, orders)):
                continue
            qualifying += 1
            worst3 = max(worst3, compare_trains(encode(clean, enc), encode(scaled, enc)).changed_fraction)
    report(3, "rescale artefact tolerance", worst_dyadic == 0.0 and worst3 == 0.0 and qualifying >= 100,
           f"dyadic gains max changed={worst_dyadic}; gain 3 max changed={worst3} on {qualifying} qualifying cases")


def test_c04_drift_trend():
    t0 = time.perf_counter()
    segs = synth_segments(200, seed=104)
    means = {}
    for enc in ("dp1", "rate", "fr", "lc", "bitstring"):
        cfs = [compare_trains(encode_pipeline(x, None, True, enc),
                              encode_pipeline(x, Drift(phase_a=None, seed=i), True, enc)).changed_fraction
               for i, x in enumerate(segs)]
        means[enc] = float(np.mean(cfs))
    dt = time.perf_counter() - t0
    ok = all(means["dp1"] < means[e] for e in ("rate", "fr", "lc", "bitstring")) and dt < 30.0
    report(4, "drift trend", ok, ", ".join(f"{k} mean changed={v:.4f}" for k, v in means.items()) + f"; {dt:.2f}s")


def test_c05_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(105)
    mismatches = 0
    for _ in range(1000):
        T = int(rng.integers(4, 65))
        # coarse grid with repeated values so zeros and plateaus are common
        xs = (rng.integers(-3, 4, size=T) / 2.0)
        runs = rng.integers(1, 4, size=T)
        xs = np.repeat(xs, runs)[:T].tolist()
        for orders in ((1,), (2,), (1, 2)):
            if encode_dp(Signal(np.asarray(xs)), orders).events.tolist() != oracles.dp_scan(xs, orders):
                mismatches += 1
        amp, lam = float(rng.choice([0.5, 1.0, 2.0])), float(rng.choice([3.0, 7.5, 10.0]))
        got = encode_ctem(Signal(np.asarray(xs)), CtemConfig(amp, lam, 0.0)).events[:, 0].tolist()
        if got != oracles.ctem_scan(xs, amp, lam, 0.0):
            mismatches += 1
    dt = time.perf_counter() - t0
    report(5, "oracle equivalence", mismatches == 0 and dt < 5.0, f"1000 signals, {mismatches} mismatches, {dt:.2f}s")


def test_c06_structure():
    expected = {"dp1": 1, "dp12": 2, "delta": 1, "rate": 31, "fr": 31, "lc": 31,
                "bitstring": 7, "ctem": 1, "ftem": 1, "iftem": 1}
    segs = synth_segments(20, seed=106)
    ratios = {e: spike_rate_stats([encode(x, e) for x in segs]).output_channel_ratio for e in ENCODER_IDS}
    rng = np.random.default_rng(106)
    inputs = segs + [Signal(rng.uniform(-3, 3, size=(50, 4))), Signal(np.zeros((10, 1)))]
    fr_totals = {spike_rate_stats([encode(x, "fr")]).total_channel_output for x in inputs}
    report(6, "output channel ratios and FR total", ratios == expected and fr_totals == {1.0},
           f"ratios={'match' if ratios == expected else ratios}, FR totals={sorted(fr_totals)}")


# dataset-gated ---------------------------------------------------------------

PUBLISHED_TOTALS = {"dp1": 0.2, "dp12": 0.57, "rate": 11.56, "fr": 1.0, "lc": 0.51}
CAL_TARGETS = {"delta": ("threshold", 0.11), "ctem": ("wavelength", 0.2), "ftem": ("wavelength", 0.2),
               "iftem": ("threshold", 0.075)}


def _ptbxl_test_segments(root: Path, n: int, seed: int):
    with open(root / "ptbxl_database.csv", newline="", encoding="utf-8") as fh:
        files = [row["filename_lr"] for row in csv.DictReader(fh) if int(float(row["strat_fold"])) == 10]
    rng = np.random.default_rng(seed)
    cache, segs = {}, []
    for _ in range(n):
        name = files[int(rng.integers(len(files)))]
        if name not in cache:
            cache[name] = read_wfdb16(root / f"{name}.hea")
        rec = cache[name]
        segs.append(extract_segment(rec, random_segment(rec, 256, int(rng.integers(2**31)))))
    return segs


def test_c07_ptbxl_rates():
    title = "PTB-XL spike rates"
    root = os.environ.get("PTBXL_ROOT")
    if not root or not (Path(root) / "ptbxl_database.csv").exists():
        skip_report(7, title, "PTB-XL not found; set PTBXL_ROOT to the dataset directory to run")
    segs = [prepare(s) for s in _ptbxl_test_segments(Path(root), 1000, 107)]
    totals = {e: spike_rate_stats([encode(x, e) for x in segs]).total_channel_output for e in PUBLISHED_TOTALS}
    ok = all(abs(totals[e] / v - 1) <= 0.25 for e, v in PUBLISHED_TOTALS.items())
    cal = {}
    for enc, (param, target) in CAL_TARGETS.items():
        res = calibrate_scalar(enc, None, segs[:500], target, param=param)
        rate = spike_rate_stats([encode(x, res.config) for x in segs]).mean_channel_output
        cal[enc] = rate
        ok &= (0.05 <= rate <= 0.1) if enc == "iftem" else abs(rate / target - 1) <= 0.25
    report(7, title, ok, ", ".join(f"{k}={v:.3f}" for k, v in {**totals, **cal}.items()))


def test_c08_calibration_contract():
    t0 = time.perf_counter()
    signals = [prepare(s) for s in synth_segments(60, seed=108)]
    attempts, results = 0, []
    for enc, targets in {"delta": (0.05, 0.11, 0.2), "ctem": (0.1, 0.2), "ftem": (0.1, 0.2, 0.3),
                         "iftem": (0.05, 0.075, 0.1)}.items():
        for target in targets:
            attempts += 1
            try:
                res = calibrate_scalar(enc, None, signals, target)
            except CalibrationError as exc:
                if "bracketed" not in str(exc):
                    raise
                continue
            results.append((enc, target, res.relative_error))
    dt = time.perf_counter() - t0
    worst = max(r for _, _, r in results)
    report(8, "calibration contract", worst <= 0.05 and len(results) >= 8 and dt < 20.0,
           f"{len(results)}/{attempts} bracketed targets, worst relative error={worst:.4f}, {dt:.2f}s")


def test_c09_serialization(tmp_path):
    x = gen_ecg(SynthConfig(duration_s=5.0, seed=109))
    bad = []
    for enc in ENCODER_IDS:
        tr = encode_pipeline(x, Drift(None, seed=1), True, enc)
        p = tmp_path / f"{enc}.spk"
        write_spike_events(tr, p)
        if read_spike_events(p) != tr:
            bad.append(enc)
        csv_path = tmp_path / f"{enc}.csv"
        sig = prepare(x, Noise(0.05, seed=3))
        write_csv_signal(sig, csv_path)
        if np.max(np.abs(read_csv_signal(csv_path).samples - sig.samples)) > 1e-9:
            bad.append(f"{enc}-csv")
    report(9, "serialization round trip", not bad, f"10 encoders, failures={bad or 'none'}")


def test_c10_determinism_and_throughput(tmp_path, capsys):
    counts = []
    for run in range(2):
        out = tmp_path / f"bench{run}.json"
        assert main(["bench", "--segments", "300", "--seed", "7", "--json", str(out)]) == 0
        counts.append([(r["encoder_id"], r["spikes"]) for r in json.loads(out.read_text())])
    capsys.readouterr()
    row = run_bench(10_000, encoders=("dp12",), seed=0)[0]
    ok = counts[0] == counts[1] and row.seconds < 5.0
    report(10, "determinism and throughput", ok,
           f"bench runs identical={counts[0] == counts[1]}, dp12 on {row.segments} 12-lead segments in {row.seconds:.2f}s")


def test_ptbxl_loader_on_fake_tree(tmp_path):
    # mimics the dataset layout so the gated path above is exercised without the data
    (tmp_path / "records100" / "00000").mkdir(parents=True)
    rows = ["ecg_id,strat_fold,filename_lr"]
    for i, fold in enumerate((9, 10, 10), start=1):
        name = f"records100/00000/{i:05d}_lr"
        write_wfdb16(gen_ecg(SynthConfig(seed=i)), tmp_path / name)
        rows.append(f"{i},{fold},{name}")
    (tmp_path / "ptbxl_database.csv").write_text("\n".join(rows) + "\n")
    segs = _ptbxl_test_segments(tmp_path, 20, 0)
    assert len(segs) == 20 and all(s.samples.shape == (256, 12) for s in segs)
