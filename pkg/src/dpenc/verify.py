"""Invariance checks run by ``dpenc verify``.

Segments are snapped to a grid of 3/1024 mV. On that grid every gain in
{0.5, 1, 2, 4}, every shift in {+-1, +-0.25, 0} and the 3-point moving
average are exact in binary floating point, so the invariance properties
must hold entry for entry.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from dpenc.artefacts import Rescale, Shift
from dpenc.encoders import SpikeTrain, make_config
from dpenc.pipeline import encode_pipeline
from dpenc.stats import compare_trains
from dpenc.synth import EXACT_MA_QUANTUM, SynthConfig, synth_segments

GAINS = (0.5, 1.0, 2.0, 4.0)
SHIFTS = (-1.0, -0.25, 0.0, 0.25, 1.0)
SENSITIVITY_MIN = 0.3


@dataclass
class PropertyResult:
    name: str
    passed: bool
    detail: str


def exact_segments(n: int, seed: int, length: int = 256) -> list:
    cfg = SynthConfig(quantum=EXACT_MA_QUANTUM)
    return synth_segments(n, length=length, seed=seed, cfg=cfg)


def _corrupt(train: SpikeTrain) -> SpikeTrain:
    ev = train.events.copy()
    ev[0, 0] = 1 if ev[0, 0] != 1 else -1
    return dataclasses.replace(train, events=ev)


def run_suite(n_segments: int = 50, seed: int = 0, inject_fault: bool = False,
              length: int = 256) -> list:
    segs = exact_segments(n_segments, seed, length)
    results = []

    for enc in ("dp1", "dp12"):
        cfg = make_config(enc)
        worst, cases = 0.0, 0
        for i, s in enumerate(segs):
            for preprocess in (False, True):
                ref = encode_pipeline(s, None, preprocess, cfg)
                for a in GAINS:
                    for b in SHIFTS:
                        tr = encode_pipeline(s, [Rescale(a), Shift(b)], preprocess, cfg)
                        if inject_fault and enc == "dp1" and i == 0 and (a, b) == (2.0, 1.0):
                            tr = _corrupt(tr)
                        worst = max(worst, compare_trains(ref, tr).changed_fraction)
                        cases += 1
        results.append(PropertyResult(
            f"{enc}_affine_invariance", worst == 0.0,
            f"max changed_fraction={worst:.6f} over {cases} cases",
        ))

    cfg = make_config("delta")
    worst, cases = 0.0, 0
    for s in segs:
        for preprocess in (False, True):
            ref = encode_pipeline(s, None, preprocess, cfg)
            for b in SHIFTS:
                worst = max(worst, compare_trains(ref, encode_pipeline(s, Shift(b), preprocess, cfg)).changed_fraction)
                cases += 1
    results.append(PropertyResult(
        "delta_shift_invariance", worst == 0.0,
        f"max changed_fraction={worst:.6f} over {cases} cases",
    ))

    for enc in ("rate", "fr", "lc", "bitstring"):
        cfg = make_config(enc)
        diffs = [compare_trains(encode_pipeline(s, None, True, cfg),
                                encode_pipeline(s, Shift(1.0), True, cfg)) for s in segs]
        best = max(d.changed_nonzero_fraction for d in diffs)
        mean_cf = float(np.mean([d.changed_fraction for d in diffs]))
        results.append(PropertyResult(
            f"{enc}_shift_sensitivity", best >= SENSITIVITY_MIN,
            f"max changed_nonzero_fraction={best:.6f}, mean changed_fraction={mean_cf:.6f}",
        ))
    return results
