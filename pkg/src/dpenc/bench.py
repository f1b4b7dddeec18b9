"""Encoding throughput on seeded synthetic 12-lead segments."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from dpenc._backend import get_backend, set_backend
from dpenc.encoders import ENCODER_IDS, encode, make_config
from dpenc.signal import extract_segment, moving_average_3, random_segment
from dpenc.stats import spike_rate_stats
from dpenc.synth import SynthConfig, gen_ecg


@dataclass
class BenchRow:
    encoder_id: str
    backend: str
    segments: int
    seconds: float
    spikes: int
    total_channel_output: float

    @property
    def segments_per_s(self) -> float:
        return self.segments / self.seconds if self.seconds > 0 else float("inf")

    @property
    def spikes_per_s(self) -> float:
        return self.spikes / self.seconds if self.seconds > 0 else float("inf")


def bench_segments(k: int, seed: int = 0, length: int = 256, leads: int = 12,
                   n_records: int = 16, record_s: float = 120.0) -> list:
    """``k`` preprocessed segments cut from a small pool of long synthetic records."""
    rng = np.random.default_rng(seed)
    records = []
    for _ in range(min(n_records, max(k, 1))):
        cfg = SynthConfig(
            heart_rate_bpm=float(rng.uniform(55, 95)), duration_s=record_s,
            leads=leads, seed=int(rng.integers(2**31)),
        )
        records.append(gen_ecg(cfg))
    segs = []
    for i in range(k):
        rec = records[i % len(records)]
        spec = random_segment(rec, length, seed=int(rng.integers(2**31)))
        segs.append(moving_average_3(extract_segment(rec, spec)))
    return segs


def run_bench(k: int = 1000, encoders=ENCODER_IDS, seed: int = 0, backend: str = None,
              segments=None) -> list:
    segs = segments if segments is not None else bench_segments(k, seed)
    previous = set_backend(backend) if backend else None
    try:
        rows = []
        for enc in encoders:
            cfg = make_config(enc)
            encode(segs[0], cfg)  # compile / warm caches outside the timed region
            t0 = time.perf_counter()
            trains = [encode(s, cfg) for s in segs]
            dt = time.perf_counter() - t0
            stats = spike_rate_stats(trains)
            rows.append(BenchRow(enc, get_backend(), len(segs), dt,
                                 sum(tr.spike_count for tr in trains), stats.total_channel_output))
        return rows
    finally:
        if previous:
            set_backend(previous)


def format_table(rows) -> str:
    head = f"{'encoder':<10} {'backend':<7} {'segments':>8} {'seconds':>9} {'seg/s':>10} {'spikes':>11} {'spikes/s':>12} {'total_out':>10}"
    out = [head, "-" * len(head)]
    for r in rows:
        out.append(
            f"{r.encoder_id:<10} {r.backend:<7} {r.segments:>8d} {r.seconds:>9.4f} "
            f"{r.segments_per_s:>10.1f} {r.spikes:>11d} {r.spikes_per_s:>12.1f} {r.total_channel_output:>10.6f}"
        )
    return "\n".join(out)


def rows_as_dicts(rows) -> list:
    return [dict(dataclasses.asdict(r), segments_per_s=r.segments_per_s, spikes_per_s=r.spikes_per_s)
            for r in rows]
