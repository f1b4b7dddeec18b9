"""Synthetic multi-lead ECG built from Gaussian P, Q, R, S and T bumps.

Each beat is a sum of five Gaussians placed relative to the R-wave time;
leads are scaled copies of one base waveform. Output is deterministic for
a given seed, and can be snapped to a dyadic grid (``quantum``) so that
affine transforms of it are exact in floating point.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from dpenc.signal import Signal, SignalError, random_segment, extract_segment

WAVES = ("P", "Q", "R", "S", "T")

# (amplitude mV, offset from R s, width s)
DEFAULT_WAVE_PARAMS = {
    "P": (0.15, -0.20, 0.025),
    "Q": (-0.10, -0.035, 0.010),
    "R": (0.90, 0.0, 0.012),
    "S": (-0.20, 0.035, 0.010),
    "T": (0.30, 0.28, 0.045),
}

DEFAULT_LEAD_GAINS = (1.0, 0.9, 0.5, 0.7, 0.6, 0.8, 0.4, 0.6, 0.8, 1.0, 0.9, 0.7)
LEAD_NAMES = ("I", "II", "III", "aVR", "aVL", "aVF", "V1", "V2", "V3", "V4", "V5", "V6")

# grid on which 3-point sums are exactly divisible by 3
EXACT_MA_QUANTUM = 3.0 / 1024.0


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class SynthConfig:
    heart_rate_bpm: float = 70.0
    duration_s: float = 10.0
    sample_rate_hz: float = 100.0
    leads: int = 12
    wave_params: dict = field(default_factory=lambda: dict(DEFAULT_WAVE_PARAMS))
    lead_gains: Optional[tuple] = None
    st_offset_mv: float = 0.0
    rr_jitter_frac: float = 0.05
    first_beat_s: float = 0.3
    quantum: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if not self.heart_rate_bpm > 0 or not self.sample_rate_hz > 0:
            raise SynthError("heart rate and sample rate must be positive")
        if self.leads < 1:
            raise SynthError("need at least one lead")
        if self.duration_s < 60.0 / self.heart_rate_bpm:
            raise SynthError("duration must cover at least one beat")
        if not 0 <= self.rr_jitter_frac < 1:
            raise SynthError("rr_jitter_frac must lie in [0, 1)")
        params = {}
        for name in WAVES:
            if name not in self.wave_params:
                raise SynthError(f"missing wave parameters for {name}")
            amp, off, width = (float(v) for v in self.wave_params[name])
            if not width > 0:
                raise SynthError(f"{name}-wave width must be positive")
            params[name] = (amp, off, width)
        object.__setattr__(self, "wave_params", params)
        gains = self.gains()
        if len(gains) != self.leads or not np.all(np.isfinite(gains)):
            raise SynthError(f"need {self.leads} finite lead gains, got {len(gains)}")
        if self.quantum is not None and not self.quantum > 0:
            raise SynthError("quantum must be positive")

    def gains(self) -> np.ndarray:
        if self.lead_gains is not None:
            return np.asarray(self.lead_gains, dtype=np.float64)
        reps = -(-self.leads // len(DEFAULT_LEAD_GAINS))
        return np.asarray((DEFAULT_LEAD_GAINS * reps)[: self.leads], dtype=np.float64)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["wave_params"] = {k: list(v) for k, v in self.wave_params.items()}
        if d["lead_gains"] is not None:
            d["lead_gains"] = list(d["lead_gains"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise SynthError(f"unknown synth config keys: {sorted(unknown)}")
        if "wave_params" in d:
            waves = dict(DEFAULT_WAVE_PARAMS)
            waves.update({k: tuple(v) for k, v in d["wave_params"].items()})
            d["wave_params"] = waves
        if d.get("lead_gains") is not None:
            d["lead_gains"] = tuple(d["lead_gains"])
        return cls(**d)


def load_synth_config(path) -> SynthConfig:
    with open(path, encoding="utf-8") as fh:
        return SynthConfig.from_dict(json.load(fh))


def beat_times(cfg: SynthConfig) -> np.ndarray:
    """R-wave times in seconds, covering one beat either side of the record."""
    rng = np.random.default_rng(cfg.seed)
    rr0 = 60.0 / cfg.heart_rate_bpm
    times = [cfg.first_beat_s - rr0]
    while times[-1] < cfg.duration_s + rr0:
        rr = rr0 * (1.0 + cfg.rr_jitter_frac * rng.standard_normal())
        times.append(times[-1] + max(rr, 0.3 * rr0))
    return np.asarray(times)


def _st_window(t, start, stop, edge):
    return 1.0 / (1.0 + np.exp(-(t - start) / edge)) / (1.0 + np.exp((t - stop) / edge))


def base_waveform(cfg: SynthConfig) -> np.ndarray:
    fs = cfg.sample_rate_hz
    n = int(round(cfg.duration_s * fs))
    t = np.arange(n) / fs
    y = np.zeros(n)
    span = max(abs(off) + 5 * w for _, off, w in cfg.wave_params.values())
    s_off = cfg.wave_params["S"][1]
    t_off = cfg.wave_params["T"][1]
    for tb in beat_times(cfg):
        lo = max(0, int(np.floor((tb - span) * fs)))
        hi = min(n, int(np.ceil((tb + span) * fs)) + 1)
        if lo >= hi:
            continue
        tt = t[lo:hi] - tb
        for amp, off, width in cfg.wave_params.values():
            if amp:
                y[lo:hi] += amp * np.exp(-0.5 * ((tt - off) / width) ** 2)
        if cfg.st_offset_mv:
            y[lo:hi] += cfg.st_offset_mv * _st_window(tt, s_off, t_off, 0.01)
    return y


def gen_ecg(cfg: Optional[SynthConfig] = None) -> Signal:
    cfg = cfg or SynthConfig()
    x = base_waveform(cfg)[:, None] * cfg.gains()[None, :]
    if cfg.quantum is not None:
        x = np.round(x / cfg.quantum) * cfg.quantum
    names = LEAD_NAMES if cfg.leads == len(LEAD_NAMES) else None
    return Signal(x, sample_rate_hz=cfg.sample_rate_hz, lead_names=names)


def synth_segments(
    n: int,
    length: int = 256,
    seed: int = 0,
    cfg: Optional[SynthConfig] = None,
    heart_rate_range=(55.0, 95.0),
) -> list:
    """``n`` random windows of independently generated records.

    Heart rate, RR jitter and window start vary per segment; everything
    derives from ``seed``.
    """
    cfg = cfg or SynthConfig()
    if length < 2:
        raise SignalError("segment length must be at least 2")
    rng = np.random.default_rng(seed)
    duration = length / cfg.sample_rate_hz + 2.0
    out = []
    for _ in range(n):
        hr = float(rng.uniform(*heart_rate_range))
        sub = dataclasses.replace(
            cfg, heart_rate_bpm=hr, duration_s=max(duration, 60.0 / hr),
            seed=int(rng.integers(2**31)),
        )
        rec = gen_ecg(sub)
        spec = random_segment(rec, length, seed=int(rng.integers(2**31)))
        out.append(extract_segment(rec, spec))
    return out
