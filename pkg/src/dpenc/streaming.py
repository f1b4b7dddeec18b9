"""Sample-at-a-time encoders for a single lead.

Each stream object owns its state and must not be shared between threads.
``push(x)`` returns the output row for the sample just pushed (an ``int8``
array of length ``channel_ratio``) or ``None`` while the stream is still
inside the encoder's warm-up (the batch encoder's ``origin_offset``).
Fed the same samples, a stream reproduces the batch encoder row for row.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from dpenc.encoders import (
    CtemConfig,
    DeltaConfig,
    DiscretisedConfig,
    DpConfig,
    EncoderConfig,
    FtemConfig,
    IftemConfig,
    _level_of,
    make_config,
    sine_table,
)


def _crossing(cur: float, prev: float) -> int:
    if cur > 0 and prev <= 0:
        return 1
    if cur < 0 and prev >= 0:
        return -1
    return 0


class _SineCache:
    # grows by doubling so values match sine_table() for the batch length
    def __init__(self, amplitude, wavelength):
        self.amplitude, self.wavelength = amplitude, wavelength
        self.table = sine_table(256, amplitude, wavelength)

    def __getitem__(self, k: int) -> float:
        while k >= self.table.shape[0]:
            self.table = sine_table(2 * self.table.shape[0], self.amplitude, self.wavelength)
        return self.table[k]


class Stream:
    channel_ratio = 1
    origin_offset = 0

    def __init__(self):
        self.t = -1

    def push(self, x: float) -> Optional[np.ndarray]:
        self.t += 1
        row = self._step(float(x))
        if self.t < self.origin_offset:
            return None
        return np.asarray(row, dtype=np.int8)

    def run(self, xs) -> np.ndarray:
        rows = [r for r in (self.push(x) for x in xs) if r is not None]
        return np.array(rows, dtype=np.int8).reshape(len(rows), self.channel_ratio)

    def _step(self, x):
        raise NotImplementedError


class DpStream(Stream):
    def __init__(self, cfg: DpConfig):
        super().__init__()
        self.orders = cfg.orders
        self.channel_ratio = len(cfg.orders)
        self.origin_offset = max(cfg.orders) + 1
        self.x_prev = None
        self.d1 = [None, None]  # d1(t-1), d1(t)
        self.d2 = [None, None]

    def _step(self, x):
        if self.x_prev is not None:
            self.d1 = [self.d1[1], x - self.x_prev]
            if self.d1[0] is not None:
                self.d2 = [self.d2[1], self.d1[1] - self.d1[0]]
        self.x_prev = x
        out = []
        for k in self.orders:
            prev, cur = self.d1 if k == 1 else self.d2
            out.append(0 if prev is None else _crossing(cur, prev))
        return out


class DeltaStream(Stream):
    origin_offset = 1

    def __init__(self, cfg: DeltaConfig):
        super().__init__()
        self.threshold = cfg.threshold
        self.ref = None

    def _step(self, x):
        if self.ref is None:
            self.ref = x
            return [0]
        d = x - self.ref
        if d >= self.threshold:
            self.ref = x
            return [1]
        if d <= -self.threshold:
            self.ref = x
            return [-1]
        return [0]


class DiscretisedStream(Stream):
    def __init__(self, cfg: DiscretisedConfig):
        super().__init__()
        self.cfg = cfg
        self.channel_ratio = cfg.channel_ratio
        self.origin_offset = 1 if cfg.method == "lc" else 0
        self.zero_level = _level_of(0.0, cfg)
        self.prev_level = None

    def _step(self, x):
        cfg = self.cfg
        level = _level_of(x, cfg)
        row = np.zeros(self.channel_ratio, dtype=np.int8)
        if cfg.method == "rate":
            row[: level + 1] = 1
        elif cfg.method == "fr":
            row[level] = 1
        elif cfg.method == "lc":
            prev, self.prev_level = self.prev_level, level
            if prev is not None and level > prev:
                row[prev + 1: level + 1] = 1
            elif prev is not None and level < prev:
                row[level + 1: prev + 1] = -1
        else:
            v = level - self.zero_level
            nbits = cfg.bit_channels - 1
            if abs(v) >= 2**nbits:
                raise ValueError(f"level offset {v} does not fit in {nbits} magnitude bits")
            row[0] = np.sign(v)
            for i, bit in enumerate(format(abs(v), f"0{nbits}b")):
                row[1 + i] = int(bit)
        return row


class CtemStream(Stream):
    origin_offset = 1

    def __init__(self, cfg: CtemConfig):
        super().__init__()
        self.center = cfg.center
        self.wave = _SineCache(cfg.amplitude, cfg.wavelength)
        self.prev = None

    def _step(self, x):
        g = x - (self.center + self.wave[self.t])
        prev, self.prev = self.prev, g
        return [0 if prev is None else _crossing(g, prev)]


class FtemStream(Stream):
    origin_offset = 1

    def __init__(self, cfg: FtemConfig):
        super().__init__()
        self.wave = _SineCache(cfg.amplitude, cfg.wavelength)
        self.anchor = cfg.center
        self.t0 = 0
        self.direction = 1.0
        self.prev = None

    def _step(self, x):
        g = x - (self.anchor + self.direction * self.wave[self.t - self.t0])
        prev, self.prev = self.prev, g
        if prev is None:
            return [0]
        p = _crossing(g, prev)
        if p:
            self.anchor, self.t0, self.direction = x, self.t, -float(p)
        return [p]


class IftemStream(Stream):
    def __init__(self, cfg: IftemConfig):
        super().__init__()
        self.cfg = cfg
        self.v = 0.0

    def _step(self, x):
        c = self.cfg
        self.v = c.leak * self.v + x + c.bias
        if self.v >= c.threshold:
            self.v -= c.threshold
            return [1]
        if self.v <= -c.threshold:
            self.v += c.threshold
            return [-1]
        return [0]


def make_stream(cfg: EncoderConfig) -> Stream:
    if isinstance(cfg, str):
        cfg = make_config(cfg)
    for kind, cls in (
        (DpConfig, DpStream),
        (DeltaConfig, DeltaStream),
        (DiscretisedConfig, DiscretisedStream),
        (CtemConfig, CtemStream),
        (FtemConfig, FtemStream),
        (IftemConfig, IftemStream),
    ):
        if isinstance(cfg, kind):
            return cls(cfg)
    raise TypeError(f"not an encoder config: {cfg!r}")
