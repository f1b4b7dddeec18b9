"""Waveform container, segment extraction, smoothing and discrete derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


class SignalError(ValueError):
    """Invalid signal data or an operation the signal is too short for."""


@dataclass(frozen=True, eq=False)
class Signal:
    """Multi-lead waveform in mV, stored time-major as ``samples[t, c]``.

    ``origin`` is the input-coordinate index of row 0. It is 0 for recorded
    data and ``k`` for a ``k``-th order difference.
    """

    samples: np.ndarray
    sample_rate_hz: float = 100.0
    lead_names: Optional[tuple] = None
    origin: int = 0

    def __post_init__(self):
        x = np.array(self.samples, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise SignalError(f"samples must be 1-D or 2-D, got shape {x.shape}")
        if x.shape[0] < 1 or x.shape[1] < 1:
            raise SignalError(f"signal needs T >= 1 and C >= 1, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise SignalError("signal contains NaN or Inf")
        if not self.sample_rate_hz > 0:
            raise SignalError("sample_rate_hz must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)
        if self.lead_names is not None:
            names = tuple(str(n) for n in self.lead_names)
            if len(names) != x.shape[1]:
                raise SignalError(f"{len(names)} lead names for {x.shape[1]} channels")
            object.__setattr__(self, "lead_names", names)

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_channels(self) -> int:
        return self.samples.shape[1]

    def replace(self, samples: np.ndarray, origin: Optional[int] = None) -> "Signal":
        """Same metadata, new sample matrix."""
        return Signal(
            samples,
            sample_rate_hz=self.sample_rate_hz,
            lead_names=self.lead_names,
            origin=self.origin if origin is None else origin,
        )

    def __eq__(self, other):
        if not isinstance(other, Signal):
            return NotImplemented
        return (
            self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
            and self.sample_rate_hz == other.sample_rate_hz
            and self.lead_names == other.lead_names
            and self.origin == other.origin
        )

    __hash__ = None


@dataclass(frozen=True)
class SegmentSpec:
    start_index: int
    length: int = 256

    def __post_init__(self):
        if self.start_index < 0:
            raise SignalError("start_index must be non-negative")
        if self.length < 1:
            raise SignalError("segment length must be positive")


def as_signal(x, sample_rate_hz: float = 100.0) -> Signal:
    return x if isinstance(x, Signal) else Signal(x, sample_rate_hz=sample_rate_hz)


def moving_average_3(signal: Signal) -> Signal:
    """Centered 3-point mean; the two edge samples average their 2 available points."""
    x = signal.samples
    T = x.shape[0]
    if T == 1:
        return signal.replace(x.copy())
    y = np.empty_like(x)
    # centre plus mean deviation: exact on constant runs, where (c+c+c)/3 may not be
    mid = x[1:-1]
    y[1:-1] = mid + ((x[:-2] - mid) + (x[2:] - mid)) / 3.0
    y[0] = (x[0] + x[1]) / 2.0
    y[-1] = (x[-2] + x[-1]) / 2.0
    return signal.replace(y)


def diff(signal: Signal, order: int = 1) -> Signal:
    """Backward difference of order 1 or 2.

    The result has ``T - order`` rows and ``origin`` advanced by ``order``,
    so row ``i`` holds the derivative estimate at input time ``i + origin``.
    """
    if order not in (1, 2):
        raise SignalError(f"difference order must be 1 or 2, got {order}")
    T = signal.n_samples
    if T < order + 1:
        raise SignalError(f"signal of length {T} too short for order-{order} difference")
    d = np.diff(signal.samples, n=order, axis=0)
    return signal.replace(d, origin=signal.origin + order)


def extract_segment(signal: Signal, spec: SegmentSpec) -> Signal:
    end = spec.start_index + spec.length
    if end > signal.n_samples:
        raise SignalError(
            f"segment [{spec.start_index}, {end}) exceeds signal length {signal.n_samples}"
        )
    return signal.replace(signal.samples[spec.start_index:end].copy(), origin=0)


def random_segment(signal: Signal, length: int = 256, seed: int = 0) -> SegmentSpec:
    """Uniform start index in ``0..T-length`` from a seeded generator."""
    T = signal.n_samples if isinstance(signal, Signal) else int(signal)
    if length < 1:
        raise SignalError("segment length must be positive")
    if T < length:
        raise SignalError(f"signal of length {T} shorter than segment length {length}")
    rng = np.random.default_rng(seed)
    start = int(rng.integers(0, T - length, endpoint=True))
    return SegmentSpec(start, length)

