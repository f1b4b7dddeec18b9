"""Acquisition artefacts: baseline shift, gain change, sinusoidal drift and Gaussian noise.

Text form used by the CLI and config files::

    shift:<a>            y = x + a
    rescale:<a>          y = a * x           (a > 0)
    drift:<phase|rand>   y = x + sin((256 + t + phase) * pi / 512)
    noise:<scale>:<seed> y = x + N(0, scale**2)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from dpenc.signal import Signal


class ArtefactError(ValueError):
    pass


@dataclass(frozen=True)
class Shift:
    a: float = 1.0


@dataclass(frozen=True)
class Rescale:
    a: float = 3.0

    def __post_init__(self):
        if not self.a > 0 or not np.isfinite(self.a):
            raise ArtefactError(f"rescale gain must be positive and finite, got {self.a}")


@dataclass(frozen=True)
class Drift:
    """Half-cycle of a slow sine added to the baseline.

    ``phase_a=None`` draws the phase uniformly from ``[0, 256]`` using ``seed``;
    the phase is constant across the segment. With ``strict`` set, explicit
    phases outside ``[0, 256]`` are rejected.
    """

    phase_a: Optional[float] = 0.0
    amplitude: float = 1.0
    halfperiod: float = 512.0
    seed: int = 0
    strict: bool = True

    def __post_init__(self):
        if self.phase_a is not None and self.strict and not 0.0 <= self.phase_a <= 256.0:
            raise ArtefactError(f"drift phase must lie in [0, 256], got {self.phase_a}")
        if not self.halfperiod > 0:
            raise ArtefactError("drift half-period must be positive")

    def resolve_phase(self) -> float:
        if self.phase_a is not None:
            return float(self.phase_a)
        return float(np.random.default_rng(self.seed).uniform(0.0, 256.0))


@dataclass(frozen=True)
class Noise:
    scale: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if not self.scale >= 0 or not np.isfinite(self.scale):
            raise ArtefactError(f"noise scale must be finite and >= 0, got {self.scale}")


ArtefactSpec = Union[Shift, Rescale, Drift, Noise]


def apply_shift(signal: Signal, a: float) -> Signal:
    return signal.replace(signal.samples + a)


def apply_rescale(signal: Signal, a: float) -> Signal:
    Rescale(a)
    return signal.replace(signal.samples * a)


def drift_offset(n: int, phase_a: float, amplitude: float = 1.0, halfperiod: float = 512.0):
    """Baseline offset at segment-local times ``0..n-1``."""
    t = np.arange(n, dtype=np.float64)
    return amplitude * np.sin((halfperiod / 2.0 + t + phase_a) * np.pi / halfperiod)


def apply_drift(signal: Signal, phase_a: float, amplitude: float = 1.0, halfperiod: float = 512.0):
    off = drift_offset(signal.n_samples, phase_a, amplitude, halfperiod)
    return signal.replace(signal.samples + off[:, None])


def apply_noise(signal: Signal, scale: float = 0.02, seed: int = 0) -> Signal:
    Noise(scale, seed)
    if scale == 0:
        return signal.replace(signal.samples.copy())
    rng = np.random.default_rng(seed)
    return signal.replace(signal.samples + rng.normal(0.0, scale, size=signal.samples.shape))


def apply_artefact(signal: Signal, spec: ArtefactSpec) -> Signal:
    if isinstance(spec, Shift):
        return apply_shift(signal, spec.a)
    if isinstance(spec, Rescale):
        return apply_rescale(signal, spec.a)
    if isinstance(spec, Drift):
        return apply_drift(signal, spec.resolve_phase(), spec.amplitude, spec.halfperiod)
    if isinstance(spec, Noise):
        return apply_noise(signal, spec.scale, spec.seed)
    raise ArtefactError(f"not an artefact spec: {spec!r}")


def parse_artefact(text: str, seed: int = 0) -> ArtefactSpec:
    """Parse ``shift:1``, ``rescale:0.333``, ``drift:rand``, ``drift:128``, ``noise:0.02:7``.

    ``seed`` is used by ``drift:rand`` and by ``noise:<scale>`` when no seed is given.
    """
    kind, _, rest = text.strip().partition(":")
    parts = rest.split(":") if rest else []
    try:
        if kind == "shift":
            return Shift(float(parts[0]) if parts else 1.0)
        if kind == "rescale":
            return Rescale(float(parts[0]) if parts else 3.0)
        if kind == "drift":
            if not parts or parts[0] == "rand":
                drift_seed = int(parts[1]) if len(parts) > 1 else seed
                return Drift(phase_a=None, seed=drift_seed)
            return Drift(phase_a=float(parts[0]))
        if kind == "noise":
            scale = float(parts[0]) if parts else 0.02
            noise_seed = int(parts[1]) if len(parts) > 1 else seed
            return Noise(scale, noise_seed)
    except (ValueError, IndexError) as exc:
        if isinstance(exc, ArtefactError):
            raise
        raise ArtefactError(f"malformed artefact spec {text!r}: {exc}") from None
    raise ArtefactError(f"unknown artefact kind {kind!r} in {text!r}")


def format_artefact(spec: ArtefactSpec) -> str:
    if isinstance(spec, Shift):
        return f"shift:{spec.a!r}"
    if isinstance(spec, Rescale):
        return f"rescale:{spec.a!r}"
    if isinstance(spec, Drift):
        if spec.phase_a is None:
            return f"drift:rand:{spec.seed}"
        return f"drift:{spec.phase_a!r}"
    if isinstance(spec, Noise):
        return f"noise:{spec.scale!r}:{spec.seed}"
    raise ArtefactError(f"not an artefact spec: {spec!r}")
