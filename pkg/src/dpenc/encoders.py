"""Spike encoders.

Each encoder maps a :class:`~dpenc.signal.Signal` of shape ``(T, C)`` to a
:class:`SpikeTrain` whose event matrix has ``C * channel_ratio`` ternary
output channels. Output channels are grouped by input lead: channel
``c * channel_ratio + j`` is sub-channel ``j`` of lead ``c``.

Derived Peak (DP) encoding emits a signed event whenever a backward
difference of order ``k`` changes sign: +1 when ``d_k(t) > 0`` and
``d_k(t-1) <= 0``, -1 when ``d_k(t) < 0`` and ``d_k(t-1) >= 0``. Because
``sign(d_k(a*x + b)) == sign(d_k(x))`` for ``a > 0``, the output does not
depend on the gain or baseline of the input.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Union

import numpy as np

from dpenc import kernels
from dpenc.signal import Signal, SignalError, as_signal

ENCODER_IDS = ("dp1", "dp12", "delta", "rate", "fr", "lc", "bitstring", "ctem", "ftem", "iftem")
DISCRETISED_METHODS = ("rate", "fr", "lc", "bitstring")

# Calibrated on the default synthetic ECG (3-point MA on) with
# ``dpenc calibrate``; see README for the exact invocations.
DEFAULT_DELTA_THRESHOLD = 0.1
DEFAULT_FTEM_WAVELENGTH = 9.0
DEFAULT_IFTEM_THRESHOLD = 0.54
DEFAULT_IFTEM_LEAK = 0.9


class EncoderError(ValueError):
    """Bad encoder parameters or an input the encoder cannot handle."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DpConfig:
    orders: tuple = (1,)

    def __post_init__(self):
        orders = tuple(sorted(set(int(k) for k in self.orders)))
        if not orders:
            raise EncoderError("DP needs at least one derivative order")
        if any(k not in (1, 2) for k in orders):
            raise EncoderError(f"DP orders must be drawn from {{1, 2}}, got {orders}")
        object.__setattr__(self, "orders", orders)

    @property
    def encoder_id(self) -> str:
        return "dp" + "".join(str(k) for k in self.orders)

    @property
    def channel_ratio(self) -> int:
        return len(self.orders)


@dataclass(frozen=True)
class DeltaConfig:
    threshold: float = DEFAULT_DELTA_THRESHOLD

    def __post_init__(self):
        if not self.threshold > 0:
            raise EncoderError(f"delta threshold must be positive, got {self.threshold}")

    encoder_id = "delta"
    channel_ratio = 1


@dataclass(frozen=True)
class DiscretisedConfig:
    """Amplitude grid of ``n_bins`` bins of ``bin_width`` mV starting at ``range_lo``."""

    method: str = "rate"
    n_bins: int = 31
    bin_width: float = 0.05
    range_lo: float = -0.55
    bit_channels: int = 7

    def __post_init__(self):
        if self.method not in DISCRETISED_METHODS:
            raise EncoderError(f"unknown discretised method {self.method!r}")
        if self.n_bins < 1 or not self.bin_width > 0:
            raise EncoderError("discretisation grid needs n_bins >= 1 and bin_width > 0")
        if self.bit_channels < 2:
            raise EncoderError("bitstring needs a sign channel and at least one magnitude bit")

    @property
    def range_hi(self) -> float:
        return self.range_lo + self.n_bins * self.bin_width

    @property
    def encoder_id(self) -> str:
        return self.method

    @property
    def channel_ratio(self) -> int:
        return self.bit_channels if self.method == "bitstring" else self.n_bins


@dataclass(frozen=True)
class CtemConfig:
    amplitude: float = 2.0
    wavelength: float = 10.0
    center: float = 0.0

    def __post_init__(self):
        _check_wave(self.amplitude, self.wavelength)

    encoder_id = "ctem"
    channel_ratio = 1


@dataclass(frozen=True)
class FtemConfig:
    amplitude: float = 2.0
    wavelength: float = DEFAULT_FTEM_WAVELENGTH
    center: float = 0.0

    def __post_init__(self):
        _check_wave(self.amplitude, self.wavelength)

    encoder_id = "ftem"
    channel_ratio = 1


@dataclass(frozen=True)
class IftemConfig:
    threshold: float = DEFAULT_IFTEM_THRESHOLD
    leak: float = DEFAULT_IFTEM_LEAK
    bias: float = 0.0

    def __post_init__(self):
        if not self.threshold > 0:
            raise EncoderError(f"IFTEM threshold must be positive, got {self.threshold}")
        if not 0.0 <= self.leak <= 1.0:
            raise EncoderError(f"IFTEM leak must lie in [0, 1], got {self.leak}")

    encoder_id = "iftem"
    channel_ratio = 1


EncoderConfig = Union[DpConfig, DeltaConfig, DiscretisedConfig, CtemConfig, FtemConfig, IftemConfig]


def _check_wave(amplitude, wavelength):
    if wavelength < 2:
        raise EncoderError(f"reference wavelength must be >= 2 timesteps, got {wavelength}")
    if not np.isfinite(amplitude):
        raise EncoderError("reference amplitude must be finite")


def make_config(encoder_id: str, **params) -> EncoderConfig:
    """Default configuration for ``encoder_id`` with keyword overrides."""
    if encoder_id == "dp1":
        base = DpConfig((1,))
    elif encoder_id == "dp12":
        base = DpConfig((1, 2))
    elif encoder_id == "dp2":
        base = DpConfig((2,))
    elif encoder_id == "delta":
        base = DeltaConfig()
    elif encoder_id in DISCRETISED_METHODS:
        base = DiscretisedConfig(method=encoder_id)
    elif encoder_id == "ctem":
        base = CtemConfig()
    elif encoder_id == "ftem":
        base = FtemConfig()
    elif encoder_id == "iftem":
        base = IftemConfig()
    else:
        raise EncoderError(f"unknown encoder id {encoder_id!r}; expected one of {ENCODER_IDS}")
    if not params:
        return base
    known = {f.name for f in dataclasses.fields(base)}
    unknown = set(params) - known
    if unknown:
        raise EncoderError(f"{encoder_id} has no parameter(s) {sorted(unknown)}")
    return dataclasses.replace(base, **params)


def config_params(cfg: EncoderConfig) -> dict:
    """Plain-dict view of a config, suitable for JSON."""
    return {"encoder": cfg.encoder_id, **dataclasses.asdict(cfg)}


# ---------------------------------------------------------------------------
# spike trains
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    """Ternary event matrix ``events[t, q]`` with ``t`` offset by ``origin_offset``.

    Row ``i`` corresponds to input time ``i + origin_offset``.
    """

    events: np.ndarray
    channel_ratio: int
    origin_offset: int
    encoder_id: str
    source_length: int

    def __post_init__(self):
        ev = np.asarray(self.events)
        if ev.ndim != 2:
            raise EncoderError(f"events must be 2-D, got shape {ev.shape}")
        if ev.dtype != np.int8:
            if ev.size and not np.all(np.isin(ev, (-1, 0, 1))):
                raise EncoderError("spike train entries must be -1, 0 or +1")
            ev = ev.astype(np.int8)
        elif ev.size and (ev.min() < -1 or ev.max() > 1):
            raise EncoderError("spike train entries must be -1, 0 or +1")
        if self.channel_ratio < 1 or ev.shape[1] % self.channel_ratio:
            raise EncoderError(
                f"{ev.shape[1]} output channels is not a multiple of ratio {self.channel_ratio}"
            )
        if self.origin_offset < 0 or ev.shape[0] + self.origin_offset > self.source_length:
            raise EncoderError("spike train extends past the end of its source signal")
        ev.setflags(write=False)
        object.__setattr__(self, "events", ev)

    @property
    def n_steps(self) -> int:
        return self.events.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.events.shape[1]

    @property
    def n_inputs(self) -> int:
        return self.events.shape[1] // self.channel_ratio

    @property
    def spike_count(self) -> int:
        return int(np.count_nonzero(self.events))

    def event_list(self):
        """``(t, channel, polarity)`` arrays for the nonzero entries, t in input coordinates."""
        rows, cols = np.nonzero(self.events)
        return rows + self.origin_offset, cols, self.events[rows, cols]

    def same_as(self, other: "SpikeTrain") -> bool:
        return (
            self.encoder_id == other.encoder_id
            and self.channel_ratio == other.channel_ratio
            and self.origin_offset == other.origin_offset
            and self.source_length == other.source_length
            and self.events.shape == other.events.shape
            and bool(np.array_equal(self.events, other.events))
        )

    def __eq__(self, other):
        if not isinstance(other, SpikeTrain):
            return NotImplemented
        return self.same_as(other)

    __hash__ = None


def _group(blocks) -> np.ndarray:
    # list of (T, C) blocks -> (T, C * len(blocks)), lead-major
    T, C = blocks[0].shape
    return np.stack(blocks, axis=2).reshape(T, C * len(blocks))


# ---------------------------------------------------------------------------
# encoders
# ---------------------------------------------------------------------------


def encode_dp(signal: Signal, orders=(1,)) -> SpikeTrain:
    """Derived Peak encoding on derivative orders ``orders`` (subset of {1, 2})."""
    cfg = orders if isinstance(orders, DpConfig) else DpConfig(tuple(orders))
    signal = as_signal(signal)
    x = signal.samples
    T = x.shape[0]
    kmax = max(cfg.orders)
    origin = kmax + 1
    if T < kmax + 2:
        raise SignalError(f"DP{cfg.orders} needs at least {kmax + 2} samples, got {T}")
    blocks = []
    for k in cfg.orders:
        # crossings of d_k are defined from input time k + 1 onward
        s = kernels.sign_crossings(np.diff(x, n=k, axis=0))
        blocks.append(s[origin - (k + 1):])
    events = blocks[0] if len(blocks) == 1 else _group(blocks)
    return SpikeTrain(events, cfg.channel_ratio, origin, cfg.encoder_id, T)


def encode_delta(signal: Signal, threshold: float = DEFAULT_DELTA_THRESHOLD) -> SpikeTrain:
    """Send-on-delta: fire when the input moves ``threshold`` away from the last firing value."""
    cfg = threshold if isinstance(threshold, DeltaConfig) else DeltaConfig(float(threshold))
    signal = as_signal(signal)
    T = signal.n_samples
    if T < 2:
        raise SignalError("delta encoding needs at least 2 samples")
    events = kernels.delta_events(signal.samples, cfg.threshold)
    return SpikeTrain(events, 1, 1, "delta", T)


def discretise(signal: Signal, grid: DiscretisedConfig) -> np.ndarray:
    """Bin index per sample, clamped to ``[0, n_bins - 1]``."""
    x = as_signal(signal).samples
    lv = np.floor((x - grid.range_lo) / grid.bin_width)
    return np.clip(lv, 0, grid.n_bins - 1).astype(np.int64)


def _level_of(value: float, grid: DiscretisedConfig) -> int:
    lv = np.floor((value - grid.range_lo) / grid.bin_width)
    return int(np.clip(lv, 0, grid.n_bins - 1))


def _grid(grid, method):
    if grid is None:
        return DiscretisedConfig(method=method)
    if grid.method != method:
        return dataclasses.replace(grid, method=method)
    return grid


def encode_rate(signal: Signal, grid: DiscretisedConfig = None) -> SpikeTrain:
    """Thermometer code: channels ``0..level`` fire at every step."""
    grid = _grid(grid, "rate")
    signal = as_signal(signal)
    levels = discretise(signal, grid)
    j = np.arange(grid.n_bins)
    events = (j <= levels[:, :, None]).astype(np.int8)
    T, C = levels.shape
    return SpikeTrain(events.reshape(T, C * grid.n_bins), grid.n_bins, 0, "rate", T)


def encode_fr(signal: Signal, grid: DiscretisedConfig = None) -> SpikeTrain:
    """Field response: one-hot on the current level."""
    grid = _grid(grid, "fr")
    signal = as_signal(signal)
    levels = discretise(signal, grid)
    j = np.arange(grid.n_bins)
    events = (j == levels[:, :, None]).astype(np.int8)
    T, C = levels.shape
    return SpikeTrain(events.reshape(T, C * grid.n_bins), grid.n_bins, 0, "fr", T)


def encode_lc(signal: Signal, grid: DiscretisedConfig = None) -> SpikeTrain:
    """Level crossing: one event on every level channel crossed between consecutive samples."""
    grid = _grid(grid, "lc")
    signal = as_signal(signal)
    T = signal.n_samples
    if T < 2:
        raise SignalError("level-crossing encoding needs at least 2 samples")
    events = kernels.level_crossings(discretise(signal, grid), grid.n_bins)
    return SpikeTrain(events, grid.n_bins, 1, "lc", T)


def encode_bitstring(signal: Signal, grid: DiscretisedConfig = None) -> SpikeTrain:
    """Sign channel plus big-endian magnitude bits of the level offset from the 0 mV bin."""
    grid = _grid(grid, "bitstring")
    signal = as_signal(signal)
    levels = discretise(signal, grid)
    offset = levels - _level_of(0.0, grid)
    nbits = grid.bit_channels - 1
    mag = np.abs(offset)
    if mag.size and mag.max() >= 2**nbits:
        raise EncoderError(f"level offset {mag.max()} does not fit in {nbits} magnitude bits")
    shifts = np.arange(nbits - 1, -1, -1)
    bits = (mag[:, :, None] >> shifts) & 1
    events = np.concatenate([np.sign(offset)[:, :, None], bits], axis=2).astype(np.int8)
    T, C = levels.shape
    return SpikeTrain(events.reshape(T, C * grid.bit_channels), grid.bit_channels, 0, "bitstring", T)


def sine_table(n: int, amplitude: float, wavelength: float) -> np.ndarray:
    """``amplitude * sin(2 pi k / wavelength)`` for ``k = 0..n-1``."""
    return amplitude * np.sin(2.0 * np.pi * np.arange(n) / wavelength)


def reference_wave(n: int, amplitude: float = 2.0, wavelength: float = 10.0, center: float = 0.0):
    return center + sine_table(n, amplitude, wavelength)


def encode_ctem(signal: Signal, cfg: CtemConfig = None) -> SpikeTrain:
    """Crossings of the input with a fixed sine reference."""
    cfg = cfg or CtemConfig()
    signal = as_signal(signal)
    T = signal.n_samples
    if T < 2:
        raise SignalError("CTEM needs at least 2 samples")
    ref = reference_wave(T, cfg.amplitude, cfg.wavelength, cfg.center)
    events = kernels.sign_crossings(signal.samples - ref[:, None])
    return SpikeTrain(events, 1, 1, "ctem", T)


def encode_ftem(signal: Signal, cfg: FtemConfig = None) -> SpikeTrain:
    """CTEM whose reference restarts from the input value at every event.

    After an event of polarity ``p`` at ``t0`` the reference becomes
    ``x(t0) - p * amplitude * sin(2 pi (t - t0) / wavelength)``, i.e. it
    departs from the input on the side the input just left.
    """
    cfg = cfg or FtemConfig()
    signal = as_signal(signal)
    T = signal.n_samples
    if T < 2:
        raise SignalError("FTEM needs at least 2 samples")
    wave = sine_table(T, cfg.amplitude, cfg.wavelength)
    events = kernels.ftem_events(signal.samples, wave, cfg.center)
    return SpikeTrain(events, 1, 1, "ftem", T)


def encode_iftem(signal: Signal, cfg: IftemConfig = None) -> SpikeTrain:
    """Leaky integrate-and-fire with symmetric thresholds and reset by subtraction."""
    cfg = cfg or IftemConfig()
    signal = as_signal(signal)
    events = kernels.iftem_events(signal.samples, cfg.threshold, cfg.leak, cfg.bias)
    return SpikeTrain(events, 1, 0, "iftem", signal.n_samples)


_DISCRETISED = {"rate": encode_rate, "fr": encode_fr, "lc": encode_lc, "bitstring": encode_bitstring}


def encode(signal: Signal, cfg: EncoderConfig) -> SpikeTrain:
    """Run the encoder described by ``cfg``."""
    if isinstance(cfg, str):
        cfg = make_config(cfg)
    if isinstance(cfg, DpConfig):
        return encode_dp(signal, cfg)
    if isinstance(cfg, DeltaConfig):
        return encode_delta(signal, cfg)
    if isinstance(cfg, DiscretisedConfig):
        return _DISCRETISED[cfg.method](signal, cfg)
    if isinstance(cfg, CtemConfig):
        return encode_ctem(signal, cfg)
    if isinstance(cfg, FtemConfig):
        return encode_ftem(signal, cfg)
    if isinstance(cfg, IftemConfig):
        return encode_iftem(signal, cfg)
    raise EncoderError(f"not an encoder config: {cfg!r}")
