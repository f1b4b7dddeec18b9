"""File formats: CSV waveforms, WFDB format-16 records, sparse spike events, stats records.

Spike event files are plain text. The first line is a header::

    # dpenc-spikes shape=<T_out>x<Q> channel_ratio=<r> origin_offset=<o> encoder_id=<id> source_length=<T>

followed by one ``t,channel,polarity`` line per nonzero entry, with ``t`` in
input-signal coordinates (row index + origin_offset).
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from dpenc.encoders import SpikeTrain
from dpenc.signal import Signal
from dpenc.stats import SpikeStats, TrainDiff

SPIKE_MAGIC = "# dpenc-spikes"
STATS_MAGIC = "# dpenc-stats"


class FormatError(ValueError):
    """Malformed or inconsistent file contents."""


# ---------------------------------------------------------------------------
# CSV waveforms
# ---------------------------------------------------------------------------


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv_signal(path, sample_rate: float = 100.0) -> Signal:
    """One column per lead, values in mV, optional header row of lead names."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise FormatError(f"{path}: empty file")
    names = None
    if not all(_is_number(c) for c in rows[0]):
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise FormatError(f"{path}: header but no data rows")
    width = len(rows[0]) if names is None else len(names)
    data = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{path}: row {i + 1} has {len(row)} cells, expected {width}")
        try:
            data[i] = [float(c) for c in row]
        except ValueError as exc:
            raise FormatError(f"{path}: row {i + 1}: {exc}") from None
    return Signal(data, sample_rate_hz=sample_rate, lead_names=names)


def write_csv_signal(signal: Signal, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if signal.lead_names is not None:
            w.writerow(signal.lead_names)
        for row in signal.samples:
            w.writerow([repr(float(v)) for v in row])


# ---------------------------------------------------------------------------
# WFDB
# ---------------------------------------------------------------------------

DEFAULT_WFDB_GAIN = 200.0

_GAIN_RE = re.compile(r"^([-+0-9.eE]+)(?:\(([-+0-9]+)\))?(?:/(\S+))?$")


@dataclass(frozen=True)
class RecordHeader:
    record_name: str
    channel_count: int
    sample_count: int
    sample_rate_hz: float
    gains: tuple
    baselines: tuple
    lead_names: tuple
    file_name: str
    fmt: str
    byte_offset: int = 0


def read_wfdb_header(header_path) -> RecordHeader:
    lines = []
    with open(header_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                lines.append(line)
    if not lines:
        raise FormatError(f"{header_path}: empty header")
    rec = lines[0].split()
    if len(rec) < 2:
        raise FormatError(f"{header_path}: bad record line {lines[0]!r}")
    name = rec[0].split("/")[0]
    nsig = int(rec[1])
    fs = float(rec[2].split("/")[0].split("(")[0]) if len(rec) > 2 else 250.0
    nsamp = int(rec[3]) if len(rec) > 3 else 0
    if nsig < 1:
        raise FormatError(f"{header_path}: record has no signals")
    if len(lines) < 1 + nsig:
        raise FormatError(f"{header_path}: expected {nsig} signal lines, found {len(lines) - 1}")
    files, fmts, gains, baselines, names, offsets = [], [], [], [], [], []
    for i, line in enumerate(lines[1:1 + nsig]):
        f = line.split()
        if len(f) < 2:
            raise FormatError(f"{header_path}: bad signal line {line!r}")
        files.append(f[0])
        fmt, _, off = f[1].partition("+")
        fmt = fmt.split("x")[0].split(":")[0]
        fmts.append(fmt)
        offsets.append(int(off) if off else 0)
        gain, baseline = DEFAULT_WFDB_GAIN, None
        if len(f) > 2:
            m = _GAIN_RE.match(f[2])
            if not m:
                raise FormatError(f"{header_path}: bad gain field {f[2]!r}")
            gain = float(m.group(1)) or DEFAULT_WFDB_GAIN
            if m.group(2) is not None:
                baseline = int(m.group(2))
        adc_zero = int(f[4]) if len(f) > 4 else 0
        baselines.append(adc_zero if baseline is None else baseline)
        gains.append(gain)
        names.append(" ".join(f[8:]) if len(f) > 8 else f"ch{i}")
    if len(set(files)) != 1:
        raise FormatError(f"{header_path}: multi-file records are not supported")
    if len(set(fmts)) != 1 or len(set(offsets)) != 1:
        raise FormatError(f"{header_path}: mixed storage formats are not supported")
    return RecordHeader(
        record_name=name,
        channel_count=nsig,
        sample_count=nsamp,
        sample_rate_hz=fs,
        gains=tuple(gains),
        baselines=tuple(baselines),
        lead_names=tuple(names),
        file_name=files[0],
        fmt=fmts[0],
        byte_offset=offsets[0],
    )


def read_wfdb16(header_path, data_path=None) -> Signal:
    """Read a format-16 record and convert to mV as ``(raw - baseline) / gain``."""
    hdr = read_wfdb_header(header_path)
    if hdr.fmt != "16":
        raise FormatError(f"unsupported WFDB format {hdr.fmt!r}; only format 16 is supported")
    if data_path is None:
        data_path = Path(header_path).parent / hdr.file_name
    raw = np.fromfile(data_path, dtype="<i2", offset=hdr.byte_offset)
    n = hdr.channel_count
    if hdr.sample_count:
        expected = hdr.sample_count * n
        if raw.size != expected:
            raise FormatError(
                f"{data_path}: {raw.size} samples on disk, header declares {expected}"
            )
    elif raw.size % n:
        raise FormatError(f"{data_path}: {raw.size} samples is not a multiple of {n} channels")
    raw = raw.reshape(-1, n).astype(np.float64)
    mv = (raw - np.asarray(hdr.baselines)) / np.asarray(hdr.gains)
    return Signal(mv, sample_rate_hz=hdr.sample_rate_hz, lead_names=hdr.lead_names)


def write_wfdb16(signal: Signal, record_path, gain: float = 1000.0, baseline: int = 0) -> None:
    """Write ``<record>.hea`` and ``<record>.dat``; values are rounded to the ADC grid."""
    record_path = Path(record_path)
    name = record_path.name
    raw = np.round(signal.samples * gain + baseline)
    if raw.min(initial=0) < -32768 or raw.max(initial=0) > 32767:
        raise FormatError("signal exceeds the 16-bit range at this gain")
    raw.astype("<i2").tofile(record_path.with_suffix(".dat"))
    names = signal.lead_names or tuple(f"ch{i}" for i in range(signal.n_channels))
    fs = signal.sample_rate_hz
    lines = [f"{name} {signal.n_channels} {fs:g} {signal.n_samples}"]
    for lead in names:
        lines.append(f"{name}.dat 16 {gain:g}({baseline})/mV 16 0 0 0 0 {lead}")
    record_path.with_suffix(".hea").write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# spike events
# ---------------------------------------------------------------------------


def write_spike_events(train: SpikeTrain, path) -> None:
    T_out, Q = train.events.shape
    ts, chans, pols = train.event_list()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            f"{SPIKE_MAGIC} shape={T_out}x{Q} channel_ratio={train.channel_ratio} "
            f"origin_offset={train.origin_offset} encoder_id={train.encoder_id} "
            f"source_length={train.source_length}\n"
        )
        fh.writelines(f"{t},{c},{p}\n" for t, c, p in zip(ts.tolist(), chans.tolist(), pols.tolist()))


def _parse_header(line: str, magic: str, path) -> dict:
    if not line.startswith(magic):
        raise FormatError(f"{path}: missing {magic!r} header")
    fields = {}
    for tok in line[len(magic):].split():
        key, sep, value = tok.partition("=")
        if not sep:
            raise FormatError(f"{path}: bad header token {tok!r}")
        fields[key] = value
    return fields


def read_spike_events(path) -> SpikeTrain:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        body = fh.read().splitlines()
    h = _parse_header(header, SPIKE_MAGIC, path)
    try:
        T_out, Q = (int(v) for v in h["shape"].split("x"))
        ratio = int(h["channel_ratio"])
        origin = int(h["origin_offset"])
        enc = h["encoder_id"]
        source_length = int(h.get("source_length", T_out + origin))
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: incomplete header ({exc})") from None
    events = np.zeros((T_out, Q), dtype=np.int8)
    for n, line in enumerate(body, start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise FormatError(f"{path}:{n}: expected t,channel,polarity")
        try:
            t, c, p = (int(v) for v in parts)
        except ValueError:
            raise FormatError(f"{path}:{n}: non-integer field in {line!r}") from None
        if p not in (-1, 1):
            raise FormatError(f"{path}:{n}: polarity must be -1 or +1")
        row = t - origin
        if not (0 <= row < T_out and 0 <= c < Q):
            raise FormatError(f"{path}:{n}: event ({t},{c}) outside declared bounds")
        if events[row, c]:
            raise FormatError(f"{path}:{n}: duplicate event at ({t},{c})")
        events[row, c] = p
    return SpikeTrain(events, ratio, origin, enc, source_length)


# ---------------------------------------------------------------------------
# stats
# ---------------------------------------------------------------------------

_STATS_KEYS = {
    "spike": ("encoder_id", "output_channel_ratio", "total_channel_output",
              "mean_channel_output", "segment_count"),
    "diff": ("changed_fraction", "jaccard_nonzero", "changed_nonzero_fraction"),
}


def format_stats(stats: Union[SpikeStats, TrainDiff]) -> str:
    kind = "spike" if isinstance(stats, SpikeStats) else "diff"
    lines = [f"{STATS_MAGIC} kind={kind}"]
    for key in _STATS_KEYS[kind]:
        v = getattr(stats, key)
        if isinstance(v, float):
            lines.append(f"{key}={v:.6f}")
        else:
            lines.append(f"{key}={v}")
    return "\n".join(lines) + "\n"


def write_stats(stats: Union[SpikeStats, TrainDiff], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_stats(stats))


def read_stats(path) -> Union[SpikeStats, TrainDiff]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty stats file")
    kind = _parse_header(lines[0], STATS_MAGIC, path).get("kind")
    if kind not in _STATS_KEYS:
        raise FormatError(f"{path}: unknown stats kind {kind!r}")
    values = {}
    for ln in lines[1:]:
        key, sep, v = ln.partition("=")
        if not sep:
            raise FormatError(f"{path}: bad line {ln!r}")
        values[key] = v
    missing = set(_STATS_KEYS[kind]) - set(values)
    if missing:
        raise FormatError(f"{path}: missing keys {sorted(missing)}")
    if kind == "diff":
        return TrainDiff(*(float(values[k]) for k in _STATS_KEYS["diff"]))
    ratio = int(values["output_channel_ratio"])
    total = float(values["total_channel_output"])
    mean = float(values["mean_channel_output"])
    # both numbers carry up to 5e-7 of rounding from the 6-decimal format
    if abs(mean * ratio - total) > 5e-7 * (ratio + 1):
        raise FormatError(f"{path}: mean_channel_output x ratio != total_channel_output")
    return SpikeStats(ratio, total, mean, int(values["segment_count"]), values["encoder_id"])


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
