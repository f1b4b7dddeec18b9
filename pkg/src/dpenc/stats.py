"""Spike output statistics and train-to-train comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dpenc.encoders import SpikeTrain


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class SpikeStats:
    """Per-timestep spike output, per input lead, averaged over segments.

    ``total_channel_output`` sums over the ``output_channel_ratio`` output
    channels of a lead; ``mean_channel_output`` is the per-channel rate.
    """

    output_channel_ratio: int
    total_channel_output: float
    mean_channel_output: float
    segment_count: int
    encoder_id: str = ""

    def __post_init__(self):
        if self.total_channel_output < 0 or self.mean_channel_output < 0:
            raise StatsError("spike rates must be non-negative")


@dataclass(frozen=True)
class TrainDiff:
    """How much two trains of the same shape disagree.

    ``changed_fraction`` counts differing entries over all entries;
    ``changed_nonzero_fraction`` counts differing entries over the entries
    that are nonzero in either train.
    """

    changed_fraction: float
    jaccard_nonzero: float
    changed_nonzero_fraction: float


def train_rate(train: SpikeTrain) -> float:
    """Spikes per timestep per input lead, summed across the lead's output channels."""
    if train.n_steps == 0:
        return 0.0
    return train.spike_count / (train.n_steps * train.n_inputs)


def spike_rate_stats(trains: Sequence[SpikeTrain]) -> SpikeStats:
    trains = list(trains)
    if not trains:
        raise StatsError("no spike trains given")
    first = trains[0]
    for tr in trains[1:]:
        if tr.encoder_id != first.encoder_id or tr.channel_ratio != first.channel_ratio:
            raise StatsError(
                f"mixed encoders: {first.encoder_id}/{first.channel_ratio} "
                f"vs {tr.encoder_id}/{tr.channel_ratio}"
            )
    # fsum is exactly rounded, so the result is independent of segment order
    total = math.fsum(train_rate(tr) for tr in trains) / len(trains)
    return SpikeStats(
        output_channel_ratio=first.channel_ratio,
        total_channel_output=total,
        mean_channel_output=total / first.channel_ratio,
        segment_count=len(trains),
        encoder_id=first.encoder_id,
    )


def per_channel_rates(train: SpikeTrain) -> np.ndarray:
    """Spike rate of each of the ``channel_ratio`` sub-channels, averaged over leads."""
    ev = train.events.reshape(train.n_steps, train.n_inputs, train.channel_ratio)
    if train.n_steps == 0:
        return np.zeros(train.channel_ratio)
    return np.count_nonzero(ev, axis=(0, 1)) / (train.n_steps * train.n_inputs)


def compare_trains(a: SpikeTrain, b: SpikeTrain) -> TrainDiff:
    if a.events.shape != b.events.shape:
        raise StatsError(f"shape mismatch: {a.events.shape} vs {b.events.shape}")
    if a.encoder_id != b.encoder_id:
        raise StatsError(f"encoder mismatch: {a.encoder_id} vs {b.encoder_id}")
    ea, eb = a.events, b.events
    n = ea.size
    differ = int(np.count_nonzero(ea != eb))
    nz_a, nz_b = ea != 0, eb != 0
    union = int(np.count_nonzero(nz_a | nz_b))
    inter = int(np.count_nonzero(nz_a & nz_b))
    return TrainDiff(
        changed_fraction=differ / n if n else 0.0,
        jaccard_nonzero=inter / union if union else 1.0,
        changed_nonzero_fraction=differ / union if union else 0.0,
    )
