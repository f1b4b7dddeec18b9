"""Corrupt, smooth, encode."""

from __future__ import annotations

from typing import Optional, Sequence, Union

from dpenc.artefacts import ArtefactSpec, apply_artefact
from dpenc.encoders import EncoderConfig, SpikeTrain, encode
from dpenc.signal import Signal, as_signal, moving_average_3


def prepare(
    raw: Signal,
    artefact: Union[ArtefactSpec, Sequence[ArtefactSpec], None] = None,
    preprocess: bool = True,
) -> Signal:
    """Apply artefacts in order, then the optional 3-point moving average."""
    x = as_signal(raw)
    if artefact is not None:
        specs = artefact if isinstance(artefact, (list, tuple)) else [artefact]
        for spec in specs:
            x = apply_artefact(x, spec)
    if preprocess:
        x = moving_average_3(x)
    return x


def encode_pipeline(
    raw: Signal,
    artefact: Optional[ArtefactSpec] = None,
    preprocess: bool = True,
    cfg: EncoderConfig = "dp1",
) -> SpikeTrain:
    return encode(prepare(raw, artefact, preprocess), cfg)
