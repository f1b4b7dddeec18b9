"""Derived Peak spike encoding for ECG, with comparator encoders and artefact models."""

from dpenc._backend import get_backend, set_backend
from dpenc.artefacts import (
    Drift,
    Noise,
    Rescale,
    Shift,
    apply_artefact,
    apply_drift,
    apply_noise,
    apply_rescale,
    apply_shift,
    parse_artefact,
)
from dpenc.calibrate import CalibrationError, calibrate_scalar
from dpenc.encoders import (
    ENCODER_IDS,
    CtemConfig,
    DeltaConfig,
    DiscretisedConfig,
    DpConfig,
    FtemConfig,
    IftemConfig,
    SpikeTrain,
    discretise,
    encode,
    encode_bitstring,
    encode_ctem,
    encode_delta,
    encode_dp,
    encode_fr,
    encode_ftem,
    encode_iftem,
    encode_lc,
    encode_rate,
    make_config,
)
from dpenc.pipeline import encode_pipeline
from dpenc.signal import SegmentSpec, Signal, diff, extract_segment, moving_average_3, random_segment
from dpenc.stats import SpikeStats, TrainDiff, compare_trains, spike_rate_stats
from dpenc.synth import SynthConfig, gen_ecg

__version__ = "0.1.0"
