import pytest

import dpenc.calibrate as cal

from dpenc import calibrate_scalar, encode_pipeline, spike_rate_stats
from dpenc.calibrate import CalibrationError, spike_probability
from dpenc.encoders import make_config
from dpenc.pipeline import prepare
from dpenc.synth import synth_segments


@pytest.fixture(scope="module")
def train_set():
    return [prepare(s) for s in synth_segments(40, seed=11)]


@pytest.fixture(scope="module")
def holdout():
    return [prepare(s) for s in synth_segments(40, seed=12)]


def test_delta_to_table_rate(train_set, holdout):
    res = calibrate_scalar("delta", (0.005, 1.0), train_set, 0.11)
    assert res.relative_error <= 0.05
    assert abs(spike_probability(holdout, res.config) / 0.11 - 1) <= 0.2


def test_zero_target_not_bracketed(train_set):
    with pytest.raises(CalibrationError, match="bracketed"):
        calibrate_scalar("delta", (0.01, 0.5), train_set, 0.0)


def test_reversed_response_detected(train_set, monkeypatch):
    # declare the wrong direction: the endpoint rates now contradict it
    monkeypatch.setitem(cal.RESPONSE_DIRECTION, ("delta", "threshold"), +1)
    with pytest.raises(CalibrationError, match="contradicts"):
        calibrate_scalar("delta", (0.01, 0.5), train_set, 0.11)


def test_unknown_parameter(train_set):
    with pytest.raises(CalibrationError):
        calibrate_scalar("rate", (0, 1), train_set, 0.1)
    with pytest.raises(CalibrationError):
        calibrate_scalar("delta", (1.0, 0.5), train_set, 0.1)
    with pytest.raises(CalibrationError):
        calibrate_scalar("delta", (0.01, 1.0), [], 0.1)


def test_iftem_target_band(train_set):
    res = calibrate_scalar("iftem", None, train_set, 0.075)
    assert 0.05 <= res.achieved_rate <= 0.1
    assert res.config.threshold == res.value


def test_achieved_rate_matches_reencoding(train_set):
    res = calibrate_scalar("ftem", None, train_set, 0.2)
    again = spike_rate_stats([encode_pipeline(s, None, False, res.config) for s in train_set])
    assert again.mean_channel_output == res.achieved_rate
