import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpenc import ENCODER_IDS, Signal, encode, make_config
from dpenc.streaming import make_stream
from dpenc.synth import SynthConfig, gen_ecg


@pytest.mark.parametrize("enc", ENCODER_IDS)
def test_stream_matches_batch_on_ecg(enc):
    # long enough for the sine cache to grow past its initial size
    x = gen_ecg(SynthConfig(duration_s=6.0, leads=1, seed=9)).samples[:, 0]
    cfg = make_config(enc)
    batch = encode(Signal(x), cfg)
    rows = make_stream(cfg).run(x)
    assert np.array_equal(rows, batch.events)


@given(st.lists(st.integers(-40, 40).map(lambda m: m / 32.0), min_size=4, max_size=60),
       st.sampled_from(ENCODER_IDS))
@settings(max_examples=200)
def test_stream_matches_batch(xs, enc):
    cfg = make_config(enc)
    assert np.array_equal(make_stream(cfg).run(xs), encode(Signal(np.asarray(xs)), cfg).events)


def test_warmup_returns_none():
    s = make_stream("dp12")
    assert [s.push(v) is None for v in (0.0, 1.0, 0.0, 1.0)] == [True, True, True, False]


def test_rejects_non_config():
    with pytest.raises(TypeError):
        make_stream(3)
