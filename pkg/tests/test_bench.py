import runpy
from pathlib import Path


from dpenc.bench import bench_segments, run_bench
from dpenc.stats import spike_rate_stats
from dpenc import encode

SCRIPT = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_backends.py"


def test_rows_match_stats():
    segs = bench_segments(40, seed=3)
    for row in run_bench(encoders=("dp1", "rate", "iftem"), segments=segs):
        trains = [encode(s, row.encoder_id) for s in segs]
        assert row.spikes == sum(t.spike_count for t in trains)
        assert row.total_channel_output == spike_rate_stats(trains).total_channel_output


def test_backend_script(capsys):
    mod = runpy.run_path(str(SCRIPT))
    assert mod["main"](["--segments", "20", "--encoders", "delta,ftem"]) == 0
    assert "match" in capsys.readouterr().out
