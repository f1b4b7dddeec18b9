"""Command-line interface.

Exit codes: 0 success, 1 validation or usage failure, 2 property-suite failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from dpenc import __version__
from dpenc.artefacts import ArtefactError, format_artefact, parse_artefact
from dpenc.calibrate import DEFAULT_BOUNDS, DEFAULT_PARAM, CalibrationError, calibrate_scalar
from dpenc.encoders import ENCODER_IDS, EncoderError, config_params, make_config
from dpenc.io import (
    FormatError,
    ensure_parent,
    format_stats,
    read_csv_signal,
    read_spike_events,
    read_wfdb16,
    write_csv_signal,
    write_spike_events,
    write_stats,
)
from dpenc.pipeline import encode_pipeline, prepare
from dpenc.signal import SignalError, extract_segment, random_segment
from dpenc.stats import StatsError, spike_rate_stats
from dpenc.synth import SynthConfig, SynthError, gen_ecg, load_synth_config, synth_segments

EXIT_OK, EXIT_INVALID, EXIT_PROPERTY = 0, 1, 2

CALIBRATION_TARGETS = {"delta": 0.11, "ctem": 0.2, "ftem": 0.2, "iftem": 0.075}

_ERRORS = (ArtefactError, CalibrationError, EncoderError, FormatError, SignalError,
           StatsError, SynthError, OSError, ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, float(value)
    except ValueError:
        return key, value


def _add_input(p, synth_default=None):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", help="CSV waveform (mV) or WFDB .hea header")
    src.add_argument("--synth", default=synth_default,
                     help="'default' or a JSON synthetic-ECG config file")
    p.add_argument("--sample-rate", type=float, default=100.0, help="CSV sample rate in Hz")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segment-len", type=int, default=256,
                   help="random window length; 0 keeps the whole record")
    p.add_argument("--no-preprocess", action="store_true", help="skip the 3-point moving average")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dpenc", description="Derived Peak and comparator spike encoders for ECG.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="JSON file whose keys mirror the command-line flags")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="write a synthetic ECG record as CSV")
    p.add_argument("--synth", default="default")
    p.add_argument("--duration", type=float, default=None, help="seconds (overrides the config)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("corrupt", help="apply artefacts to a record")
    _add_input(p)
    p.add_argument("--artefact", action="append", default=[], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("encode", help="corrupt, smooth and encode one segment")
    _add_input(p)
    _add_common(p)
    p.add_argument("--encoder", required=True, choices=ENCODER_IDS)
    p.add_argument("--param", action="append", type=_param, default=[],
                   help="encoder parameter override, e.g. threshold=0.1")
    p.add_argument("--artefact", action="append", default=[])
    p.add_argument("--out", help="spike event file")
    p.add_argument("--stats-out", help="stats record file")

    p = sub.add_parser("stats", help="spike output statistics of event files")
    p.add_argument("files", nargs="+")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the invariance suite")
    p.add_argument("--segments", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segment-len", type=int, default=256)
    p.add_argument("--inject-fault", action="store_true",
                   help="perturb one spike to check that the suite can fail")

    p = sub.add_parser("calibrate", help="tune one encoder parameter to a target spike probability")
    _add_input(p, synth_default="default")
    _add_common(p)
    p.add_argument("--encoder", required=True, choices=sorted(DEFAULT_PARAM))
    p.add_argument("--param-name", help="parameter to tune (default depends on encoder)")
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--target", type=float, help="spikes per channel per timestep")
    p.add_argument("--segments", type=int, default=100)
    p.add_argument("--out", help="write the calibrated config as JSON")

    p = sub.add_parser("bench", help="encoding throughput on synthetic 12-lead segments")
    p.add_argument("--segments", type=int, default=1000)
    p.add_argument("--encoders", default=",".join(ENCODER_IDS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("numba", "numpy"))
    p.add_argument("--compare-backends", action="store_true")
    p.add_argument("--json", help="also write the table as JSON")
    return parser


# ---------------------------------------------------------------------------


def _synth_config(spec: str, seed: int) -> SynthConfig:
    if spec == "default":
        return SynthConfig(seed=seed)
    return load_synth_config(spec)


def load_input(args):
    if getattr(args, "input", None):
        path = Path(args.input)
        if path.suffix == ".hea":
            return read_wfdb16(path)
        return read_csv_signal(path, args.sample_rate)
    if getattr(args, "synth", None):
        return gen_ecg(_synth_config(args.synth, args.seed))
    raise UsageError("one input source is required: --input or --synth")


def _artefacts(args):
    return [parse_artefact(a, seed=args.seed) for a in args.artefact]


def _window(signal, args):
    if args.segment_len and signal.n_samples > args.segment_len:
        spec = random_segment(signal, args.segment_len, seed=args.seed)
        return extract_segment(signal, spec), spec.start_index
    return signal, 0


def _print_stats(stats):
    sys.stdout.write(format_stats(stats))


def cmd_gen(args) -> int:
    cfg = _synth_config(args.synth, args.seed)
    if args.duration is not None:
        cfg = SynthConfig.from_dict({**cfg.to_dict(), "duration_s": args.duration})
    sig = gen_ecg(cfg)
    ensure_parent(args.out)
    write_csv_signal(sig, args.out)
    print(f"wrote {sig.n_samples} samples x {sig.n_channels} leads to {args.out}")
    return EXIT_OK


def cmd_corrupt(args) -> int:
    sig = load_input(args)
    out = prepare(sig, _artefacts(args), preprocess=False)
    ensure_parent(args.out)
    write_csv_signal(out, args.out)
    print(f"applied {', '.join(args.artefact)}; wrote {args.out}")
    return EXIT_OK


def cmd_encode(args) -> int:
    sig, start = _window(load_input(args), args)
    cfg = make_config(args.encoder, **dict(args.param))
    train = encode_pipeline(sig, _artefacts(args) or None, not args.no_preprocess, cfg)
    if args.out:
        ensure_parent(args.out)
        write_spike_events(train, args.out)
    stats = spike_rate_stats([train])
    if args.stats_out:
        ensure_parent(args.stats_out)
        write_stats(stats, args.stats_out)
    print(f"# window start={start} length={sig.n_samples} leads={sig.n_channels} "
          f"artefacts={','.join(format_artefact(a) for a in _artefacts(args)) or 'none'}")
    _print_stats(stats)
    return EXIT_OK


def cmd_stats(args) -> int:
    trains = [read_spike_events(f) for f in args.files]
    stats = spike_rate_stats(trains)
    if args.out:
        ensure_parent(args.out)
        write_stats(stats, args.out)
    _print_stats(stats)
    return EXIT_OK


def cmd_verify(args) -> int:
    from dpenc.verify import run_suite

    results = run_suite(args.segments, args.seed, args.inject_fault, args.segment_len)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} properties passed")
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_calibrate(args) -> int:
    enc = args.encoder
    param = args.param_name or DEFAULT_PARAM[enc]
    target = args.target if args.target is not None else CALIBRATION_TARGETS[enc]
    if (enc, param) not in DEFAULT_BOUNDS:
        raise CalibrationError(f"no calibratable parameter {param!r} for encoder {enc!r}")
    lo, hi = DEFAULT_BOUNDS[(enc, param)]
    lo = args.lo if args.lo is not None else lo
    hi = args.hi if args.hi is not None else hi
    if args.input:
        sig = load_input(args)
        length = args.segment_len or sig.n_samples
        rng = np.random.default_rng(args.seed)
        segs = [extract_segment(sig, random_segment(sig, length, int(rng.integers(2**31))))
                for _ in range(args.segments)]
    else:
        cfg = _synth_config(args.synth, args.seed)
        segs = synth_segments(args.segments, args.segment_len or 256, args.seed, cfg)
    signals = [prepare(s, None, not args.no_preprocess) for s in segs]
    res = calibrate_scalar(enc, (lo, hi), signals, target, param=param)
    print(f"encoder={enc} param={param} value={res.value:.6f} achieved_rate={res.achieved_rate:.6f} "
          f"target={target:.6f} relative_error={res.relative_error:.4f} iterations={res.iterations}")
    if args.out:
        ensure_parent(args.out)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"encoder": enc, "params": {k: v for k, v in config_params(res.config).items()
                                                  if k != "encoder"},
                       "achieved_rate": res.achieved_rate, "target_rate": target},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    from dpenc.bench import bench_segments, format_table, rows_as_dicts, run_bench

    encoders = [e.strip() for e in args.encoders.split(",") if e.strip()]
    bad = [e for e in encoders if e not in ENCODER_IDS]
    if bad:
        raise UsageError(f"unknown encoder(s): {', '.join(bad)}")
    segs = bench_segments(args.segments, args.seed)
    backends = ["numba", "numpy"] if args.compare_backends else [args.backend]
    rows = []
    for b in backends:
        rows.extend(run_bench(encoders=encoders, backend=b, segments=segs))
    print(format_table(rows))
    if args.json:
        ensure_parent(args.json)
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows_as_dicts(rows), fh, indent=2)
            fh.write("\n")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen, "corrupt": cmd_corrupt, "encode": cmd_encode, "stats": cmd_stats,
    "verify": cmd_verify, "calibrate": cmd_calibrate, "bench": cmd_bench,
}


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    if "preprocess" in cfg:
        cfg["no_preprocess"] = not cfg.pop("preprocess")
    if "params" in cfg:
        cfg["param"] = list(cfg.pop("params").items())
    if isinstance(cfg.get("artefact"), str):
        cfg["artefact"] = [cfg["artefact"]]
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    cfg.pop("command", None)
    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            names = {a.dest for a in sp._actions}
            sp.set_defaults(**{k: v for k, v in cfg.items() if k in names})
            for a in sp._actions:
                if a.dest in cfg and a.required:
                    a.required = False


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dpenc: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except _ERRORS as exc:
        print(f"dpenc {argv[0] if argv else ''}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
