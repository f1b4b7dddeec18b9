"""Bisection of a single encoder parameter onto a target spike probability."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

from dpenc.encoders import EncoderConfig, encode, make_config
from dpenc.signal import Signal
from dpenc.stats import spike_rate_stats

# (encoder, parameter) -> +1 if the spike rate rises with the parameter, -1 if it falls
RESPONSE_DIRECTION = {
    ("delta", "threshold"): -1,
    ("iftem", "threshold"): -1,
    ("ctem", "wavelength"): -1,
    ("ctem", "amplitude"): +1,
    ("ftem", "wavelength"): -1,
}

DEFAULT_PARAM = {"delta": "threshold", "iftem": "threshold", "ctem": "wavelength", "ftem": "wavelength"}

DEFAULT_BOUNDS = {
    ("delta", "threshold"): (0.005, 1.0),
    ("iftem", "threshold"): (0.05, 50.0),
    ("ctem", "wavelength"): (2.5, 60.0),
    ("ctem", "amplitude"): (0.01, 4.0),
    ("ftem", "wavelength"): (2.5, 60.0),
}


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class CalibrationResult:
    encoder_id: str
    param: str
    value: float
    achieved_rate: float
    target_rate: float
    iterations: int
    config: EncoderConfig

    @property
    def relative_error(self) -> float:
        return abs(self.achieved_rate - self.target_rate) / self.target_rate


def spike_probability(signals: Sequence[Signal], cfg: EncoderConfig) -> float:
    """Mean spikes per output channel per timestep over ``signals``."""
    return spike_rate_stats([encode(s, cfg) for s in signals]).mean_channel_output


def calibrate_scalar(
    encoder_id: str,
    free_param_bounds=None,
    signals: Sequence[Signal] = (),
    target_rate: float = 0.2,
    param: Optional[str] = None,
    base: Optional[EncoderConfig] = None,
    rel_tol: float = 0.05,
    max_iter: int = 40,
) -> CalibrationResult:
    """Find ``param`` in ``free_param_bounds`` whose spike probability hits ``target_rate``.

    The response must be monotone in the direction listed in
    :data:`RESPONSE_DIRECTION`; an endpoint ordering that contradicts it
    raises :class:`CalibrationError`, as does a target outside the
    endpoint rates. Bisection stops once the rate is within ``rel_tol``
    (relative) of the target or after ``max_iter`` steps, returning the
    closest value seen.
    """
    param = param or DEFAULT_PARAM.get(encoder_id)
    key = (encoder_id, param)
    if key not in RESPONSE_DIRECTION:
        raise CalibrationError(f"no calibratable parameter {param!r} for encoder {encoder_id!r}")
    direction = RESPONSE_DIRECTION[key]
    lo, hi = free_param_bounds if free_param_bounds is not None else DEFAULT_BOUNDS[key]
    if not lo < hi:
        raise CalibrationError(f"empty parameter range [{lo}, {hi}]")
    if not signals:
        raise CalibrationError("no calibration signals")
    if not target_rate > 0:
        raise CalibrationError(f"target {target_rate} cannot be bracketed: target rate must be positive")
    base = base or make_config(encoder_id)

    def rate_at(v):
        cfg = dataclasses.replace(base, **{param: float(v)})
        return spike_probability(signals, cfg), cfg

    r_lo, cfg_lo = rate_at(lo)
    r_hi, cfg_hi = rate_at(hi)
    # orient so that "few" is the end with the lower expected rate
    r_many, r_few = (r_lo, r_hi) if direction < 0 else (r_hi, r_lo)
    if r_many < r_few:
        raise CalibrationError(
            f"{encoder_id}.{param}: rate {r_lo:.4g} at {lo} vs {r_hi:.4g} at {hi} "
            f"contradicts the expected monotone response"
        )
    if not r_few <= target_rate <= r_many:
        raise CalibrationError(
            f"target {target_rate} not bracketed by rates [{r_few:.4g}, {r_many:.4g}] "
            f"over {param} in [{lo}, {hi}]"
        )

    def close(r):
        return abs(r - target_rate) <= rel_tol * target_rate

    best = min(((abs(r_lo - target_rate), lo, r_lo, cfg_lo), (abs(r_hi - target_rate), hi, r_hi, cfg_hi)),
               key=lambda c: c[0])
    it = 0
    if not close(best[2]):
        for it in range(1, max_iter + 1):
            mid = 0.5 * (lo + hi)
            r_mid, cfg_mid = rate_at(mid)
            if abs(r_mid - target_rate) < best[0]:
                best = (abs(r_mid - target_rate), mid, r_mid, cfg_mid)
            if close(r_mid):
                break
            too_many = r_mid > target_rate
            # move toward fewer spikes when the rate is too high
            if too_many == (direction < 0):
                lo = mid
            else:
                hi = mid
    _, value, rate, cfg = best
    return CalibrationResult(encoder_id, param, value, rate, target_rate, it, cfg)
