"""Command-line front end.

Usage::

    haartma synthesize --m 32 --out coeffs.json
    haartma spectrum   --m 32 --out spectrum.csv
    haartma pattern    --m 8 --elements 16 --theta0 110 --out pattern.csv
    haartma metrics    --m 32 --f0 1e6 --out metrics.json
    haartma schedule   --m 32 --theta0 110 --out schedule.json
    haartma multibeam  --theta0 110 --theta-b 70 --out multibeam.json

A flat JSON config file may be given with ``--config``; every key has a
flag of the same name (underscores become dashes) and flags win.
Exit status: 0 success, 2 configuration error, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .array import (
    ArrayGeometry,
    compute_pattern,
    default_q_list,
    steering_delays,
    theta_grid,
)
from .errors import ConfigError, DomainError
from .hardware import multibeam_plan, multibeam_report, plan_bfn, switching_schedule
from .haar import HaarCoefficients, _is_pow2, hdwt_forward, sample_sine
from .metrics import efficiencies, harmonic_levels, peak_sideband_level
from .spectrum import default_q_window, pulse_coefficients

COMMANDS = ("synthesize", "spectrum", "pattern", "metrics", "schedule", "multibeam")

DEFAULT_OUT = {
    "synthesize": "coeffs.json",
    "spectrum": "spectrum.csv",
    "pattern": "pattern.csv",
    "metrics": "metrics.json",
    "schedule": "schedule.json",
    "multibeam": "multibeam.json",
}


@dataclass(frozen=True)
class RunConfig:
    m: int = 32
    waveform: str = "sine"
    grid: str = "midpoint"
    elements: int = 16
    spacing: float = 0.5
    carrier: float = 1e9
    theta0: float = 90.0
    f0: float = 1e6
    q_list: tuple | None = None
    q_max: int | None = None
    theta_step: float = 0.1
    out: str | None = None
    coeffs: str | None = None
    theta_b: float = 70.0
    f0_b: float | None = None
    amplitude_b: float = 1.0


KEYS = tuple(f.name for f in fields(RunConfig))


def _to_int(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"malformed integer for key '{key}': {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
    raise ConfigError(f"malformed integer for key '{key}': {value!r}")


def _to_float(key, value):
    if isinstance(value, bool):
        raise ConfigError(f"malformed number for key '{key}': {value!r}")
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"malformed number for key '{key}': {value!r}") from None
    if not math.isfinite(out):
        raise ConfigError(f"non-finite number for key '{key}': {value!r}")
    return out


def _to_str(key, value):
    if not isinstance(value, str):
        raise ConfigError(f"expected a string for key '{key}': {value!r}")
    return value


def _to_qlist(key, value):
    if isinstance(value, str):
        value = [v for v in value.replace(" ", "").split(",") if v]
    if not isinstance(value, (list, tuple)) or not value:
        raise ConfigError(f"key '{key}' must be a non-empty list of integers")
    return tuple(_to_int(key, v) for v in value)


_CONVERT = {
    "m": _to_int,
    "waveform": _to_str,
    "grid": _to_str,
    "elements": _to_int,
    "spacing": _to_float,
    "carrier": _to_float,
    "theta0": _to_float,
    "f0": _to_float,
    "q_list": _to_qlist,
    "q_max": _to_int,
    "theta_step": _to_float,
    "out": _to_str,
    "coeffs": _to_str,
    "theta_b": _to_float,
    "f0_b": _to_float,
    "amplitude_b": _to_float,
}


def _validate(cfg):
    if not _is_pow2(cfg.m) or cfg.m < 4:
        raise ConfigError("m must be a power of two ≥ 4")
    if cfg.waveform != "sine":
        raise ConfigError(f"waveform must be 'sine', got {cfg.waveform!r}")
    if cfg.grid not in ("midpoint", "left"):
        raise ConfigError(f"grid must be 'midpoint' or 'left', got {cfg.grid!r}")
    if cfg.elements < 1:
        raise ConfigError("elements must be ≥ 1")
    for key in ("spacing", "carrier", "f0", "theta_step"):
        if not getattr(cfg, key) > 0:
            raise ConfigError(f"{key} must be positive")
    for key in ("theta0", "theta_b"):
        if not 0 <= getattr(cfg, key) <= 180:
            raise ConfigError(f"{key} must lie in [0, 180] degrees")
    if cfg.q_max is not None and cfg.q_max < 1:
        raise ConfigError("q_max must be ≥ 1")
    if cfg.f0_b is not None and not cfg.f0_b > 0:
        raise ConfigError("f0_b must be positive")
    if not cfg.amplitude_b > 0:
        raise ConfigError("amplitude_b must be positive")


def load_config(path=None, overrides=None):
    """Merge defaults, an optional JSON file and flag overrides into a RunConfig."""
    values = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a flat JSON object")
        values.update(raw)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = sorted(set(values) - set(KEYS))
    if unknown:
        raise ConfigError(f"unknown config key '{unknown[0]}'")
    parsed = {k: _CONVERT[k](k, v) for k, v in values.items() if v is not None}
    cfg = RunConfig(**parsed)
    _validate(cfg)
    return cfg


# ---- number formatting -------------------------------------------------------

def _num(x):
    """15-significant-digit float, or the string "-inf"/"inf"."""
    x = float(x)
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return float(f"{x + 0.0:.15g}")


def _cell(x):
    x = float(x)
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x + 0.0:.15g}"


def _dumps(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---- coefficients file ---------------------------------------------------------

def coeffs_to_json(coeffs):
    # Coefficients use the shortest round-trip repr so re-ingestion is lossless.
    detail = {f"{idx.degree}.{idx.order}": value for idx, value in coeffs.detail.items()}
    return {
        "m": coeffs.size,
        "grid": coeffs.grid,
        "resolution": coeffs.resolution,
        "mean": coeffs.mean,
        "detail": detail,
    }


def coeffs_from_json(data):
    try:
        resolution = int(data["resolution"])
        detail = {}
        for key, value in data["detail"].items():
            degree, order = (int(part) for part in key.split("."))
            detail[(degree, order)] = float(value)
        coeffs = HaarCoefficients.from_parts(
            float(data["mean"]), detail, resolution, data.get("grid", "midpoint"))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ConfigError(f"malformed coefficients file: {exc}") from None
    if "m" in data and int(data["m"]) != coeffs.size:
        raise ConfigError("coefficients file: 'm' disagrees with 'resolution'")
    return coeffs


def _coefficients(cfg):
    if cfg.coeffs:
        try:
            data = json.loads(Path(cfg.coeffs).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"coefficients file not found: {cfg.coeffs}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"coefficients file is not valid JSON: {exc}") from None
        return coeffs_from_json(data)
    return hdwt_forward(sample_sine(cfg.m, cfg.grid))


def _q_values(cfg, coeffs):
    if cfg.q_list is not None:
        return list(cfg.q_list)
    w = cfg.q_max if cfg.q_max is not None else default_q_window(coeffs.size)
    return list(range(-w, w + 1))


# ---- commands ------------------------------------------------------------------

def _synthesize(cfg):
    return _dumps(coeffs_to_json(_coefficients(cfg)))


def _spectrum(cfg):
    coeffs = _coefficients(cfg)
    qs = _q_values(cfg, coeffs)
    values = pulse_coefficients(coeffs, np.array(qs, dtype=np.int64))
    levels = harmonic_levels(coeffs, qs).rows
    rows = [
        (q, _cell(v.real), _cell(v.imag), _cell(abs(v)), _cell(levels[q]))
        for q, v in zip(qs, values)
    ]
    return _csv(("q", "re", "im", "magnitude", "power_db_rel_q1"), rows)


def _scene(cfg):
    geometry = ArrayGeometry(cfg.elements, cfg.spacing, cfg.carrier)
    steering = steering_delays(cfg.theta0, cfg.elements, cfg.f0)
    return geometry, steering


def _pattern(cfg):
    coeffs = _coefficients(cfg)
    geometry, steering = _scene(cfg)
    qs = list(cfg.q_list) if cfg.q_list is not None else default_q_list(coeffs)
    pattern = compute_pattern(coeffs, steering, geometry, qs, theta_grid(cfg.theta_step))
    db = pattern.power_db
    rows = []
    for i, q in enumerate(pattern.harmonics):
        for j, theta in enumerate(pattern.angles):
            v = pattern.values[i, j]
            rows.append((_cell(theta), q, _cell(v.real), _cell(v.imag), _cell(db[i, j])))
    return _csv(("theta_deg", "q", "re", "im", "power_db_norm"), rows)


def _metrics(cfg):
    coeffs = _coefficients(cfg)
    qs = _q_values(cfg, coeffs)
    eff = efficiencies(coeffs, cfg.f0)
    levels = harmonic_levels(coeffs, qs).rows
    report = {
        "m": coeffs.size,
        "f0_hz": _num(cfg.f0),
        "peak_sr_db": _num(peak_sideband_level(coeffs, qs)),
        "eta_tma": _num(eff.eta_tma),
        "eta_mod": _num(eff.eta_mod),
        "eta_total": _num(eff.eta_total),
        "b_max_hz": _num(eff.b_max),
        "harmonic_levels_db": {str(q): _num(levels[q]) for q in qs},
    }
    return _dumps(report)


def _polarity(sign):
    return "+" if sign > 0 else "-"


def _schedule(cfg):
    coeffs = _coefficients(cfg)
    _, steering = _scene(cfg)
    plan = plan_bfn(coeffs, cfg.f0)
    elements = []
    for sched in switching_schedule(plan, steering):
        networks = [
            {
                "degree": net.degree,
                "square_wave_hz": _num(net.square_wave_hz),
                "half_slots": [
                    {
                        "t_start_s": _num(s.t_start),
                        "t_end_s": _num(s.t_end),
                        "attenuation_db": _num(s.attenuation_db),
                        "polarity": _polarity(s.polarity),
                    }
                    for s in net.half_slots
                ],
            }
            for net in sched.networks
        ]
        elements.append({"n": sched.element, "start_offset_s": _num(sched.start_offset),
                         "networks": networks})
    return _dumps({"f0_hz": _num(cfg.f0), "reference_amplitude": _num(plan.reference_amplitude),
                   "elements": elements})


def _multibeam(cfg):
    plan = multibeam_plan(cfg.theta0, cfg.f0, cfg.theta_b, cfg.f0_b, cfg.elements,
                          cfg.amplitude_b)
    geometry = ArrayGeometry(cfg.elements, cfg.spacing, cfg.carrier)
    reports = multibeam_report(plan, geometry, theta_grid(cfg.theta_step))
    beams = []
    for beam, rep in zip(plan.beams, reports):
        beams.append({
            "theta_deg": _num(beam.theta),
            "f0_hz": _num(beam.fundamental),
            "amplitude": _num(beam.amplitude),
            "networks": [
                {"physical_degree": phys, "realized_degree": deg,
                 "square_wave_hz": _num(beam.plan.entry(deg).square_wave_hz),
                 "attenuation_db": [_num(x) for x in beam.plan.entry(deg).slot_attenuation_db]}
                for phys, deg in sorted(beam.networks.items())
            ],
            "main_lobe_deg": _num(rep.main_lobe_deg),
            "peak_sr_db": _num(rep.peak_sr_db),
            "pattern_sr_db": _num(rep.pattern_sr_db),
        })
    return _dumps({"elements": cfg.elements, "beams": beams})


_RUNNERS = {
    "synthesize": _synthesize,
    "spectrum": _spectrum,
    "pattern": _pattern,
    "metrics": _metrics,
    "schedule": _schedule,
    "multibeam": _multibeam,
}


def _check_threads_env():
    env = os.environ.get("TMA_THREADS")
    if env is None or env == "":
        return
    try:
        ok = int(env) >= 1
    except ValueError:
        ok = False
    if not ok:
        raise ConfigError(f"TMA_THREADS must be a positive integer, got {env!r}")


def run(command, config):
    """Execute ``command`` and write its output file; returns the path written."""
    _check_threads_env()
    if command not in _RUNNERS:
        raise ConfigError(f"unknown command {command!r}")
    if command == "metrics" and config.coeffs is None and config.m < 8:
        raise ConfigError("metrics needs m ≥ 8")
    out = config.out or DEFAULT_OUT[command]
    text = _RUNNERS[command](config)
    _atomic_write(out, text)
    return Path(out)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="haartma", description="Haar-wavelet time-modulated array toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat JSON config file")
        for key in KEYS:
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: getattr(args, k) for k in KEYS}
    try:
        cfg = load_config(args.config, overrides)
        path = run(args.command, cfg)
    except ConfigError as exc:
        print(f"haartma: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"haartma: domain error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
