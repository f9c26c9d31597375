"""Command-line interface.

Subcommands:
  scan      evaluate the configured 2-D eavesdropper-position grid
  point     full pipeline breakdown at the configured single position
  sweep     one scan per value of the configured sweep parameter
  validate  parse and check a configuration, echo the resolved values

Exit codes: 0 success, 1 configuration error, 2 runtime/regime failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from .atmosphere import RegimeError, extinction
from .channel import compute_channel_gains
from .config import MODE_PROBABILISTIC, ConfigError, parse_config
from .outage import FadingModel, outage_scan_point
from .scan import emit, extract_insecure_region, run_scan, run_sweep
from .secrecy import detection_rates, secrecy_capacity
from .units import np_per_m_to_db_per_km

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_IO = 3


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit on usage errors."""

    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="thzsec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, default=None, help="config file (INI-style or .json)")
        p.add_argument("--out", type=Path, default=None, help="output path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--mode", choices=("det", "prob"), default=None,
                       help="override scan.mode from the config")
        p.add_argument("--seed", type=int, default=0, help="seed echoed into metadata")
        p.add_argument("--threads", type=int, default=1, help="worker processes for scans")

    for name, doc in (
        ("scan", "evaluate the 2-D position grid"),
        ("point", "single-position pipeline breakdown"),
        ("sweep", "one scan per configured sweep value"),
        ("validate", "check a configuration file"),
    ):
        common(sub.add_parser(name, help=doc))
    return parser


def _resolved(args):
    cfg = parse_config(args.config)
    if args.mode is not None:
        cfg = cfg.with_value("scan", "mode", args.mode)
    return cfg


def _cmd_validate(args) -> int:
    cfg = _resolved(args)
    print(f"config OK ({cfg.source})")
    print(json.dumps(cfg.to_dict(), sort_keys=True, indent=1))
    return EXIT_OK


def _cmd_scan(args) -> int:
    cfg = _resolved(args)
    result = run_scan(cfg, threads=args.threads, seed=args.seed)
    region = extract_insecure_region(result)
    print(f"grid: {len(result.xs)} x {len(result.ys)} cells, mode={result.mode}")
    if result.msc_bps is not None:
        print(f"msc_bps: {result.msc_bps:.6g}")
    if result.mop is not None:
        print(f"mop: {result.mop:.6g}")
    print(f"insecure cells: {region.cell_count} (area {region.area_m2:.6g} m^2)")
    print(f"regime-error cells: {result.regime_error_cells}")
    if args.out is not None:
        emit(result, args.format, args.out)
        print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _resolved(args)
    outputs = run_sweep(
        cfg, out_stem=args.out, fmt=args.format, threads=args.threads, seed=args.seed
    )
    for value, result, path in outputs:
        summary = (
            f"msc_bps={result.msc_bps:.6g}" if result.msc_bps is not None
            else f"mop={result.mop:.6g}" if result.mop is not None
            else "all cells invalid"
        )
        where = f" -> {path}" if path else ""
        print(f"{value!r}: {summary}{where}")
    return EXIT_OK


def _cmd_point(args) -> int:
    cfg = _resolved(args)
    scenario = cfg.scenario()
    conditions = cfg.conditions()
    spec = cfg.scan_spec()
    ext = extinction(scenario.freq_hz, conditions, scenario.d, cfg.backend(), cfg.wave())
    gains = compute_channel_gains(scenario, ext, cfg.scattering())
    rates = detection_rates(scenario, gains, cfg.duty_cycle())
    secrecy = secrecy_capacity(rates, cfg.paper_exact())

    report = {
        "eve_xy_m": list(scenario.eve_xy),
        "freq_hz": scenario.freq_hz,
        "turbulence_class": conditions.turbulence_class.value,
        "extinction": {
            "alpha_g_np_per_m": ext.alpha_g,
            "alpha_t_np_per_m": ext.alpha_t,
            "alpha_att_np_per_m": ext.alpha_att,
            "alpha_att_db_per_km": np_per_m_to_db_per_km(ext.alpha_att),
            "a_t_db": ext.a_t_db,
            "sigma_r2_plane": ext.sigma_r2_plane,
            "beta_r2_sph": ext.beta_r2_sph,
            "rytov_valid": max(ext.sigma_r2_plane, ext.beta_r2_sph) < 1.0,
        },
        "gains": {
            "g_los": gains.g_los,
            "g_nlos": gains.g_nlos,
            "steering_rad": gains.steering_rad,
            "scattering_segment_m": list(gains.seg) if gains.seg else None,
        },
        "rates_per_slot": {
            "lambda_l": rates.lambda_l,
            "lambda_n": rates.lambda_n,
            "lambda_b": rates.lambda_b,
            "lambda_e": rates.lambda_e,
            "snr_bob_db": rates.snr_bob_db,
            "snr_eve_db": rates.snr_eve_db,
        },
        "secrecy": {
            "i_bob_bits_per_slot": secrecy.i_bob,
            "i_eve_bits_per_slot": secrecy.i_eve,
            "c_s_bits_per_slot": secrecy.c_s_slot,
            "c_s_bps": secrecy.c_s_bps,
            "insecure": secrecy.insecure,
        },
    }
    if spec.mode == MODE_PROBABILISTIC:
        outage = outage_scan_point(
            scenario, ext, cfg.scattering(), spec.target_rate_bps,
            cfg.duty_cycle(), cfg.paper_exact(),
        )
        model = FadingModel(g_los_mean=gains.g_los, sigma_r2=ext.beta_r2_sph)
        report["outage"] = {
            "target_rate_bps": spec.target_rate_bps,
            "g_threshold": outage.g_threshold,
            "p_o": outage.p_o,
            "sigma_r2": model.sigma_r2,
            "median_gain": model.median_gain,
        }

    def sanitize(v):
        if isinstance(v, dict):
            return {k: sanitize(x) for k, x in v.items()}
        if isinstance(v, list):
            return [sanitize(x) for x in v]
        if isinstance(v, float) and not math.isfinite(v):
            return None
        return v

    text = json.dumps(sanitize(report), indent=1, sort_keys=True)
    print(text)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {
        "scan": _cmd_scan,
        "point": _cmd_point,
        "sweep": _cmd_sweep,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (RegimeError, ValueError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
