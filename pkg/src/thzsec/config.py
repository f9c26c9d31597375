"""Configuration parsing and resolution.

The native format is a flat INI-style file: ``[section]`` headers, ``key =
value`` lines, ``#`` comment lines.  A ``.json`` file with the same
section/key nesting is accepted as an alternate.  Unknown sections or keys
are hard errors (no silent typos), every constraint violation names the key
path and, for the INI format, the line number.  Absent keys fall back to the
standard-scenario defaults baked into the schema below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from .atmosphere import (
    AbsorptionBackend,
    AtmosphereConditions,
    ConstantAbsorption,
    TableAbsorption,
    Wave,
    default_absorption_table,
)
from .channel import LinkScenario, ReceiverParams, ScatteringParams

__all__ = ["ConfigError", "ScanSpec", "SweepSpec", "ResolvedConfig", "parse_config"]

MODE_DETERMINISTIC = "det"
MODE_PROBABILISTIC = "prob"

SWEEP_PARAMETERS = (
    "freq_hz",
    "cn2",
    "divergence_rad",
    "eve_background",
    "eve_fov_deg",
)


class ConfigError(ValueError):
    """Config file missing, malformed, or violating a constraint."""


@dataclass(frozen=True)
class ScanSpec:
    """Grid over eavesdropper positions plus evaluation mode."""

    x_min_m: float = 0.0
    x_max_m: float = 1000.0
    y_min_m: float = 2.0
    y_max_m: float = 100.0
    step_m: float = 2.0
    mode: str = MODE_DETERMINISTIC
    target_rate_bps: float = 10e9
    max_cells: float = 4e6

    def axis(self, lo: float, hi: float) -> List[float]:
        n = int(math.floor((hi - lo) / self.step_m + 1e-9)) + 1
        return [lo + self.step_m * i for i in range(n)]

    @property
    def xs(self) -> List[float]:
        return self.axis(self.x_min_m, self.x_max_m)

    @property
    def ys(self) -> List[float]:
        return self.axis(self.y_min_m, self.y_max_m)


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: Tuple[float, ...]


# Schema: section -> key -> (default, parser, validator).  A validator
# returns an error message or None.
def _positive(name):
    return lambda v: None if v > 0 else f"{name} must be > 0, got {v}"


def _nonnegative(name):
    return lambda v: None if v >= 0 else f"{name} must be >= 0, got {v}"


def _in_range(name, lo, hi, lo_open=False, hi_open=False):
    def check(v):
        ok_lo = v > lo if lo_open else v >= lo
        ok_hi = v < hi if hi_open else v <= hi
        if ok_lo and ok_hi:
            return None
        b1 = "(" if lo_open else "["
        b2 = ")" if hi_open else "]"
        return f"{name} must be in {b1}{lo}, {hi}{b2}, got {v}"

    return check


def _choice(name, options):
    return lambda v: None if v in options else f"{name} must be one of {sorted(options)}, got {v!r}"


def _parse_float(raw):
    return float(raw)


def _parse_bool(raw):
    if isinstance(raw, bool):
        return raw
    s = str(raw).strip().lower()
    if s in ("true", "yes", "on", "1"):
        return True
    if s in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def _parse_str(raw):
    return str(raw).strip().strip("\"'")


def _parse_float_list(raw):
    if isinstance(raw, (list, tuple)):
        return tuple(float(v) for v in raw)
    parts = [p.strip() for p in str(raw).split(",") if p.strip()]
    return tuple(float(p) for p in parts)


_RECEIVER_KEYS = {
    "aperture_m": (0.05, _parse_float, _positive("aperture_m")),
    "fov_deg": (10.0, _parse_float, _in_range("fov_deg", 0.0, 180.0, lo_open=True)),
    "efficiency": (0.1, _parse_float, _in_range("efficiency", 0.0, 1.0, lo_open=True)),
    "integration_time_s": (None, _parse_float, _positive("integration_time_s")),
    "background_count": (0.01, _parse_float, _nonnegative("background_count")),
}

_SCHEMA = {
    "atmosphere": {
        "temperature_c": (30.0, _parse_float, lambda v: None),
        "pressure_hpa": (1013.0, _parse_float, _positive("pressure_hpa")),
        "relative_humidity_pct": (
            80.0,
            _parse_float,
            _in_range("relative_humidity_pct", 0.0, 100.0),
        ),
        "cn2": (5.8e-11, _parse_float, _nonnegative("cn2")),
        "wave": ("spherical", _parse_str, _choice("wave", {"plane", "spherical"})),
        "absorption": ("table", _parse_str, _choice("absorption", {"table", "constant"})),
        "absorption_db_per_km": (None, _parse_float, _nonnegative("absorption_db_per_km")),
        "absorption_table_path": (None, _parse_str, lambda v: None),
    },
    "link": {
        "freq_hz": (340e9, _parse_float, _positive("freq_hz")),
        "distance_m": (1000.0, _parse_float, _positive("distance_m")),
        "eve_x_m": (750.0, _parse_float, lambda v: None),
        "eve_y_m": (30.0, _parse_float, lambda v: None if v != 0 else "eve_y_m must be nonzero"),
        "divergence_rad": (0.02, _parse_float, _positive("divergence_rad")),
        "tx_power_w": (0.01, _parse_float, _positive("tx_power_w")),
    },
    "bob": dict(_RECEIVER_KEYS),
    "eve": dict(_RECEIVER_KEYS),
    "scattering": {
        "g": (0.9, _parse_float, _in_range("g", -1.0, 1.0, lo_open=True, hi_open=True)),
        "f": (0.5, _parse_float, _nonnegative("f")),
    },
    "secrecy": {
        "duty_cycle": (0.5, _parse_float, _in_range("duty_cycle", 0.0, 1.0, lo_open=True, hi_open=True)),
        "paper_exact": (False, _parse_bool, lambda v: None),
    },
    "scan": {
        "x_min_m": (0.0, _parse_float, lambda v: None),
        "x_max_m": (1000.0, _parse_float, lambda v: None),
        "y_min_m": (2.0, _parse_float, lambda v: None),
        "y_max_m": (100.0, _parse_float, lambda v: None),
        "step_m": (2.0, _parse_float, _positive("step_m")),
        "mode": (MODE_DETERMINISTIC, _parse_str, _choice("mode", {MODE_DETERMINISTIC, MODE_PROBABILISTIC})),
        "target_rate_bps": (10e9, _parse_float, _nonnegative("target_rate_bps")),
        "max_cells": (4e6, _parse_float, _positive("max_cells")),
    },
    "sweep": {
        "parameter": (None, _parse_str, _choice("parameter", set(SWEEP_PARAMETERS))),
        "values": (None, _parse_float_list, lambda v: None if len(v) > 0 else "values must be non-empty"),
    },
}


def _read_ini(path: Path) -> Dict[str, Dict[str, Tuple[Any, Optional[int]]]]:
    """Parse the INI-style format into {section: {key: (raw, lineno)}}."""
    sections: Dict[str, Dict[str, Tuple[Any, Optional[int]]]] = {}
    current = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        if current is None:
            raise ConfigError(f"{path}:{lineno}: key outside of any [section]")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key in sections[current]:
            raise ConfigError(f"{path}:{lineno}: duplicate key {current}.{key}")
        sections[current][key] = (raw.strip(), lineno)
    return sections


def _read_json(path: Path) -> Dict[str, Dict[str, Tuple[Any, Optional[int]]]]:
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object of sections")
    sections: Dict[str, Dict[str, Tuple[Any, Optional[int]]]] = {}
    for sec, body in data.items():
        if not isinstance(body, dict):
            raise ConfigError(f"{path}: section {sec!r} must be an object")
        sections[sec] = {k: (v, None) for k, v in body.items()}
    return sections


def _loc(path, lineno) -> str:
    return f"{path}:{lineno}" if lineno is not None else str(path)


@dataclass(frozen=True)
class ResolvedConfig:
    """Fully resolved, validated configuration."""

    values: Dict[str, Dict[str, Any]]
    source: Optional[str] = None

    def __getitem__(self, section: str) -> Dict[str, Any]:
        return self.values[section]

    # ---- builders -----------------------------------------------------

    def conditions(self) -> AtmosphereConditions:
        a = self.values["atmosphere"]
        return AtmosphereConditions(
            temperature_c=a["temperature_c"],
            pressure_hpa=a["pressure_hpa"],
            relative_humidity_pct=a["relative_humidity_pct"],
            cn2=a["cn2"],
        )

    def wave(self) -> Wave:
        return Wave(self.values["atmosphere"]["wave"])

    def backend(self) -> AbsorptionBackend:
        a = self.values["atmosphere"]
        if a["absorption"] == "constant":
            return ConstantAbsorption(a["absorption_db_per_km"])
        if a["absorption_table_path"] is not None:
            return TableAbsorption.from_csv(a["absorption_table_path"])
        return default_absorption_table()

    def _receiver(self, section: str) -> ReceiverParams:
        r = self.values[section]
        return ReceiverParams(
            aperture_d=r["aperture_m"],
            fov_full_rad=math.radians(r["fov_deg"]),
            efficiency=r["efficiency"],
            integration_time_s=r["integration_time_s"],
            background_count=r["background_count"],
        )

    def scenario(self) -> LinkScenario:
        link = self.values["link"]
        return LinkScenario(
            freq_hz=link["freq_hz"],
            d=link["distance_m"],
            eve_xy=(link["eve_x_m"], link["eve_y_m"]),
            alpha_a=link["divergence_rad"],
            tx_power_w=link["tx_power_w"],
            bob=self._receiver("bob"),
            eve=self._receiver("eve"),
        )

    def scattering(self) -> ScatteringParams:
        s = self.values["scattering"]
        return ScatteringParams(g=s["g"], f=s["f"])

    def scan_spec(self) -> ScanSpec:
        s = self.values["scan"]
        return ScanSpec(
            x_min_m=s["x_min_m"],
            x_max_m=s["x_max_m"],
            y_min_m=s["y_min_m"],
            y_max_m=s["y_max_m"],
            step_m=s["step_m"],
            mode=s["mode"],
            target_rate_bps=s["target_rate_bps"],
            max_cells=s["max_cells"],
        )

    def sweep_spec(self) -> Optional[SweepSpec]:
        s = self.values.get("sweep")
        if not s or s.get("parameter") is None:
            return None
        return SweepSpec(parameter=s["parameter"], values=tuple(s["values"]))

    def duty_cycle(self) -> float:
        return self.values["secrecy"]["duty_cycle"]

    def paper_exact(self) -> bool:
        return self.values["secrecy"]["paper_exact"]

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        """Deep copy of the resolved values, suitable for a metadata echo."""
        return {sec: dict(body) for sec, body in self.values.items()}

    def with_value(self, section: str, key: str, value: Any) -> "ResolvedConfig":
        """Copy with one resolved value replaced (no re-validation of others)."""
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        values = self.to_dict()
        values[section][key] = value
        return ResolvedConfig(values=values, source=self.source)

    def with_sweep_value(self, parameter: str, value: float) -> "ResolvedConfig":
        section_key = {
            "freq_hz": ("link", "freq_hz"),
            "cn2": ("atmosphere", "cn2"),
            "divergence_rad": ("link", "divergence_rad"),
            "eve_background": ("eve", "background_count"),
            "eve_fov_deg": ("eve", "fov_deg"),
        }
        if parameter not in section_key:
            raise ConfigError(f"unknown sweep parameter {parameter!r}")
        return self.with_value(*section_key[parameter], value)


def parse_config(path: Union[str, Path, None]) -> ResolvedConfig:
    """Load, validate and resolve a config file (or pure defaults for None)."""
    if path is None:
        sections: Dict[str, Dict[str, Tuple[Any, Optional[int]]]] = {}
        src = "<defaults>"
    else:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        src = str(p)
        try:
            sections = _read_json(p) if p.suffix.lower() == ".json" else _read_ini(p)
        except OSError as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from None

    resolved: Dict[str, Dict[str, Any]] = {}
    for sec, keys in _SCHEMA.items():
        resolved[sec] = {k: spec[0] for k, spec in keys.items()}

    for sec, body in sections.items():
        if sec not in _SCHEMA:
            raise ConfigError(f"{src}: unknown section [{sec}]")
        for key, (raw, lineno) in body.items():
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"{_loc(src, lineno)}: unknown key {sec}.{key}")
            _, parser, validator = _SCHEMA[sec][key]
            try:
                value = parser(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{_loc(src, lineno)}: {sec}.{key}: {exc}") from None
            message = validator(value)
            if message is not None:
                raise ConfigError(f"{_loc(src, lineno)}: {sec}.{key}: {message}")
            resolved[sec][key] = value

    # cross-key resolution and constraints
    if resolved["atmosphere"]["absorption"] == "constant":
        if resolved["atmosphere"]["absorption_db_per_km"] is None:
            raise ConfigError(
                f"{src}: atmosphere.absorption_db_per_km is required when absorption = constant"
            )
    rate = resolved["scan"]["target_rate_bps"]
    for sec in ("bob", "eve"):
        if resolved[sec]["integration_time_s"] is None:
            if rate <= 0:
                raise ConfigError(
                    f"{src}: {sec}.integration_time_s has no default when scan.target_rate_bps <= 0"
                )
            # slot time defaults to one bit period at the intended data rate
            resolved[sec]["integration_time_s"] = 1.0 / rate
    spec = ScanSpec(
        **{k: resolved["scan"][k] for k in (
            "x_min_m", "x_max_m", "y_min_m", "y_max_m", "step_m",
            "mode", "target_rate_bps", "max_cells",
        )}
    )
    if spec.x_max_m < spec.x_min_m:
        raise ConfigError(f"{src}: scan.x_max_m < scan.x_min_m (empty range)")
    if spec.y_max_m < spec.y_min_m:
        raise ConfigError(f"{src}: scan.y_max_m < scan.y_min_m (empty range)")
    n_cells = len(spec.xs) * len(spec.ys)
    if n_cells > spec.max_cells:
        raise ConfigError(
            f"{src}: scan grid has {n_cells} cells, above scan.max_cells = {spec.max_cells:g}"
        )
    if spec.mode == MODE_PROBABILISTIC and resolved["atmosphere"]["cn2"] == 0.0:
        raise ConfigError(
            f"{src}: atmosphere.cn2 must be > 0 in probabilistic mode (no fading otherwise)"
        )
    sweep_param = resolved["sweep"]["parameter"]
    if sweep_param is not None and resolved["sweep"]["values"] is None:
        raise ConfigError(f"{src}: sweep.values is required when sweep.parameter is set")
    if sweep_param is None and resolved["sweep"]["values"] is not None:
        raise ConfigError(f"{src}: sweep.parameter is required when sweep.values is set")
    if sweep_param == "cn2" and spec.mode == MODE_PROBABILISTIC:
        if any(v == 0.0 for v in resolved["sweep"]["values"]):
            raise ConfigError(f"{src}: sweep over cn2 = 0 is invalid in probabilistic mode")

    cfg = ResolvedConfig(values=resolved, source=src)
    # fail fast on anything the dataclass validators would reject later
    try:
        cfg.conditions()
        cfg.scenario()
        cfg.scattering()
        if resolved["atmosphere"]["absorption"] == "constant":
            cfg.backend()
    except ValueError as exc:
        raise ConfigError(f"{src}: {exc}") from None
    return cfg
