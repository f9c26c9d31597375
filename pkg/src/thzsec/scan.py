"""2-D eavesdropper-position scans, 1-D parameter sweeps, insecure-region
extraction and CSV/JSON emission.

A scan evaluates the full pipeline per grid cell into a preallocated array,
row-major (y outer, x inner).  The per-cell computation is a pure function
of the resolved configuration, so parallel execution over rows cannot change
the output: workers fill disjoint rows addressed by index.  Cells whose
evaluation hits the turbulence-regime validity limit are recorded as NaN and
counted; cells at y = 0 (no defined eavesdropper geometry) likewise.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .atmosphere import RegimeError, extinction
from .channel import compute_channel_gains
from .config import MODE_DETERMINISTIC, MODE_PROBABILISTIC, ResolvedConfig
from .outage import outage_scan_point
from .secrecy import detection_rates, secrecy_capacity

__all__ = [
    "ScanResult",
    "InsecureRegion",
    "run_scan",
    "run_sweep",
    "extract_insecure_region",
    "emit",
    "load_csv",
    "load_json",
    "JSON_SCHEMA",
]


@dataclass(frozen=True)
class ScanResult:
    """Dense grid of secrecy capacities (bit/s) or outage probabilities."""

    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    values: np.ndarray  # shape (len(ys), len(xs))
    mode: str
    msc_bps: Optional[float]  # deterministic mode only
    mop: Optional[float]  # probabilistic mode only
    regime_error_cells: int
    invalid_position_cells: int
    metadata: Dict[str, Any]

    def is_insecure(self) -> np.ndarray:
        """Boolean mask of insecure cells (C_s = 0 or P_o = 1, bit-exact)."""
        if self.mode == MODE_DETERMINISTIC:
            return self.values == 0.0
        return self.values == 1.0

    @property
    def insecure_cells(self) -> frozenset:
        """Set of (iy, ix) indices of insecure cells."""
        iy, ix = np.nonzero(self.is_insecure())
        return frozenset(zip(iy.tolist(), ix.tolist()))


@dataclass(frozen=True)
class InsecureRegion:
    """Per-row maximal runs of insecure cells plus the global cell set."""

    runs_by_row: Dict[int, List[Tuple[int, int]]]  # iy -> [(ix_first, ix_last)]
    cells: frozenset
    cell_count: int
    area_m2: float


def _cell_value(scenario, ext, scattering, mode, target_rate_bps, q, paper_exact) -> float:
    if mode == MODE_DETERMINISTIC:
        gains = compute_channel_gains(scenario, ext, scattering)
        rates = detection_rates(scenario, gains, q)
        return secrecy_capacity(rates, paper_exact).c_s_bps
    result = outage_scan_point(
        scenario, ext, scattering, target_rate_bps, q, paper_exact
    )
    return result.p_o


def _eval_row(payload) -> Tuple[int, List[float], int, int]:
    (iy, y, xs, scenario, ext, scattering, mode, target, q, paper_exact) = payload
    row: List[float] = []
    regime = 0
    invalid = 0
    for x in xs:
        if y == 0.0:
            row.append(math.nan)
            invalid += 1
            continue
        try:
            row.append(
                _cell_value(
                    scenario.with_eve_at(x, y), ext, scattering, mode, target, q, paper_exact
                )
            )
        except RegimeError:
            row.append(math.nan)
            regime += 1
    return iy, row, regime, invalid


def run_scan(cfg: ResolvedConfig, threads: int = 1, seed: int = 0) -> ScanResult:
    """Evaluate the configured grid; deterministic for a fixed config.

    ``seed`` does not influence the scan values (the pipeline is closed
    form); it is echoed into the metadata so downstream Monte Carlo
    cross-checks can share one record of the run.
    """
    spec = cfg.scan_spec()
    scenario = cfg.scenario()
    scattering = cfg.scattering()
    conditions = cfg.conditions()
    q = cfg.duty_cycle()
    paper_exact = cfg.paper_exact()
    xs, ys = spec.xs, spec.ys

    values = np.full((len(ys), len(xs)), np.nan)
    regime_cells = 0
    invalid_cells = 0
    try:
        ext = extinction(
            scenario.freq_hz, conditions, scenario.d, cfg.backend(), cfg.wave()
        )
    except RegimeError:
        # whole scan outside the weak-fluctuation regime: all cells NaN
        regime_cells = values.size
        ext = None

    if ext is not None:
        payloads = [
            (iy, y, xs, scenario, ext, scattering, spec.mode, spec.target_rate_bps, q, paper_exact)
            for iy, y in enumerate(ys)
        ]
        if threads <= 1 or len(ys) <= 1:
            results = map(_eval_row, payloads)
        else:
            executor = ProcessPoolExecutor(max_workers=threads)
            try:
                results = list(executor.map(_eval_row, payloads))
            finally:
                executor.shutdown()
        for iy, row, regime, invalid in results:
            values[iy, :] = row
            regime_cells += regime
            invalid_cells += invalid

    valid = values[~np.isnan(values)]
    msc = mop = None
    if spec.mode == MODE_DETERMINISTIC:
        msc = float(valid.max()) if valid.size else None
    else:
        mop = float(valid.min()) if valid.size else None

    metadata = {
        "config": cfg.to_dict(),
        "mode": spec.mode,
        "seed": seed,
        "regime_error_cells": regime_cells,
        "invalid_position_cells": invalid_cells,
    }
    return ScanResult(
        xs=tuple(xs),
        ys=tuple(ys),
        values=values,
        mode=spec.mode,
        msc_bps=msc,
        mop=mop,
        regime_error_cells=regime_cells,
        invalid_position_cells=invalid_cells,
        metadata=metadata,
    )


def run_sweep(
    cfg: ResolvedConfig,
    out_stem: Optional[Path] = None,
    fmt: str = "csv",
    threads: int = 1,
    seed: int = 0,
):
    """Run one scan per sweep value; emit one file per value when asked.

    Output files follow ``<stem>_<parameter>=<value>.<ext>``.
    """
    sweep = cfg.sweep_spec()
    if sweep is None:
        raise ValueError("configuration has no [sweep] section")
    outputs = []
    for value in sweep.values:
        sub_cfg = cfg.with_sweep_value(sweep.parameter, value)
        result = run_scan(sub_cfg, threads=threads, seed=seed)
        path = None
        if out_stem is not None:
            path = out_stem.with_name(
                f"{out_stem.stem}_{sweep.parameter}={value!r}.{fmt}"
            )
            emit(result, fmt, path)
        outputs.append((value, result, path))
    return outputs


def extract_insecure_region(result: ScanResult) -> InsecureRegion:
    """Maximal per-row runs of insecure cells and the aggregate region."""
    mask = result.is_insecure()
    runs: Dict[int, List[Tuple[int, int]]] = {}
    for iy in range(mask.shape[0]):
        row_runs: List[Tuple[int, int]] = []
        start = None
        for ix in range(mask.shape[1]):
            if mask[iy, ix] and start is None:
                start = ix
            elif not mask[iy, ix] and start is not None:
                row_runs.append((start, ix - 1))
                start = None
        if start is not None:
            row_runs.append((start, mask.shape[1] - 1))
        if row_runs:
            runs[iy] = row_runs
    count = int(mask.sum())
    step = result.metadata["config"]["scan"]["step_m"]
    return InsecureRegion(
        runs_by_row=runs,
        cells=result.insecure_cells,
        cell_count=count,
        area_m2=count * step * step,
    )


# ---------------------------------------------------------------------------
# emission / loading

JSON_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "schema_version",
        "mode",
        "x_m",
        "y_m",
        "values",
        "msc_bps",
        "mop",
        "regime_error_cells",
        "invalid_position_cells",
        "insecure_runs_by_row",
        "metadata",
    ],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": 1},
        "mode": {"enum": [MODE_DETERMINISTIC, MODE_PROBABILISTIC]},
        "x_m": {"type": "array", "items": {"type": "number"}},
        "y_m": {"type": "array", "items": {"type": "number"}},
        # null marks a cell outside the model's validity (NaN in memory)
        "values": {
            "type": "array",
            "items": {"type": "array", "items": {"type": ["number", "null"]}},
        },
        "msc_bps": {"type": ["number", "null"]},
        "mop": {"type": ["number", "null"]},
        "regime_error_cells": {"type": "integer"},
        "invalid_position_cells": {"type": "integer"},
        "insecure_runs_by_row": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {
                    "type": "array",
                    "items": {"type": "integer"},
                    "minItems": 2,
                    "maxItems": 2,
                },
            },
        },
        "metadata": {"type": "object"},
    },
}


def _float_token(v: float) -> str:
    """Shortest exact decimal representation (round-trips via float())."""
    if math.isnan(v):
        return "nan"
    return repr(float(v))


def _config_json(metadata: Dict[str, Any]) -> str:
    return json.dumps(metadata, sort_keys=True, separators=(",", ":"))


def emit(result: ScanResult, fmt: str, path: Union[str, Path]) -> None:
    """Write the scan result as CSV or JSON; re-parsing is bit-exact."""
    path = Path(path)
    if fmt == "csv":
        lines = [f"# config: {_config_json(result.metadata)}"]
        lines.append(f"# mode: {result.mode}")
        if result.msc_bps is not None:
            lines.append(f"# msc_bps: {_float_token(result.msc_bps)}")
        if result.mop is not None:
            lines.append(f"# mop: {_float_token(result.mop)}")
        lines.append(f"# regime_error_cells: {result.regime_error_cells}")
        lines.append(f"# invalid_position_cells: {result.invalid_position_cells}")
        lines.append("x_m,y_m,value")
        for iy, y in enumerate(result.ys):
            for ix, x in enumerate(result.xs):
                lines.append(
                    f"{_float_token(x)},{_float_token(y)},{_float_token(result.values[iy, ix])}"
                )
        path.write_text("\n".join(lines) + "\n")
    elif fmt == "json":
        region = extract_insecure_region(result)
        payload = {
            "schema_version": 1,
            "mode": result.mode,
            "x_m": list(result.xs),
            "y_m": list(result.ys),
            "values": [
                [None if math.isnan(v) else v for v in row]
                for row in result.values.tolist()
            ],
            "msc_bps": result.msc_bps,
            "mop": result.mop,
            "regime_error_cells": result.regime_error_cells,
            "invalid_position_cells": result.invalid_position_cells,
            "insecure_runs_by_row": {
                str(iy): [list(r) for r in runs]
                for iy, runs in region.runs_by_row.items()
            },
            "metadata": result.metadata,
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def load_csv(path: Union[str, Path]):
    """Re-read an emitted CSV into (xs, ys, values, header_fields)."""
    header: Dict[str, str] = {}
    cells: Dict[Tuple[float, float], float] = {}
    xs: List[float] = []
    ys: List[float] = []
    saw_columns = False
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
            continue
        if not saw_columns:
            if line.strip() != "x_m,y_m,value":
                raise ValueError(f"{path}: unexpected column header {line!r}")
            saw_columns = True
            continue
        if not line.strip():
            continue
        sx, sy, sv = line.split(",")
        x, y, v = float(sx), float(sy), float(sv)
        if x not in xs:
            xs.append(x)
        if y not in ys:
            ys.append(y)
        cells[(x, y)] = v
    values = np.full((len(ys), len(xs)), np.nan)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            values[iy, ix] = cells[(x, y)]
    return xs, ys, values, header


def load_json(path: Union[str, Path]):
    """Re-read an emitted JSON into (xs, ys, values, payload)."""
    payload = json.loads(Path(path).read_text())
    values = np.array(
        [[math.nan if v is None else v for v in row] for row in payload["values"]],
        dtype=float,
    )
    return payload["x_m"], payload["y_m"], values, payload
