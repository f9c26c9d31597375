#!/usr/bin/env python3
"""Derive the bundled absorption-table calibration values.

No gaseous-absorption model is prescribed for the reference targets, so the
bundled table entries are fitted: the 340 GHz entry is chosen so the
standard scenario jointly satisfies the reproduction targets that are
mutually compatible (map MSC, divergence MSC endpoints, far-field outage
floor), and the 675 GHz entry is pushed high enough that the whole
reference scan line is insecure in both the deterministic and probabilistic
metrics.  140/220 GHz use physically plausible window values;
625 GHz is a filler between its neighbours.

Run from the repository root:

    python scripts/calibrate_absorption.py [--write]

With --write the result replaces src/thzsec/data/absorption_default.csv.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from thzsec.atmosphere import AtmosphereConditions, ConstantAbsorption, extinction
from thzsec.channel import LinkScenario, ScatteringParams, compute_channel_gains
from thzsec.outage import outage_scan_point
from thzsec.secrecy import detection_rates, secrecy_capacity

COND = AtmosphereConditions()  # standard state, cn2 = 5.8e-11
SCATTERING = ScatteringParams()  # g = 0.9, f = 0.5

# reproduction targets and tolerances
MSC_TARGET, MSC_TOL = 44e9, 0.30
MSC25_TARGET, MSC35_TARGET, DIV_TOL = 27e9, 13e9, 0.30
MOP_TARGET, MOP_FACTOR = 0.0016, 3.0

FAR_PROBES = [(1000.0, 100.0), (1000.0, 60.0), (750.0, 100.0), (400.0, 100.0)]


def scenario_at(freq_hz=340e9, divergence=0.02, x=750.0, y=30.0):
    return LinkScenario(freq_hz=freq_hz, eve_xy=(x, y), alpha_a=divergence)


def capacity_bps(scenario, ext):
    gains = compute_channel_gains(scenario, ext, SCATTERING)
    return secrecy_capacity(detection_rates(scenario, gains)).c_s_bps


def metrics_for(alpha_g_db_km: float):
    backend = ConstantAbsorption(alpha_g_db_km)
    ext = extinction(340e9, COND, 1000.0, backend)
    msc_map = max(capacity_bps(scenario_at(x=x, y=y), ext) for x, y in FAR_PROBES)
    msc_25 = capacity_bps(scenario_at(divergence=0.025, x=750.0, y=100.0), ext)
    msc_35 = capacity_bps(scenario_at(divergence=0.035, x=750.0, y=100.0), ext)
    mop = outage_scan_point(scenario_at(x=750.0, y=100.0), ext, SCATTERING, 10e9).p_o
    return msc_map, msc_25, msc_35, mop


def band_margin(value, lo, hi):
    """>1 inside [lo, hi]; the min over criteria is maximised by the fit."""
    if value <= 0:
        return 0.0
    return min(value / lo, hi / value)


def score(alpha_g_db_km: float):
    msc_map, msc_25, msc_35, mop = metrics_for(alpha_g_db_km)
    margins = {
        "msc_map": band_margin(msc_map, MSC_TARGET * (1 - MSC_TOL), MSC_TARGET * (1 + MSC_TOL)),
        "msc_25mrad": band_margin(msc_25, MSC25_TARGET * (1 - DIV_TOL), MSC25_TARGET * (1 + DIV_TOL)),
        "msc_35mrad": band_margin(msc_35, MSC35_TARGET * (1 - DIV_TOL), MSC35_TARGET * (1 + DIV_TOL)),
        "mop": band_margin(mop, MOP_TARGET / MOP_FACTOR, MOP_TARGET * MOP_FACTOR),
    }
    return min(margins.values()), margins, (msc_map, msc_25, msc_35, mop)


def calibrate_340():
    best = None
    for alpha in [18.0 + 0.05 * i for i in range(121)]:  # 18 .. 24 dB/km
        total, margins, values = score(alpha)
        if best is None or total > best[0]:
            best = (total, alpha, margins, values)
    total, alpha, margins, values = best
    print(f"340 GHz: alpha_g = {alpha:.2f} dB/km  (min margin {total:.3f})")
    print(f"  map MSC      = {values[0] / 1e9:8.2f} Gbps   target 44 +-30%  margin {margins['msc_map']:.3f}")
    print(f"  MSC 25 mrad  = {values[1] / 1e9:8.2f} Gbps   target 27 +-30%  margin {margins['msc_25mrad']:.3f}")
    print(f"  MSC 35 mrad  = {values[2] / 1e9:8.2f} Gbps   target 13 +-30%  margin {margins['msc_35mrad']:.3f}")
    print(f"  far MOP      = {values[3] * 100:8.4f} %      target 0.16% x/3 margin {margins['mop']:.3f}")
    if total <= 1.0:
        print("  WARNING: no jointly feasible value; closest compromise kept")
    return alpha


def line_insecure_everywhere(alpha_g_db_km: float, freq_hz: float):
    """Worst-case residual capacity and outage along the x = 750 m line."""
    backend = ConstantAbsorption(alpha_g_db_km)
    ext = extinction(freq_hz, COND, 1000.0, backend)
    worst_cs = -math.inf
    worst_po = math.inf
    for y in (2.0, 10.0, 30.0, 60.0, 85.0, 100.0):
        sc = scenario_at(freq_hz=freq_hz, x=750.0, y=y)
        worst_cs = max(worst_cs, capacity_bps(sc, ext))
        worst_po = min(worst_po, outage_scan_point(sc, ext, SCATTERING, 10e9).p_o)
    return worst_cs, worst_po


def calibrate_675():
    alpha = 80.0
    while alpha < 400.0:
        worst_cs, worst_po = line_insecure_everywhere(alpha, 675e9)
        if worst_cs == 0.0 and worst_po == 1.0:
            break
        alpha *= 1.1
    safe = round(alpha * 1.15, 1)
    worst_cs, worst_po = line_insecure_everywhere(safe, 675e9)
    print(f"675 GHz: alpha_g = {safe:.1f} dB/km  (line worst C_s = {worst_cs:.3g} bps, worst P_o = {worst_po})")
    assert worst_cs == 0.0 and worst_po == 1.0
    return safe


def check_ordering(table):
    print("frequency ordering check (scan-line MSC):")
    mscs = {}
    for freq in (140e9, 220e9, 340e9, 675e9):
        backend = ConstantAbsorption(table[freq])
        ext = extinction(freq, COND, 1000.0, backend)
        mscs[freq] = capacity_bps(scenario_at(freq_hz=freq, x=750.0, y=100.0), ext)
        print(f"  {freq / 1e9:5.0f} GHz: alpha_g {table[freq]:7.2f} dB/km -> MSC {mscs[freq] / 1e9:12.3f} Gbps")
    ordered = mscs[140e9] > mscs[220e9] > mscs[340e9] > mscs[675e9] == 0.0
    print(f"  ordering 140 > 220 > 340 > 675 = 0: {ordered}")
    return ordered


def nlos_shortfall_report(alpha_g_db_km: float):
    """Upper-bound the gain ratio at (750, 30) across phase-function shapes.

    The crossover target needs G_NLOS/G_LOS = 1 at the calibrated
    extinction; this sweep shows the ratio stays far below 1 for every
    admissible asymmetry/forward-fraction combination, i.e. the shortfall
    is structural rather than a calibration artifact.
    """
    backend = ConstantAbsorption(alpha_g_db_km)
    ext = extinction(340e9, COND, 1000.0, backend)
    sc = scenario_at()
    g_los = None
    best = (0.0, None)
    print("NLOS/LOS ratio at (750, 30) across scattering shapes:")
    for g in (0.0, 0.5, 0.7, 0.85, 0.9, 0.93, 0.95, 0.97, 0.99):
        for f in (0.0, 0.5, 2.0):
            try:
                params = ScatteringParams(g=g, f=f)
            except ValueError:
                continue
            gains = compute_channel_gains(sc, ext, params)
            g_los = gains.g_los
            ratio = gains.g_nlos / gains.g_los
            if ratio > best[0]:
                best = (ratio, (g, f))
    print(f"  max ratio {best[0]:.4f} at (g, f) = {best[1]}  [crossover needs 1.0]")
    return best


def crossover_report(alpha_g_db_km: float):
    """Locate the turbulence strength where the two channel gains meet."""
    backend = ConstantAbsorption(alpha_g_db_km)
    sc = scenario_at()
    lo, hi = 1e-12, 2.01e-10  # upper end bounded by the validity limit
    ratio = {}
    for cn2 in (lo, hi):
        ext = extinction(340e9, AtmosphereConditions(cn2=cn2), 1000.0, backend)
        gains = compute_channel_gains(sc, ext, SCATTERING)
        ratio[cn2] = gains.g_nlos / gains.g_los
    print("crossover diagnostics at (750 m, 30 m):")
    print(f"  G_NLOS/G_LOS at cn2 = {lo:g}: {ratio[lo]:.4f}")
    print(f"  G_NLOS/G_LOS at cn2 = {hi:g}: {ratio[hi]:.4f} (validity limit)")
    if ratio[hi] < 1.0:
        print("  no crossover inside the weak-fluctuation validity region")
        return None
    while hi / lo > 1.0001:
        mid = math.sqrt(lo * hi)
        ext = extinction(340e9, AtmosphereConditions(cn2=mid), 1000.0, backend)
        gains = compute_channel_gains(sc, ext, SCATTERING)
        if gains.g_nlos >= gains.g_los:
            hi = mid
        else:
            lo = mid
    print(f"  crossover at cn2 ~ {math.sqrt(lo * hi):.3e}")
    return math.sqrt(lo * hi)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--write", action="store_true", help="update the bundled CSV")
    args = parser.parse_args()

    alpha_340 = calibrate_340()
    alpha_675 = calibrate_675()
    table = {
        140e9: 2.5,
        220e9: 8.0,
        340e9: round(alpha_340, 2),
        625e9: round(0.75 * alpha_675, 1),
        675e9: alpha_675,
    }
    check_ordering(table)
    nlos_shortfall_report(table[340e9])
    crossover_report(table[340e9])

    if args.write:
        out = Path(__file__).resolve().parents[1] / "src" / "thzsec" / "data" / "absorption_default.csv"
        lines = ["freq_hz,alpha_db_per_km"]
        for freq in sorted(table):
            lines.append(f"{freq:.0f},{table[freq]}")
        out.write_text("\n".join(lines) + "\n")
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
