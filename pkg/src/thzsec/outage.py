"""Probabilistic risk: log-normal fading of the LOS gain, the threshold gain
where the secrecy capacity meets the target rate, and the outage probability.

Only the LOS gain fluctuates; the NLOS gain stays at its deterministic
value.  The instantaneous gain G is log-normal around the deterministic mean
with log-variance equal to the spherical-wave Rytov variance, and the
log-mean is pinned to -sigma^2/2 so that E[G] equals the deterministic gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .atmosphere import ExtinctionBreakdown, RegimeError
from .channel import LinkScenario, ScatteringParams, compute_channel_gains
from .secrecy import DetectionRates, detection_rates, ook_mutual_information
from .units import photon_energy_j

__all__ = [
    "MonotonicityError",
    "FadingModel",
    "OutageResult",
    "lognormal_pdf",
    "lognormal_cdf",
    "threshold_gain",
    "outage_probability",
    "outage_probability_mc",
    "outage_scan_point",
]

GAIN_BRACKET_LO = 1e-30
GAIN_BRACKET_HI = 1.0
BISECT_REL_WIDTH = 1e-10
BISECT_VALUE_TOL = 1e-9  # bits/slot
_MAX_BISECT_ITER = 400


class MonotonicityError(RuntimeError):
    """The capacity evaluations seen during bisection were not monotone."""


@dataclass(frozen=True)
class FadingModel:
    """Log-normal fading of the instantaneous LOS gain."""

    g_los_mean: float
    sigma_r2: float  # spherical-wave Rytov variance, log-domain variance

    def __post_init__(self):
        if self.g_los_mean <= 0:
            raise ValueError(f"g_los_mean must be > 0, got {self.g_los_mean}")
        if self.sigma_r2 >= 1.0:
            raise RegimeError(
                f"log-normal fading model invalid for sigma_r2 = {self.sigma_r2:.4g} >= 1"
            )
        if self.sigma_r2 <= 0.0:
            raise ValueError(
                f"sigma_r2 must be in (0, 1), got {self.sigma_r2}"
            )

    @property
    def mu_log(self) -> float:
        """Mean of ln(G/G_mean); -sigma^2/2 keeps E[G] at the mean gain."""
        return -self.sigma_r2 / 2.0

    @property
    def median_gain(self) -> float:
        return self.g_los_mean * math.exp(self.mu_log)


def lognormal_pdf(g, model: FadingModel):
    """Density of the instantaneous LOS gain at g (> 0)."""
    arr = np.asarray(g, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("gain must be > 0")
    z = np.log(arr / model.g_los_mean) - model.mu_log
    out = np.exp(-z * z / (2.0 * model.sigma_r2)) / (
        arr * math.sqrt(2.0 * math.pi * model.sigma_r2)
    )
    return float(out) if np.isscalar(g) else out


def _std_normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def lognormal_cdf(g: float, model: FadingModel) -> float:
    """P{G <= g} in closed form."""
    if g <= 0:
        return 0.0
    z = (math.log(g / model.g_los_mean) - model.mu_log) / math.sqrt(model.sigma_r2)
    return _std_normal_cdf(z)


def _capacity_vs_gain(
    scenario: LinkScenario,
    g_nlos_fixed: float,
    rates_template: DetectionRates,
    paper_exact: bool = False,
) -> Callable[[float], float]:
    """Unclamped I_bob(G) - I_eve as a function of the LOS gain G.

    Strictly increasing in G, so the clamped capacity crosses any positive
    target exactly where this does.
    """
    e_p = photon_energy_j(scenario.freq_hz)
    k_bob = (
        scenario.bob.integration_time_s
        * scenario.bob.efficiency
        * scenario.tx_power_w
        / e_p
    )
    k_eve = (
        scenario.eve.integration_time_s
        * scenario.eve.efficiency
        * scenario.tx_power_w
        / e_p
    )
    i_eve = ook_mutual_information(
        k_eve * g_nlos_fixed, rates_template.lambda_e, rates_template.q, paper_exact
    )

    def capacity(g: float) -> float:
        i_bob = ook_mutual_information(
            k_bob * g, rates_template.lambda_b, rates_template.q, paper_exact
        )
        return i_bob - i_eve

    return capacity


def _bisect_monotone(
    func: Callable[[float], float],
    target: float,
    lo: float = GAIN_BRACKET_LO,
    hi: float = GAIN_BRACKET_HI,
) -> Optional[float]:
    """Solve func(x) = target for a non-decreasing func by log-space bisection.

    Returns None when func(hi) < target, the lower bracket when
    func(lo) > target, and raises ``MonotonicityError`` when an evaluation
    falls outside the values bracketing it.
    """
    f_lo, f_hi = func(lo), func(hi)
    if f_hi < target:
        return None
    if f_lo > target:
        return lo
    for _ in range(_MAX_BISECT_ITER):
        mid = math.sqrt(lo * hi)
        f_mid = func(mid)
        if f_mid < f_lo - 1e-12 or f_mid > f_hi + 1e-12:
            raise MonotonicityError(
                f"evaluation at {mid:.3e} fell outside the bracketing values"
            )
        if f_mid >= target:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
        if (hi - lo) <= BISECT_REL_WIDTH * hi and min(
            abs(f_hi - target), abs(f_lo - target)
        ) <= BISECT_VALUE_TOL:
            break
    return hi if abs(f_hi - target) <= abs(f_lo - target) else lo


def threshold_gain(
    scenario: LinkScenario,
    g_nlos_fixed: float,
    rates_template: DetectionRates,
    target_rate_bps: float,
    paper_exact: bool = False,
) -> Optional[float]:
    """LOS gain G* at which the secrecy capacity equals the target rate.

    Bisection in log-gain over [1e-30, 1] down to 1e-10 relative bracket
    width and 1e-9 bits/slot residual.  Returns None when even G = 1 cannot
    reach the target (outage certain); returns the lower bracket when the
    target is already exceeded there (outage negligible).
    """
    target_bits = target_rate_bps * rates_template.integration_time_s
    capacity = _capacity_vs_gain(scenario, g_nlos_fixed, rates_template, paper_exact)
    return _bisect_monotone(capacity, target_bits)


def outage_probability(model: FadingModel, g_threshold: float) -> float:
    """Closed-form P{G <= G*} under the log-normal fading model."""
    return lognormal_cdf(g_threshold, model)


def outage_probability_mc(
    model: FadingModel,
    g_threshold: float,
    n_samples: int = 1_000_000,
    seed: int = 0,
    chunks: int = 1,
) -> float:
    """Monte Carlo estimate of the outage probability.

    The sample stream is partitioned deterministically into ``chunks``
    sub-streams via spawned seed sequences, so a parallel driver assigning
    one chunk per worker reproduces this exact estimate.
    """
    if n_samples <= 0 or chunks <= 0:
        raise ValueError("n_samples and chunks must be > 0")
    base = np.random.SeedSequence(seed)
    sub_seeds = base.spawn(chunks)
    per_chunk = [n_samples // chunks] * chunks
    for i in range(n_samples % chunks):
        per_chunk[i] += 1
    ln_mean = math.log(model.g_los_mean) + model.mu_log
    sigma = math.sqrt(model.sigma_r2)
    hits = 0
    for sub, n in zip(sub_seeds, per_chunk):
        if n == 0:
            continue
        rng = np.random.Generator(np.random.PCG64(sub))
        gains = np.exp(ln_mean + sigma * rng.standard_normal(n))
        hits += int(np.count_nonzero(gains <= g_threshold))
    return hits / n_samples


@dataclass(frozen=True)
class OutageResult:
    p_o: float
    g_threshold: Optional[float]
    target_rate_bps: float

    def __post_init__(self):
        if not 0.0 <= self.p_o <= 1.0:
            raise ValueError(f"p_o must be in [0, 1], got {self.p_o}")


def outage_scan_point(
    scenario: LinkScenario,
    ext: ExtinctionBreakdown,
    params: ScatteringParams,
    target_rate_bps: float,
    q: float = 0.5,
    paper_exact: bool = False,
) -> OutageResult:
    """Full probabilistic pipeline for one eavesdropper position.

    Channel gains -> threshold gain -> closed-form outage probability.  The
    fading variance comes from the extinction breakdown's spherical-wave
    Rytov variance, keeping a single source of truth.
    """
    if target_rate_bps <= 0.0:
        # the capacity is never below a nonpositive target under continuous fading
        return OutageResult(p_o=0.0, g_threshold=None, target_rate_bps=target_rate_bps)
    gains = compute_channel_gains(scenario, ext, params)
    rates = detection_rates(scenario, gains, q)
    model = FadingModel(g_los_mean=gains.g_los, sigma_r2=ext.beta_r2_sph)
    g_star = threshold_gain(
        scenario, gains.g_nlos, rates, target_rate_bps, paper_exact
    )
    if g_star is None:
        return OutageResult(p_o=1.0, g_threshold=None, target_rate_bps=target_rate_bps)
    return OutageResult(
        p_o=outage_probability(model, g_star),
        g_threshold=g_star,
        target_rate_bps=target_rate_bps,
    )
