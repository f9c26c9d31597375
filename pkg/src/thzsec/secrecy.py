"""Poisson-OOK detection rates, mutual information and secrecy capacity.

Photoelectron counts per bit slot are lambda = tau * eta * G * P / E_p with
E_p = h * f.  The mutual information of the direct-detection OOK channel with
duty cycle q uses the capacity-form expression

    I = q*(ls+ln)*log2(ls+ln) + (1-q)*ln*log2(ln) - (q*ls+ln)*log2(q*ls+ln)

which is nonnegative by convexity of x*log(x).  A ``paper_exact`` switch
drops the (1-q) weight on the middle term, reproducing a published variant
that can go negative; it exists for auditability only and is never used by
the risk pipeline defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelGains, LinkScenario
from .units import photon_energy_j

__all__ = [
    "DetectionRates",
    "SecrecyResult",
    "detection_rates",
    "ook_mutual_information",
    "secrecy_capacity",
]


@dataclass(frozen=True)
class DetectionRates:
    """Mean detected photoelectrons per slot for both receivers."""

    lambda_l: float  # signal at Bob (LOS)
    lambda_n: float  # signal at Eve (NLOS)
    lambda_b: float  # background at Bob
    lambda_e: float  # background at Eve
    q: float  # OOK duty cycle
    e_photon: float  # photon energy h*f, J
    integration_time_s: float  # Bob's slot time, used for bit/s conversion

    def __post_init__(self):
        for name in ("lambda_l", "lambda_n", "lambda_b", "lambda_e"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 < self.q < 1.0:
            raise ValueError(f"duty cycle q must be in (0, 1), got {self.q}")
        if self.e_photon <= 0 or self.integration_time_s <= 0:
            raise ValueError("e_photon and integration_time_s must be > 0")

    @property
    def snr_bob_db(self) -> float:
        """Derived report: Bob's signal-to-background ratio in dB."""
        if self.lambda_b == 0:
            return math.inf
        return 10.0 * math.log10(self.lambda_l / self.lambda_b) if self.lambda_l else -math.inf

    @property
    def snr_eve_db(self) -> float:
        if self.lambda_e == 0:
            return math.inf
        return 10.0 * math.log10(self.lambda_n / self.lambda_e) if self.lambda_n else -math.inf


@dataclass(frozen=True)
class SecrecyResult:
    i_bob: float  # bits/slot
    i_eve: float  # bits/slot
    c_s_slot: float  # bits/slot
    c_s_bps: float  # bit/s
    insecure: bool


def detection_rates(
    scenario: LinkScenario, gains: ChannelGains, q: float = 0.5
) -> DetectionRates:
    """Convert channel gains to per-slot photoelectron counts.

    Each receiver's own integration time and efficiency apply, so Bob and
    Eve may differ; background counts come straight from the receiver
    parameters.
    """
    e_p = photon_energy_j(scenario.freq_hz)
    lam_l = (
        scenario.bob.integration_time_s
        * scenario.bob.efficiency
        * gains.g_los
        * scenario.tx_power_w
        / e_p
    )
    lam_n = (
        scenario.eve.integration_time_s
        * scenario.eve.efficiency
        * gains.g_nlos
        * scenario.tx_power_w
        / e_p
    )
    return DetectionRates(
        lambda_l=lam_l,
        lambda_n=lam_n,
        lambda_b=scenario.bob.background_count,
        lambda_e=scenario.eve.background_count,
        q=q,
        e_photon=e_p,
        integration_time_s=scenario.bob.integration_time_s,
    )


def _xlog2(v: float) -> float:
    """x*log2(x) with the 0*log(0) = 0 convention."""
    return v * math.log2(v) if v > 0.0 else 0.0


def ook_mutual_information(
    lambda_s: float, lambda_noise: float, q: float, paper_exact: bool = False
) -> float:
    """Mutual information of the Poisson OOK channel in bits/slot."""
    if lambda_s < 0 or lambda_noise < 0:
        raise ValueError("photoelectron rates must be >= 0")
    if not 0.0 < q < 1.0:
        raise ValueError(f"duty cycle q must be in (0, 1), got {q}")
    if lambda_s == 0.0:
        # no signal, no information; exact by construction in both forms
        return 0.0
    on_term = q * _xlog2(lambda_s + lambda_noise)
    off_weight = 1.0 if paper_exact else (1.0 - q)
    off_term = off_weight * _xlog2(lambda_noise)
    mix_term = _xlog2(q * lambda_s + lambda_noise)
    info = on_term + off_term - mix_term
    if not paper_exact and info < 0.0:
        # mathematically nonnegative; clamp float round-off only
        if info < -1e-9:
            raise AssertionError(f"capacity-form MI came out {info}, expected >= 0")
        info = 0.0
    return info


def secrecy_capacity(rates: DetectionRates, paper_exact: bool = False) -> SecrecyResult:
    """Wyner secrecy capacity C_s = [I(X;Y) - I(X;Z)]^+ in bits/slot and bit/s."""
    i_bob = ook_mutual_information(rates.lambda_l, rates.lambda_b, rates.q, paper_exact)
    i_eve = ook_mutual_information(rates.lambda_n, rates.lambda_e, rates.q, paper_exact)
    c_slot = max(0.0, i_bob - i_eve)
    return SecrecyResult(
        i_bob=i_bob,
        i_eve=i_eve,
        c_s_slot=c_slot,
        c_s_bps=c_slot / rates.integration_time_s,
        insecure=c_slot == 0.0,
    )
