"""Closed-form and high-SNR outage probabilities under Rayleigh block fading.

Channel gains are exponential with means ``eta1``, ``eta2``.  Exact
expressions are arranged around ``expm1`` so that differences of
exponentials close to one keep full precision at high SNR; algebraically
they are the plain sums of exponentials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

from .core import (
    PhiTable,
    RegionG,
    RegionR,
    RegionS,
    SystemParams,
    ThresholdPair,
    classify_region_G,
    classify_region_R,
    classify_region_S,
    phi_table,
)

__all__ = [
    "OutageCurvePoint",
    "GainKind",
    "GainResult",
    "UserOutage",
    "chi",
    "psys_exact",
    "psys_asymptotic",
    "psys_csd_exact",
    "psys_csd_asymptotic",
    "user_outage_exact",
    "user_outage_asymptotic",
    "theta_ratio",
    "coding_gain",
    "exact_curve_point",
]


@dataclass(frozen=True)
class OutageCurvePoint:
    rho: float
    p_sys: float
    p_user1: float
    p_user2: float

    def __post_init__(self) -> None:
        for p in (self.p_sys, self.p_user1, self.p_user2):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability out of range: {p!r}")


class GainKind(str, enum.Enum):
    ZERO = "Zero"
    FINITE = "Finite"
    INFINITE = "Infinite"


@dataclass(frozen=True)
class GainResult:
    """High-SNR coding gain of HUF/LUF over CSD.

    ``theta_db`` is set only for :attr:`GainKind.FINITE`.
    """

    region: RegionG
    kind: GainKind
    theta_db: Optional[float] = None


class UserOutage(NamedTuple):
    huf: Tuple[float, float]
    luf: Tuple[float, float]


def _clip(p: float) -> float:
    return min(1.0, max(0.0, p))


def _one_minus_exp(x: float) -> float:
    return -math.expm1(-x)


def _exp_diff(p: float, q: float) -> float:
    """``e^-p - e^-q`` without cancellation or overflow, for either ordering."""
    if p <= q:
        return -math.exp(-p) * math.expm1(p - q)
    return math.exp(-q) * math.expm1(q - p)


def chi(x: float, y: float, z: float, rho: float) -> float:
    """``1 - e^{-x/rho} - e^{-(y+z)/rho} + e^{-(x+y)/rho}``."""
    x, y, z = x / rho, y / rho, z / rho
    return -math.expm1(-x) - _exp_diff(y + z, x + y)


def _loads(phis: PhiTable, params: SystemParams):
    """Thresholds divided by the channel means, the quantities every formula uses."""

    def load(user: int, pi: int, omega: int) -> float:
        eta = params.eta1 if user == 1 else params.eta2
        return phis.finite(user, pi, omega) / eta

    return load


def _switching_outage(a: float, b: float, c: float) -> float:
    """``1 - e^-a - e^-b + e^-c``, evaluated without cancellation."""
    return -math.expm1(-a) - _exp_diff(b, c)


def psys_exact(t: ThresholdPair, params: SystemParams) -> float:
    """System outage probability of HUF (identically LUF)."""
    region = classify_region_S(t, params.alpha)
    if region is RegionS.R0:
        return 1.0
    load = _loads(phi_table(t, params.alpha), params)
    rho = params.rho
    base = (load(1, 2, 2) + load(2, 2, 2)) / rho
    if region is RegionS.S1:
        return _clip(_one_minus_exp(base))
    w = 1 if region is RegionS.S2 else 2
    other = (load(1, 1, w) + load(2, 1, w)) / rho
    mixed = (load(1, 2, 2) + load(2, 1, w)) / rho
    return _clip(_switching_outage(base, other, mixed))


def psys_asymptotic(t: ThresholdPair, params: SystemParams) -> float:
    """High-SNR system outage of HUF/LUF, linear in ``1/rho`` and capped at 1."""
    region = classify_region_S(t, params.alpha)
    if region is RegionS.R0:
        return 1.0
    load = _loads(phi_table(t, params.alpha), params)
    first = {RegionS.S1: (2, 2), RegionS.S2: (1, 1), RegionS.S3: (1, 2)}[region]
    return _clip((load(1, *first) + load(2, 2, 2)) / params.rho)


def psys_csd_exact(t: ThresholdPair, params: SystemParams) -> float:
    """System outage of the channel-state-determined baseline."""
    region = classify_region_R(t, params.alpha)
    if region is RegionR.R0:
        return 1.0
    phis = phi_table(t, params.alpha)
    load = _loads(phis, params)
    rho = params.rho
    lam1, lam2 = 1.0 / params.eta1, 1.0 / params.eta2
    share1 = lam1 / (lam1 + lam2)
    share2 = lam2 / (lam1 + lam2)
    a = (load(1, 2, 2) + load(2, 2, 2)) / rho
    d1 = phis.finite(1, 2, 2) * (lam1 + lam2) / rho
    if region in (RegionR.R3, RegionR.R5):
        return _clip(_one_minus_exp(a) + share1 * math.exp(-d1))
    b = (load(1, 1, 1) + load(2, 1, 1)) / rho
    d2 = phis.finite(2, 1, 1) * (lam1 + lam2) / rho
    # share1 + share2 == 1 lets the e^-b term be split across both corrections.
    corr = share1 * _exp_diff(d1, b) + share2 * _exp_diff(d2, b)
    return _clip(_one_minus_exp(a) + corr)


def psys_csd_asymptotic(t: ThresholdPair, params: SystemParams) -> float:
    region = classify_region_R(t, params.alpha)
    if region is RegionR.R0:
        return 1.0
    if region in (RegionR.R3, RegionR.R5):
        lam1, lam2 = 1.0 / params.eta1, 1.0 / params.eta2
        return lam1 / (lam1 + lam2)
    load = _loads(phi_table(t, params.alpha), params)
    return _clip((load(1, 1, 1) + load(2, 2, 2)) / params.rho)


def user_outage_exact(t: ThresholdPair, params: SystemParams) -> UserOutage:
    """Per-user outage probabilities ``(user1, user2)`` under HUF and under LUF."""
    region = classify_region_S(t, params.alpha)
    if region is RegionS.R0:
        return UserOutage(huf=(1.0, 1.0), luf=(1.0, 1.0))
    load = _loads(phi_table(t, params.alpha), params)
    rho = params.rho
    p1_opt = {RegionS.S1: (2, 2), RegionS.S2: (1, 1), RegionS.S3: (1, 2)}[region]
    u1_best = _clip(_one_minus_exp(load(1, *p1_opt) / rho))
    u2_best = _clip(_one_minus_exp(load(2, 2, 2) / rho))
    if region is RegionS.S1:
        return UserOutage(huf=(u1_best, u2_best), luf=(u1_best, u2_best))
    w = p1_opt[1]
    a_huf = (load(2, 1, w), load(1, 2, 2), load(2, 2, 2))
    a_luf = (load(1, 2, 2), load(2, 1, w), load(1, 1, w))
    return UserOutage(
        huf=(u1_best, _clip(chi(*a_huf, rho))),
        luf=(_clip(chi(*a_luf, rho)), u2_best),
    )


def user_outage_asymptotic(t: ThresholdPair, params: SystemParams) -> Tuple[float, float]:
    """High-SNR user outage, shared by HUF and LUF."""
    region = classify_region_S(t, params.alpha)
    if region is RegionS.R0:
        return (1.0, 1.0)
    load = _loads(phi_table(t, params.alpha), params)
    p1_opt = {RegionS.S1: (2, 2), RegionS.S2: (1, 1), RegionS.S3: (1, 2)}[region]
    return (_clip(load(1, *p1_opt) / params.rho), _clip(load(2, 2, 2) / params.rho))


def theta_ratio(t: ThresholdPair, params: SystemParams, variant: RegionS) -> float:
    """Linear CSD-to-optimal asymptote ratio using the S1 or S3 denominator.

    Unlike :func:`coding_gain` this does not check which region ``t``
    belongs to, so it can be evaluated on region boundaries.
    """
    load = _loads(phi_table(t, params.alpha), params)
    num = load(1, 1, 1) + load(2, 2, 2)
    if variant is RegionS.S1:
        return num / (load(1, 2, 2) + load(2, 2, 2))
    if variant is RegionS.S3:
        return num / (load(1, 1, 2) + load(2, 2, 2))
    raise ValueError(f"theta is defined for S1 or S3 only, not {variant!r}")


def coding_gain(t: ThresholdPair, params: SystemParams) -> GainResult:
    region = classify_region_G(t, params.alpha)
    if region is RegionG.G1:
        return GainResult(region, GainKind.ZERO)
    if region is RegionG.G3:
        return GainResult(region, GainKind.INFINITE)
    variant = classify_region_S(t, params.alpha)
    return GainResult(region, GainKind.FINITE, 10.0 * math.log10(theta_ratio(t, params, variant)))


def exact_curve_point(t: ThresholdPair, params: SystemParams, strategy: str = "HUF") -> OutageCurvePoint:
    """System and user outage of HUF or LUF at ``params.rho``."""
    name = getattr(strategy, "value", strategy)
    if name not in ("HUF", "LUF"):
        raise ValueError(f"closed forms exist for HUF and LUF only, not {strategy!r}")
    users = user_outage_exact(t, params)
    pair = users.huf if name == "HUF" else users.luf
    return OutageCurvePoint(params.rho, psys_exact(t, params), pair[0], pair[1])
