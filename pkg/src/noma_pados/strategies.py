"""PA-DOS decision rules, the Phi metric and exhaustive-search oracles.

Scalar functions operate on one channel realization and mirror the
definitions one-to-one; the ``*_many`` variants evaluate the same rules on
numpy arrays of channel gains and are what the Monte Carlo engine runs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import (
    ALL_DECISIONS,
    Decision,
    Geometry,
    InvalidInputError,
    PhiTable,
    RegionS,
    SystemParams,
    ThresholdPair,
    UNAVAILABLE,
    classify_region_S,
)

__all__ = [
    "InevitableOutageError",
    "StrategyId",
    "BASELINES",
    "ChannelDraw",
    "FeedbackBit",
    "huf_feedback",
    "luf_feedback",
    "decide_huf",
    "decide_luf",
    "decide_baseline",
    "decide",
    "phi_ratio",
    "max_phi_decision",
    "decode_success",
    "es_system_outage",
    "es_user_outage",
    "phi_arrays",
    "decide_many",
    "decode_success_many",
    "es_system_outage_many",
    "es_user_outage_many",
    "meets",
]


# The thresholds carry a few ulp of rounding from their closed forms, so a
# received SNR that meets one exactly in decimal arithmetic (e.g. alpha=0.7,
# gamma1=1 gives phi=2.5) can land just under it in floating point.  Every
# threshold test goes through this one comparison so that decisions,
# feedback bits and oracles always agree with each other.
_REL_SLACK = 8 * np.finfo(float).eps


def meets(snr, phi):
    """``snr >= phi`` up to the rounding slack; works on scalars and arrays."""
    return snr >= phi * (1.0 - _REL_SLACK)


class InevitableOutageError(Exception):
    """No decision can avoid outage: the target rates fall in region R0."""


class StrategyId(str, enum.Enum):
    HUF = "HUF"
    LUF = "LUF"
    CSD = "CSD"
    CMD = "CMD"
    DD = "DD"
    SPD = "SPD"
    ES = "ES"


BASELINES = (StrategyId.CSD, StrategyId.CMD, StrategyId.DD, StrategyId.SPD)

_D111 = Decision(1, 1, 1)
_D122 = Decision(1, 2, 2)
_D222 = Decision(2, 2, 2)


@dataclass(frozen=True)
class ChannelDraw:
    """Instantaneous channel gains ``|h1|^2`` and ``|h2|^2`` of one block."""

    h1sq: float
    h2sq: float

    def __post_init__(self) -> None:
        if self.h1sq < 0 or self.h2sq < 0:
            raise InvalidInputError("channel gains must be non-negative")

    def gain(self, user: int) -> float:
        return self.h1sq if user == 1 else self.h2sq


@dataclass(frozen=True)
class FeedbackBit:
    """The single comparison result a one-bit-feedback strategy may observe."""

    value: bool

    def __bool__(self) -> bool:
        return self.value


def huf_feedback(ch: ChannelDraw, rho: float, phis: PhiTable) -> FeedbackBit:
    """User 1 reports whether ``|h1|^2 >= phi_1^{2,2} / rho``."""
    phi = phis.get(1, 2, 2)
    if phi is UNAVAILABLE:
        return FeedbackBit(False)
    return FeedbackBit(bool(meets(rho * ch.h1sq, phi)))


def luf_feedback(region: RegionS, ch: ChannelDraw, rho: float, phis: PhiTable) -> FeedbackBit:
    """User 2 reports whether ``|h2|^2`` falls below ``phi_2^{1,1}`` (S2) or ``phi_2^{1,2}`` (S3), over rho."""
    if region is RegionS.S2:
        return FeedbackBit(not meets(rho * ch.h2sq, phis.finite(2, 1, 1)))
    if region is RegionS.S3:
        return FeedbackBit(not meets(rho * ch.h2sq, phis.finite(2, 1, 2)))
    return FeedbackBit(False)


def _one_bit_rule(region: RegionS, bit: FeedbackBit) -> Decision:
    if region is RegionS.R0:
        raise InevitableOutageError("target rates in R0: every decision is in outage")
    if region is RegionS.S1 or bit.value:
        return _D222
    return _D111 if region is RegionS.S2 else _D122


def decide_huf(region: RegionS, bit: FeedbackBit) -> Decision:
    """High-rate-user-first decision; ``bit`` comes from :func:`huf_feedback`."""
    return _one_bit_rule(region, bit)


def decide_luf(region: RegionS, bit: FeedbackBit) -> Decision:
    """Low-rate-user-first decision; ``bit`` comes from :func:`luf_feedback`.

    The mapping from (region, bit) is the same as HUF's; the strategies
    differ only in which user supplies the bit and what it tests.
    """
    return _one_bit_rule(region, bit)


def _baseline_picks_222(
    sid: StrategyId, h1sq, h2sq, params: SystemParams, geom: Optional[Geometry]
):
    if sid is StrategyId.CSD:
        return h2sq <= h1sq
    if sid is StrategyId.CMD:
        return params.eta2 <= params.eta1
    if sid is StrategyId.DD:
        if geom is None:
            raise InvalidInputError("the DD strategy needs user distances (geometry)")
        return geom.d2 >= geom.d1
    if sid is StrategyId.SPD:
        return True
    raise InvalidInputError(f"{sid!r} is not a baseline strategy")


def decide_baseline(
    sid: StrategyId,
    ch: ChannelDraw,
    params: SystemParams,
    geom: Optional[Geometry] = None,
) -> Decision:
    """[2,2,2] when the baseline's ordering criterion holds, else [1,1,1]."""
    sid = StrategyId(sid)
    return _D222 if _baseline_picks_222(sid, ch.h1sq, ch.h2sq, params, geom) else _D111


def decide(
    sid: StrategyId,
    ch: ChannelDraw,
    t: ThresholdPair,
    params: SystemParams,
    phis: PhiTable,
    geom: Optional[Geometry] = None,
) -> Decision:
    """Decision of any non-ES strategy for one realization."""
    sid = StrategyId(sid)
    if sid is StrategyId.HUF:
        region = classify_region_S(t, params.alpha)
        if region is RegionS.R0:
            raise InevitableOutageError("target rates in R0: every decision is in outage")
        return decide_huf(region, huf_feedback(ch, params.rho, phis))
    if sid is StrategyId.LUF:
        region = classify_region_S(t, params.alpha)
        if region is RegionS.R0:
            raise InevitableOutageError("target rates in R0: every decision is in outage")
        return decide_luf(region, luf_feedback(region, ch, params.rho, phis))
    if sid is StrategyId.ES:
        raise InvalidInputError("ES is an outage oracle, not a single-decision rule")
    return decide_baseline(sid, ch, params, geom)


def phi_ratio(decision: Decision, ch: ChannelDraw, rho: float, phis: PhiTable) -> float:
    """``min(rho|h1|^2/phi_1, rho|h2|^2/phi_2)`` for the decision, 0 if either is unavailable."""
    p1 = phis.for_decision(1, decision)
    p2 = phis.for_decision(2, decision)
    if p1 is UNAVAILABLE or p2 is UNAVAILABLE:
        return 0.0
    return min(rho * ch.h1sq / p1, rho * ch.h2sq / p2)


def max_phi_decision(
    ch: ChannelDraw, t: ThresholdPair, alpha: float, phis: PhiTable, rho: float = 1.0
) -> Tuple[Decision, float]:
    """Closed-form maximizer of ``phi_ratio`` over all eight decisions.

    The maximizer does not depend on ``rho``; the returned value is
    ``phi_ratio`` of that decision at ``rho``.
    """
    region = classify_region_S(t, alpha)
    if region is RegionS.R0:
        return _D222, 0.0
    decision = _D222
    h1, h2 = ch.h1sq, ch.h2sq
    if h2 > 0:
        if region is RegionS.S2 and h1 / h2 < phis.finite(1, 2, 2) / phis.finite(2, 1, 1):
            decision = _D111
        elif region is RegionS.S3 and h1 / h2 < phis.finite(1, 2, 2) / phis.finite(2, 1, 2):
            decision = _D122
    return decision, phi_ratio(decision, ch, rho, phis)


def decode_success(
    user: int, decision: Decision, ch: ChannelDraw, rho: float, phis: PhiTable
) -> bool:
    phi = phis.for_decision(user, decision)
    if phi is UNAVAILABLE:
        return False
    return bool(meets(rho * ch.gain(user), phi))


def es_system_outage(ch: ChannelDraw, rho: float, phis: PhiTable) -> bool:
    """True when no decision lets both users decode."""
    return not any(
        decode_success(1, d, ch, rho, phis) and decode_success(2, d, ch, rho, phis)
        for d in ALL_DECISIONS
    )


def es_user_outage(user: int, ch: ChannelDraw, rho: float, phis: PhiTable) -> bool:
    """True when no ``(pi, omega_user)`` lets ``user`` decode its own message."""
    finite = [
        v for (u, _, _), v in phis.entries.items() if u == user and v is not UNAVAILABLE
    ]
    if not finite:
        return True
    return not meets(rho * ch.gain(user), min(finite))


# ---------------------------------------------------------------------------
# Array versions
# ---------------------------------------------------------------------------


def phi_arrays(phis: PhiTable) -> Tuple[np.ndarray, np.ndarray]:
    """Thresholds and availability as ``(2, 2, 2)`` arrays indexed ``[user-1, pi-1, omega-1]``.

    Unavailable thresholds hold NaN in the first array; callers must gate on
    the availability mask rather than on the value.
    """
    thr = np.full((2, 2, 2), np.nan)
    avail = np.zeros((2, 2, 2), dtype=bool)
    for (u, p, w), v in phis.entries.items():
        if v is not UNAVAILABLE:
            thr[u - 1, p - 1, w - 1] = v
            avail[u - 1, p - 1, w - 1] = True
    return thr, avail


def decide_many(
    sid: StrategyId,
    h1sq: np.ndarray,
    h2sq: np.ndarray,
    t: ThresholdPair,
    params: SystemParams,
    phis: PhiTable,
    geom: Optional[Geometry] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block decisions ``(pi, omega1, omega2)`` as int8 arrays."""
    sid = StrategyId(sid)
    n = np.shape(h1sq)[0]
    rho = params.rho
    if sid in (StrategyId.HUF, StrategyId.LUF):
        region = classify_region_S(t, params.alpha)
        if region is RegionS.R0:
            raise InevitableOutageError("target rates in R0: every decision is in outage")
        if region is RegionS.S1:
            two = np.full(n, 2, dtype=np.int8)
            return two, two.copy(), two.copy()
        if sid is StrategyId.HUF:
            bit = meets(rho * h1sq, phis.finite(1, 2, 2))
        elif region is RegionS.S2:
            bit = ~meets(rho * h2sq, phis.finite(2, 1, 1))
        else:
            bit = ~meets(rho * h2sq, phis.finite(2, 1, 2))
        pi = np.where(bit, 2, 1).astype(np.int8)
        if region is RegionS.S2:
            return pi, pi.copy(), pi.copy()
        two = np.full(n, 2, dtype=np.int8)
        return pi, two, two.copy()
    if sid is StrategyId.ES:
        raise InvalidInputError("ES is an outage oracle, not a single-decision rule")
    picks = _baseline_picks_222(sid, h1sq, h2sq, params, geom)
    pi = np.where(np.broadcast_to(picks, (n,)), 2, 1).astype(np.int8)
    return pi, pi.copy(), pi.copy()


def decode_success_many(
    user: int,
    pi: np.ndarray,
    omega: np.ndarray,
    hsq: np.ndarray,
    rho: float,
    phis: PhiTable,
) -> np.ndarray:
    thr, avail = phi_arrays(phis)
    idx_p = np.asarray(pi, dtype=np.intp) - 1
    idx_w = np.asarray(omega, dtype=np.intp) - 1
    t_u = thr[user - 1][idx_p, idx_w]
    ok = avail[user - 1][idx_p, idx_w]
    return ok & meets(rho * hsq, t_u)


def es_system_outage_many(
    h1sq: np.ndarray, h2sq: np.ndarray, rho: float, phis: PhiTable
) -> np.ndarray:
    served = np.zeros(np.shape(h1sq), dtype=bool)
    for d in ALL_DECISIONS:
        p1 = phis.for_decision(1, d)
        p2 = phis.for_decision(2, d)
        if p1 is UNAVAILABLE or p2 is UNAVAILABLE:
            continue
        served |= meets(rho * h1sq, p1) & meets(rho * h2sq, p2)
    return ~served


def es_user_outage_many(user: int, hsq: np.ndarray, rho: float, phis: PhiTable) -> np.ndarray:
    finite = [
        v for (u, _, _), v in phis.entries.items() if u == user and v is not UNAVAILABLE
    ]
    if not finite:
        return np.ones(np.shape(hsq), dtype=bool)
    return ~meets(rho * hsq, min(finite))
