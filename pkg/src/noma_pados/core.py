"""Domain types, rate/path-loss conversions, rate-region classification and
the per-user decoding thresholds for two-user downlink F-NOMA.

Users are indexed so that user 1 carries the higher target rate
(``gamma1 >= gamma2``).  ``pi`` names the user that receives the larger
power share ``alpha * p``; ``omega`` names the message a receiver decodes
first.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, Tuple, Union

__all__ = [
    "InvalidInputError",
    "SystemParams",
    "Geometry",
    "ThresholdPair",
    "Decision",
    "ALL_DECISIONS",
    "RegionR",
    "RegionS",
    "RegionG",
    "Unavailable",
    "UNAVAILABLE",
    "PhiTable",
    "sinr_threshold",
    "snr_from_db",
    "pathloss_mean",
    "classify_region_R",
    "classify_region_S",
    "classify_region_G",
    "available_orders",
    "available_powers",
    "phi_value",
    "phi_table",
]


class InvalidInputError(ValueError):
    """Raised when an argument violates a documented precondition."""


def _check_alpha(alpha: float) -> None:
    if not 0.5 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (1/2, 1), got {alpha!r}")


@dataclass(frozen=True)
class SystemParams:
    """Power coefficient, linear transmit SNR and mean channel gains."""

    alpha: float
    rho: float
    eta1: float
    eta2: float

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if not self.rho > 0:
            raise InvalidInputError(f"rho must be positive, got {self.rho!r}")
        if not (self.eta1 > 0 and self.eta2 > 0):
            raise InvalidInputError("channel means eta1, eta2 must be positive")

    @classmethod
    def from_geometry(cls, alpha: float, snr_db: float, geom: "Geometry") -> "SystemParams":
        return cls(
            alpha=alpha,
            rho=snr_from_db(snr_db),
            eta1=pathloss_mean(geom.d1, geom.d0, geom.nu),
            eta2=pathloss_mean(geom.d2, geom.d0, geom.nu),
        )

    def with_rho(self, rho: float) -> "SystemParams":
        return SystemParams(self.alpha, rho, self.eta1, self.eta2)


@dataclass(frozen=True)
class Geometry:
    """BS-to-user distances (m), reference distance (m) and path-loss exponent."""

    d1: float
    d2: float
    d0: float = 10.0
    nu: float = 2.7

    def __post_init__(self) -> None:
        if self.d1 < 0 or self.d2 < 0:
            raise InvalidInputError("distances must be non-negative")
        if not (self.d0 > 0 and self.nu > 0):
            raise InvalidInputError("d0 and nu must be positive")

    def swapped(self) -> "Geometry":
        return Geometry(self.d2, self.d1, self.d0, self.nu)


@dataclass(frozen=True)
class ThresholdPair:
    """SINR thresholds ``gamma_i = 2**R_i - 1`` with ``gamma1 >= gamma2 > 0``."""

    gamma1: float
    gamma2: float

    def __post_init__(self) -> None:
        if not self.gamma2 > 0:
            raise InvalidInputError(f"gamma2 must be positive, got {self.gamma2!r}")
        if self.gamma1 < self.gamma2:
            raise InvalidInputError(
                "gamma1 < gamma2; relabel users so the high-rate user is user 1 "
                "(see ThresholdPair.from_rates)"
            )

    @classmethod
    def from_rates(cls, r1: float, r2: float) -> "ThresholdPair":
        """Build thresholds from target rates (bits/s/Hz); requires ``r1 >= r2``."""
        return cls(sinr_threshold(r1), sinr_threshold(r2))

    @classmethod
    def from_rates_relabeled(cls, r1: float, r2: float) -> Tuple["ThresholdPair", bool]:
        """Like :meth:`from_rates` but swaps the users when ``r1 < r2``.

        Returns the thresholds and whether a swap happened.
        """
        if r1 < r2:
            return cls.from_rates(r2, r1), True
        return cls.from_rates(r1, r2), False

    def __iter__(self) -> Iterator[float]:
        yield self.gamma1
        yield self.gamma2


@dataclass(frozen=True)
class Decision:
    """Joint PA-DOS decision ``[pi, omega1, omega2]``."""

    pi: int
    omega1: int
    omega2: int

    def __post_init__(self) -> None:
        for name in ("pi", "omega1", "omega2"):
            if getattr(self, name) not in (1, 2):
                raise InvalidInputError(f"{name} must be 1 or 2, got {getattr(self, name)!r}")

    def omega(self, user: int) -> int:
        return self.omega1 if user == 1 else self.omega2

    def power_shares(self, alpha: float) -> Tuple[float, float]:
        """Fractions of the total power given to (user 1, user 2)."""
        return (alpha, 1 - alpha) if self.pi == 1 else (1 - alpha, alpha)

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.pi, self.omega1, self.omega2)

    def __str__(self) -> str:
        return f"[{self.pi},{self.omega1},{self.omega2}]"


ALL_DECISIONS: Tuple[Decision, ...] = tuple(
    Decision(p, w1, w2) for p in (1, 2) for w1 in (1, 2) for w2 in (1, 2)
)


class RegionR(str, enum.Enum):
    R0 = "R0"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R5 = "R5"


class RegionS(str, enum.Enum):
    R0 = "R0"
    S1 = "S1"
    S2 = "S2"
    S3 = "S3"


class RegionG(str, enum.Enum):
    G1 = "G1"
    G2 = "G2"
    G3 = "G3"


class Unavailable(enum.Enum):
    """Marker for a threshold whose decoding event is impossible."""

    UNAVAILABLE = "unavailable"

    def __repr__(self) -> str:
        return "UNAVAILABLE"


UNAVAILABLE = Unavailable.UNAVAILABLE

PhiEntry = Union[float, Unavailable]


def sinr_threshold(rate: float) -> float:
    """SINR needed to support ``rate`` bits/s/Hz: ``2**rate - 1``."""
    if rate < 0:
        raise InvalidInputError(f"rate must be non-negative, got {rate!r}")
    return math.expm1(rate * math.log(2.0))


def snr_from_db(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)


def pathloss_mean(d: float, d0: float, nu: float) -> float:
    """Mean channel gain ``(1 + d/d0)**(-nu)``."""
    if not (d0 > 0 and nu > 0):
        raise InvalidInputError("d0 and nu must be positive")
    if d < 0:
        raise InvalidInputError(f"distance must be non-negative, got {d!r}")
    return (1.0 + d / d0) ** (-nu)


def _ratios(alpha: float) -> Tuple[float, float]:
    """Limit SINRs of the first-decoded message: (alpha/(1-alpha), (1-alpha)/alpha)."""
    return alpha / (1 - alpha), (1 - alpha) / alpha


def classify_region_R(t: ThresholdPair, alpha: float) -> RegionR:
    _check_alpha(alpha)
    g1, g2 = t.gamma1, t.gamma2
    hi, lo = _ratios(alpha)
    if g2 >= hi:
        return RegionR.R0
    if g1 < lo:
        return RegionR.R1
    if g1 < hi:
        return RegionR.R2 if g2 < lo else RegionR.R4
    return RegionR.R3 if g2 < lo else RegionR.R5


def _s2_floor(g1: float, alpha: float) -> float:
    # gamma2 boundary between S2 and S3
    return (1 - alpha) * g1 / (alpha + (2 * alpha - 1) * g1)


def _s1_floor(g1: float, alpha: float) -> float:
    # gamma2 boundary between S1 and S3
    return (1 - alpha) * g1 / (1 - alpha + alpha * g1)


def classify_region_S(t: ThresholdPair, alpha: float) -> RegionS:
    if classify_region_R(t, alpha) is RegionR.R0:
        return RegionS.R0
    g1, g2 = t.gamma1, t.gamma2
    knee = alpha / (1 - alpha) - 1
    # Left of the knee the S2 floor is the smaller boundary, right of it the S1 floor.
    if g1 < knee:
        return RegionS.S2 if g2 >= _s2_floor(g1, alpha) else RegionS.S3
    return RegionS.S1 if g2 >= _s1_floor(g1, alpha) else RegionS.S3


def classify_region_G(t: ThresholdPair, alpha: float) -> RegionG:
    r = classify_region_R(t, alpha)
    if r in (RegionR.R3, RegionR.R5):
        return RegionG.G3
    if r is RegionR.R0 or classify_region_S(t, alpha) is RegionS.S2:
        return RegionG.G1
    return RegionG.G2


_ORDERS: Dict[RegionR, Tuple[FrozenSet[int], FrozenSet[int]]] = {
    RegionR.R0: (frozenset(), frozenset()),
    RegionR.R1: (frozenset({1, 2}), frozenset({1, 2})),
    RegionR.R2: (frozenset({1, 2}), frozenset({2})),
    RegionR.R3: (frozenset({2}), frozenset({2})),
    RegionR.R4: (frozenset({1}), frozenset({2})),
    RegionR.R5: (frozenset(), frozenset({2})),
}


def available_orders(pi: int, t: ThresholdPair, alpha: float) -> FrozenSet[int]:
    """Decoding orders that can succeed for either user under power allocation ``pi``."""
    if pi not in (1, 2):
        raise InvalidInputError(f"pi must be 1 or 2, got {pi!r}")
    return _ORDERS[classify_region_R(t, alpha)][pi - 1]


def available_powers(t: ThresholdPair, alpha: float) -> FrozenSet[int]:
    return frozenset(p for p in (1, 2) if available_orders(p, t, alpha))


def phi_value(user: int, pi: int, omega: int, t: ThresholdPair, alpha: float) -> float:
    """Raw threshold formula for ``rho * |h_user|^2``, without the availability gate.

    The result is only meaningful (finite and positive) when ``pi`` is an
    available power allocation and ``omega`` an available order for it.
    """
    g1, g2 = t.gamma1, t.gamma2
    a, b = alpha, 1 - alpha
    if user == 1:
        if pi == 1:
            return g1 / (a - b * g1) if omega == 1 else max(g2 / (b - a * g2), g1 / a)
        return g1 / (b - a * g1) if omega == 1 else max(g2 / (a - b * g2), g1 / b)
    if user == 2:
        if pi == 1:
            return max(g1 / (a - b * g1), g2 / b) if omega == 1 else g2 / (b - a * g2)
        return max(g1 / (b - a * g1), g2 / a) if omega == 1 else g2 / (a - b * g2)
    raise InvalidInputError(f"user must be 1 or 2, got {user!r}")


@dataclass(frozen=True)
class PhiTable:
    """The eight decoding thresholds keyed by ``(user, pi, omega)``."""

    entries: Dict[Tuple[int, int, int], PhiEntry]

    def get(self, user: int, pi: int, omega: int) -> PhiEntry:
        return self.entries[(user, pi, omega)]

    def is_available(self, user: int, pi: int, omega: int) -> bool:
        return self.entries[(user, pi, omega)] is not UNAVAILABLE

    def finite(self, user: int, pi: int, omega: int) -> float:
        """Return a threshold known to be available; raises ``KeyError`` otherwise."""
        v = self.entries[(user, pi, omega)]
        if v is UNAVAILABLE:
            raise KeyError(f"phi_{user}^{{{pi},{omega}}} is unavailable")
        return v

    def for_decision(self, user: int, d: Decision) -> PhiEntry:
        return self.entries[(user, d.pi, d.omega(user))]


def phi_table(t: ThresholdPair, alpha: float) -> PhiTable:
    _check_alpha(alpha)
    entries: Dict[Tuple[int, int, int], PhiEntry] = {}
    for pi in (1, 2):
        orders = available_orders(pi, t, alpha)
        for omega in (1, 2):
            for user in (1, 2):
                if omega in orders:
                    entries[(user, pi, omega)] = phi_value(user, pi, omega, t, alpha)
                else:
                    entries[(user, pi, omega)] = UNAVAILABLE
    return PhiTable(entries)
