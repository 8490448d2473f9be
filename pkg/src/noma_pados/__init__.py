"""Outage-optimal power allocation and decoding order selection for
two-user downlink NOMA with fixed power coefficients."""

from .core import (
    ALL_DECISIONS,
    UNAVAILABLE,
    Decision,
    Geometry,
    InvalidInputError,
    PhiTable,
    RegionG,
    RegionR,
    RegionS,
    SystemParams,
    ThresholdPair,
    available_orders,
    available_powers,
    classify_region_G,
    classify_region_R,
    classify_region_S,
    pathloss_mean,
    phi_table,
    sinr_threshold,
    snr_from_db,
)
from .strategies import ChannelDraw, InevitableOutageError, StrategyId

__version__ = "0.1.0"
