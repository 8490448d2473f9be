"""Seeded Monte Carlo estimation of system and user outage.

Every transmission block ``t`` draws its two channel gains from a
counter-based generator keyed by ``(seed, t)``: block ``t`` uses the
Philox4x64 output block at counter ``t``, lane 0 for user 1 and lane 1 for
user 2.  Block ``t`` therefore sees the same gains no matter how the trials
are chunked or how many workers run them, and any two runs that share a
seed share their channel realizations (common random numbers).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    Geometry,
    InvalidInputError,
    SystemParams,
    ThresholdPair,
    available_powers,
    phi_table,
)
from .strategies import (
    StrategyId,
    decide_many,
    decode_success_many,
    es_system_outage_many,
    es_user_outage_many,
)

__all__ = [
    "SimConfig",
    "OutageEstimate",
    "GainStream",
    "block_uniforms",
    "block_gains",
    "sample_gain",
    "block_outcomes",
    "estimate_outage",
    "compare_strategies",
    "DEFAULT_CHUNK",
]

DEFAULT_CHUNK = 1 << 18
_SEED_MASK = (1 << 64) - 1
_TO_UNIT = 2.0**-53


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    strategy: StrategyId
    params: SystemParams
    thresholds: ThresholdPair
    # Needed only by the distance-ordered (DD) baseline.
    geometry: Optional[Geometry] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidInputError(f"trials must be >= 1, got {self.trials!r}")
        if not 0 <= self.seed <= _SEED_MASK:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "strategy", StrategyId(self.strategy))


@dataclass(frozen=True)
class OutageEstimate:
    p_sys_hat: float
    p_user1_hat: float
    p_user2_hat: float
    stderr_sys: float
    stderr_u1: float
    stderr_u2: float
    trials: int

    @classmethod
    def from_counts(cls, n_sys: int, n_u1: int, n_u2: int, trials: int) -> "OutageEstimate":
        ps, p1, p2 = n_sys / trials, n_u1 / trials, n_u2 / trials
        return cls(ps, p1, p2, _stderr(ps, trials), _stderr(p1, trials), _stderr(p2, trials), trials)

    @classmethod
    def certain(cls, trials: int) -> "OutageEstimate":
        return cls(1.0, 1.0, 1.0, 0.0, 0.0, 0.0, trials)

    def user(self, i: int) -> Tuple[float, float]:
        """``(estimate, stderr)`` for user ``i``."""
        return (self.p_user1_hat, self.stderr_u1) if i == 1 else (self.p_user2_hat, self.stderr_u2)


def _stderr(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


def block_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for blocks ``start .. start+count-1``, shape ``(count, 2)``."""
    if count <= 0:
        return np.empty((0, 2))
    bg = np.random.Philox(key=seed & _SEED_MASK, counter=start)
    raw = bg.random_raw(4 * count).reshape(count, 4)[:, :2]
    return (raw >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def block_gains(
    seed: int, start: int, count: int, eta1: float, eta2: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Exponential channel gains ``(|h1|^2, |h2|^2)`` by inverse CDF."""
    u = block_uniforms(seed, start, count)
    return -eta1 * np.log1p(-u[:, 0]), -eta2 * np.log1p(-u[:, 1])


@dataclass
class GainStream:
    """Sequential view of the keyed generator.

    Successive draws walk the lanes of block 0, then block 1, and so on, so a
    fresh stream alternately reproduces the user-1 and user-2 draws that
    :func:`block_gains` assigns to each block.
    """

    seed: int
    position: int = 0
    _buf: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    _buf_start: int = field(default=0, repr=False)

    _BATCH = 4096

    def next_uniform(self) -> float:
        block, lane = divmod(self.position, 2)
        offset = block - self._buf_start
        if not 0 <= offset < len(self._buf):
            self._buf = block_uniforms(self.seed, block, self._BATCH)
            self._buf_start = block
            offset = 0
        self.position += 1
        return float(self._buf[offset, lane])


def sample_gain(eta: float, stream: GainStream) -> float:
    """One exponential variate with mean ``eta``; advances ``stream``."""
    if not eta > 0:
        raise InvalidInputError(f"eta must be positive, got {eta!r}")
    # numpy's log1p, so scalar draws are bit-identical to block_gains
    return float(-eta * np.log1p(-np.float64(stream.next_uniform())))


def block_outcomes(
    strategy: StrategyId,
    h1sq: np.ndarray,
    h2sq: np.ndarray,
    t: ThresholdPair,
    params: SystemParams,
    geom: Optional[Geometry] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block outage indicators ``(system, user1, user2)``.

    For ``ES`` each indicator is the exhaustive-search oracle for that
    metric.  In R0, HUF and LUF have no decision to make and every block is
    an outage; baselines and ES are still evaluated block by block.
    """
    strategy = StrategyId(strategy)
    phis = phi_table(t, params.alpha)
    rho = params.rho
    if strategy is StrategyId.ES:
        return (
            es_system_outage_many(h1sq, h2sq, rho, phis),
            es_user_outage_many(1, h1sq, rho, phis),
            es_user_outage_many(2, h2sq, rho, phis),
        )
    if strategy in (StrategyId.HUF, StrategyId.LUF) and not available_powers(t, params.alpha):
        ones = np.ones(np.shape(h1sq), dtype=bool)
        return ones, ones.copy(), ones.copy()
    pi, w1, w2 = decide_many(strategy, h1sq, h2sq, t, params, phis, geom)
    ok1 = decode_success_many(1, pi, w1, h1sq, rho, phis)
    ok2 = decode_success_many(2, pi, w2, h2sq, rho, phis)
    return ~(ok1 & ok2), ~ok1, ~ok2


def _chunks(trials: int, chunk: int) -> List[Tuple[int, int]]:
    return [(s, min(chunk, trials - s)) for s in range(0, trials, chunk)]


def compare_strategies(
    strategies: Iterable[StrategyId],
    trials: int,
    seed: int,
    params: SystemParams,
    thresholds: ThresholdPair,
    geometry: Optional[Geometry] = None,
    workers: int = 1,
    chunk: int = DEFAULT_CHUNK,
) -> Dict[StrategyId, OutageEstimate]:
    """Estimate several strategies on one shared stream of channel realizations."""
    sids: Sequence[StrategyId] = [StrategyId(s) for s in strategies]
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials!r}")
    if not sids:
        return {}
    if not available_powers(thresholds, params.alpha):
        return {s: OutageEstimate.certain(trials) for s in sids}

    def run(span: Tuple[int, int]) -> np.ndarray:
        start, n = span
        h1, h2 = block_gains(seed, start, n, params.eta1, params.eta2)
        counts = np.zeros((len(sids), 3), dtype=np.int64)
        for k, s in enumerate(sids):
            for j, ind in enumerate(block_outcomes(s, h1, h2, thresholds, params, geometry)):
                counts[k, j] = np.count_nonzero(ind)
        return counts

    spans = _chunks(trials, chunk)
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    else:
        parts = [run(s) for s in spans]
    # Integer counts: the reduction is exact and order-independent.
    total = np.sum(parts, axis=0)
    return {
        s: OutageEstimate.from_counts(int(c[0]), int(c[1]), int(c[2]), trials)
        for s, c in zip(sids, total)
    }


def estimate_outage(
    cfg: SimConfig, workers: int = 1, chunk: int = DEFAULT_CHUNK
) -> OutageEstimate:
    return compare_strategies(
        [cfg.strategy],
        cfg.trials,
        cfg.seed,
        cfg.params,
        cfg.thresholds,
        cfg.geometry,
        workers=workers,
        chunk=chunk,
    )[cfg.strategy]
