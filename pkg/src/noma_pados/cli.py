"""Command-line front end producing CSV tables.

Subcommands::

    regions      classify a triangular (gamma1, gamma2) grid
    sweep        system outage vs SNR for several strategies (MC + closed form)
    user-outage  per-user outage vs SNR (MC + closed form + exhaustive search)
    gain         coding gain over CSD on a (gamma1, gamma2) or (d1, d2) grid

Options come from built-in defaults, then an optional JSON ``--config``
file, then command-line flags (flags win).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, IO, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import analytics
from .core import (
    Geometry,
    InvalidInputError,
    SystemParams,
    ThresholdPair,
    classify_region_G,
    classify_region_R,
    classify_region_S,
    sinr_threshold,
    snr_from_db,
)
from .montecarlo import compare_strategies
from .strategies import StrategyId

COMMANDS = ("regions", "sweep", "user-outage", "gain")
PAPER_RATE_PAIRS = ((0.8, 0.4), (1.6, 0.4), (1.6, 1.2), (2.0, 1.7), (2.0, 1.8))
_CLOSED_FORM = {StrategyId.HUF, StrategyId.LUF, StrategyId.CSD}


@dataclass
class RunSpec:
    command: str
    alpha: float = 0.7
    r1: float = 1.6
    r2: float = 1.2
    d1: float = 40.0
    d2: float = 30.0
    d0: float = 10.0
    nu: float = 2.7
    snr_start_db: float = 0.0
    snr_stop_db: float = 60.0
    snr_step_db: float = 5.0
    trials: int = 100_000
    seed: int = 1
    strategies: List[str] = field(
        default_factory=lambda: [s.value for s in StrategyId]
    )
    out: Optional[str] = None
    grid_points: int = 41
    gamma_max: float = 3.0
    d_min: float = 10.0
    d_max: float = 100.0
    gain_axes: str = "gamma"
    rate_pairs: List[Tuple[float, float]] = field(
        default_factory=lambda: [list(p) for p in PAPER_RATE_PAIRS]
    )
    workers: int = 1

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}")
        if not self.snr_step_db > 0:
            raise InvalidInputError("--snr-step-db must be positive")
        if self.snr_stop_db < self.snr_start_db:
            raise InvalidInputError("--snr-stop-db must not be below --snr-start-db")
        if self.trials < 1:
            raise InvalidInputError("--trials must be >= 1")
        if self.grid_points < 2:
            raise InvalidInputError("--grid-points must be >= 2")
        if self.gain_axes not in ("gamma", "distance"):
            raise InvalidInputError("--gain-axes must be 'gamma' or 'distance'")
        if self.r1 < 0 or self.r2 < 0:
            raise InvalidInputError("target rates must be non-negative")
        for s in self.strategies:
            StrategyId(s)
        Geometry(self.d1, self.d2, self.d0, self.nu)
        SystemParams(self.alpha, 1.0, 1.0, 1.0)

    def normalized(self) -> Tuple["RunSpec", bool]:
        """Copy with users relabeled so that ``r1 >= r2``, plus whether a swap happened."""
        if self.r1 >= self.r2:
            return dataclasses.replace(self), False
        return dataclasses.replace(self, r1=self.r2, r2=self.r1, d1=self.d2, d2=self.d1), True

    def canonical_json(self) -> str:
        # out/workers do not influence the table, so they stay out of the provenance line.
        data = {k: v for k, v in dataclasses.asdict(self).items() if k not in ("out", "workers")}
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    @property
    def geometry(self) -> Geometry:
        return Geometry(self.d1, self.d2, self.d0, self.nu)

    def snr_grid(self) -> List[float]:
        n = int(math.floor((self.snr_stop_db - self.snr_start_db) / self.snr_step_db + 1e-9)) + 1
        return [round(self.snr_start_db + k * self.snr_step_db, 9) for k in range(n)]


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(spec: RunSpec, header: Sequence[str], rows: Iterable[Sequence], stream: IO[str]) -> None:
    stream.write(f"# spec={spec.canonical_json()}\n")
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

REGIONS_HEADER = ("gamma1", "gamma2", "region_R", "region_S", "region_G")
SWEEP_HEADER = ("snr_db", "strategy", "p_sys_mc", "stderr", "p_sys_exact", "p_sys_asym", "relabeled")
USER_HEADER = ("snr_db", "strategy", "user", "p_mc", "stderr", "p_exact", "p_es", "relabeled")
GAIN_HEADER = ("gamma1", "gamma2", "d1", "d2", "region_G", "tag", "theta_db", "relabeled")


def _gamma_axis(spec: RunSpec) -> List[float]:
    step = spec.gamma_max / (spec.grid_points - 1)
    axis = {round(k * step, 12) for k in range(1, spec.grid_points)}
    for r1, r2 in spec.rate_pairs:
        hi, lo = max(r1, r2), min(r1, r2)
        axis.add(sinr_threshold(hi))
        axis.add(sinr_threshold(lo))
    return sorted(axis)


def run_regions(spec: RunSpec) -> Tuple[Sequence[str], List[list]]:
    """Triangular ``gamma1 >= gamma2`` grid; the axes include the marked rate pairs."""
    axis = _gamma_axis(spec)
    rows = []
    for g1 in axis:
        for g2 in axis:
            if g2 > g1:
                break
            t = ThresholdPair(g1, g2)
            rows.append([
                g1,
                g2,
                classify_region_R(t, spec.alpha).value,
                classify_region_S(t, spec.alpha).value,
                classify_region_G(t, spec.alpha).value,
            ])
    return REGIONS_HEADER, rows


def _strategies(spec: RunSpec) -> List[StrategyId]:
    return sorted({StrategyId(s) for s in spec.strategies}, key=lambda s: s.value)


def _per_snr(spec: RunSpec, sids: List[StrategyId]) -> Dict[float, Dict[StrategyId, object]]:
    t = ThresholdPair.from_rates(spec.r1, spec.r2)
    geom = spec.geometry
    run_ids = sorted(set(sids) | {StrategyId.ES}, key=lambda s: s.value)

    def point(db: float):
        params = SystemParams.from_geometry(spec.alpha, db, geom)
        est = compare_strategies(run_ids, spec.trials, spec.seed, params, t, geom)
        return db, params, est

    grid = spec.snr_grid()
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(db) for db in grid]
    return {db: (params, est) for db, params, est in results}


def run_sweep(spec: RunSpec, relabeled: bool = False) -> Tuple[Sequence[str], List[list]]:
    sids = _strategies(spec)
    if not sids:
        return SWEEP_HEADER, []
    t = ThresholdPair.from_rates(spec.r1, spec.r2)
    rows = []
    for db, (params, est) in _per_snr(spec, sids).items():
        for s in sids:
            exact = asym = None
            if s in (StrategyId.HUF, StrategyId.LUF):
                exact, asym = analytics.psys_exact(t, params), analytics.psys_asymptotic(t, params)
            elif s is StrategyId.CSD:
                exact, asym = analytics.psys_csd_exact(t, params), analytics.psys_csd_asymptotic(t, params)
            e = est[s]
            rows.append([db, s.value, e.p_sys_hat, e.stderr_sys, exact, asym, relabeled])
    rows.sort(key=lambda r: (r[0], r[1]))
    return SWEEP_HEADER, rows


def run_user_outage(spec: RunSpec, relabeled: bool = False) -> Tuple[Sequence[str], List[list]]:
    sids = _strategies(spec)
    if not sids:
        return USER_HEADER, []
    t = ThresholdPair.from_rates(spec.r1, spec.r2)
    rows = []
    for db, (params, est) in _per_snr(spec, sids).items():
        users = analytics.user_outage_exact(t, params)
        es = est[StrategyId.ES]
        for s in sids:
            for u in (1, 2):
                p, se = est[s].user(u)
                exact = None
                if s is StrategyId.HUF:
                    exact = users.huf[u - 1]
                elif s is StrategyId.LUF:
                    exact = users.luf[u - 1]
                rows.append([db, s.value, u, p, se, exact, es.user(u)[0], relabeled])
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    return USER_HEADER, rows


def _gain_row(t: ThresholdPair, spec: RunSpec, d1: float, d2: float, relabeled: bool) -> list:
    geom = Geometry(d1, d2, spec.d0, spec.nu)
    params = SystemParams.from_geometry(spec.alpha, 0.0, geom)
    g = analytics.coding_gain(t, params)
    return [t.gamma1, t.gamma2, d1, d2, g.region.value, g.kind.value, g.theta_db, relabeled]


def run_gain(spec: RunSpec, relabeled: bool = False) -> Tuple[Sequence[str], List[list]]:
    rows = []
    if spec.gain_axes == "gamma":
        axis = _gamma_axis(spec)
        for g1 in axis:
            for g2 in axis:
                if g2 > g1:
                    break
                rows.append(_gain_row(ThresholdPair(g1, g2), spec, spec.d1, spec.d2, relabeled))
    else:
        t = ThresholdPair.from_rates(spec.r1, spec.r2)
        axis = np.linspace(spec.d_min, spec.d_max, spec.grid_points)
        for d1 in axis:
            for d2 in axis:
                rows.append(_gain_row(t, spec, float(d1), float(d2), relabeled))
    return GAIN_HEADER, rows


def execute(spec: RunSpec) -> Tuple[RunSpec, Sequence[str], List[list]]:
    """Validate, relabel users if needed and build the table for ``spec.command``."""
    spec.validate()
    norm, relabeled = spec.normalized()
    if norm.command == "regions":
        header, rows = run_regions(norm)
    elif norm.command == "sweep":
        header, rows = run_sweep(norm, relabeled)
    elif norm.command == "user-outage":
        header, rows = run_user_outage(norm, relabeled)
    else:
        header, rows = run_gain(norm, relabeled)
    return norm, header, rows


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _rate_pairs(text: str) -> List[List[float]]:
    pairs = []
    for item in filter(None, (p.strip() for p in text.split(","))):
        a, b = item.split(":")
        pairs.append([float(a), float(b)])
    return pairs


def _strategy_list(text: str) -> List[str]:
    return [s.strip().upper() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noma-pados",
        description="Outage analysis of PA-DOS strategies for two-user downlink NOMA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON file with option values")
        p.add_argument("--alpha", type=float, default=S)
        p.add_argument("--r1", type=float, default=S, help="target rate of user 1 (bits/s/Hz)")
        p.add_argument("--r2", type=float, default=S, help="target rate of user 2 (bits/s/Hz)")
        p.add_argument("--d1", type=float, default=S, help="BS-user 1 distance (m)")
        p.add_argument("--d2", type=float, default=S, help="BS-user 2 distance (m)")
        p.add_argument("--d0", type=float, default=S, help="reference distance (m)")
        p.add_argument("--nu", type=float, default=S, help="path-loss exponent")
        p.add_argument("--snr-start-db", type=float, default=S)
        p.add_argument("--snr-stop-db", type=float, default=S)
        p.add_argument("--snr-step-db", type=float, default=S)
        p.add_argument("--trials", type=int, default=S)
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--strategies", type=_strategy_list, default=S,
                       help="comma-separated subset of HUF,LUF,CSD,CMD,DD,SPD,ES")
        p.add_argument("--out", default=S, help="output CSV path (default: stdout)")
        p.add_argument("--grid-points", type=int, default=S)
        p.add_argument("--gamma-max", type=float, default=S)
        p.add_argument("--d-min", type=float, default=S)
        p.add_argument("--d-max", type=float, default=S)
        p.add_argument("--gain-axes", choices=("gamma", "distance"), default=S)
        p.add_argument("--rate-pairs", type=_rate_pairs, default=S,
                       help="rate pairs to place on region grids, e.g. 0.8:0.4,1.6:0.4")
        p.add_argument("--workers", type=int, default=S)
    return parser


def spec_from_args(argv: Optional[Sequence[str]] = None) -> RunSpec:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config", None)
    values: Dict[str, object] = {}
    if config_path:
        with open(config_path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise InvalidInputError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunSpec)} - {"command"}
        for key, val in loaded.items():
            k = key.replace("-", "_")
            if k not in known:
                raise InvalidInputError(f"unknown config key {key!r}")
            values[k] = val
        if isinstance(values.get("strategies"), str):
            values["strategies"] = _strategy_list(values["strategies"])
        if isinstance(values.get("rate_pairs"), str):
            values["rate_pairs"] = _rate_pairs(values["rate_pairs"])
    values.update(args)
    return RunSpec(command=command, **values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        spec = spec_from_args(argv)
        norm, header, rows = execute(spec)
        if spec.out:
            with open(spec.out, "w", newline="") as fh:
                write_csv(norm, header, rows, fh)
        else:
            write_csv(norm, header, rows, sys.stdout)
    except (InvalidInputError, ValueError, OSError) as exc:
        print(f"noma-pados: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
