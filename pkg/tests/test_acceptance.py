"""Acceptance checks, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the verdict lines bypass
output capture), or directly as ``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from noma_pados.analytics import (
    coding_gain,
    psys_exact,
    user_outage_asymptotic,
    user_outage_exact,
)
from noma_pados.core import (
    Geometry,
    RegionS,
    SystemParams,
    ThresholdPair,
    classify_region_S,
    phi_table,
)
from noma_pados.montecarlo import (
    SimConfig,
    block_gains,
    block_outcomes,
    compare_strategies,
    estimate_outage,
)
from noma_pados.strategies import StrategyId

ALPHA = 0.7
AVA_PAIRS = [(0.8, 0.4), (1.6, 0.4), (1.6, 1.2)]


@pytest.fixture
def verdict(capsys):
    def report(number, title, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}]"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return report


def params(db, geom):
    return SystemParams.from_geometry(ALPHA, db, geom)


def test_criterion_1_closed_form_matches_simulation(verdict):
    geom = Geometry(40, 40)
    n = 10**6
    start = time.perf_counter()
    worst = 0.0
    lines = []
    for pair in AVA_PAIRS:
        t = ThresholdPair.from_rates(*pair)
        for db in (10, 20, 30, 40):
            p = params(db, geom)
            exact = psys_exact(t, p)
            est = estimate_outage(SimConfig(n, 1000 + db, StrategyId.HUF, p, t))
            # standard error of the estimator at the closed-form probability;
            # the plug-in value is 0 when every block is an outage
            se = math.sqrt(exact * (1.0 - exact) / n)
            z = abs(est.p_sys_hat - exact) / se if se > 0 else (0.0 if est.p_sys_hat == exact else math.inf)
            worst = max(worst, z)
            lines.append(f"{pair}@{db}dB z={z:.2f}")
    elapsed = time.perf_counter() - start
    verdict(
        1,
        "HUF Monte Carlo within 3 stderr of the exact system outage",
        worst <= 3.0 and elapsed <= 60.0,
        f"max |z|={worst:.2f}, {elapsed:.1f}s; " + ", ".join(lines),
    )


def _per_block(strategy, rates, db, geom, n, seed):
    t = ThresholdPair.from_rates(*rates)
    p = params(db, geom)
    h1, h2 = block_gains(seed, 0, n, p.eta1, p.eta2)
    return block_outcomes(strategy, h1, h2, t, p, geom)


def test_criterion_2_huf_luf_es_identical_per_block(verdict):
    geom = Geometry(40, 30)
    mismatches = blocks = 0
    for rates in AVA_PAIRS + [(2.0, 1.7)]:
        for db in (10, 20, 30, 40):
            es = _per_block("ES", rates, db, geom, 10**5, 42)[0]
            for s in ("HUF", "LUF"):
                mismatches += int(np.count_nonzero(_per_block(s, rates, db, geom, 10**5, 42)[0] != es))
            blocks += 10**5
    verdict(
        2,
        "HUF, LUF and ES system outage agree on every block",
        mismatches == 0,
        f"{mismatches} mismatches over {blocks} blocks x 2 strategies",
    )


def test_criterion_3_user_optimality_per_block(verdict):
    geom = Geometry(40, 30)
    mismatches = 0
    for rates in AVA_PAIRS:
        for db in (10, 20, 30, 40):
            _, es1, es2 = _per_block("ES", rates, db, geom, 10**5, 43)
            _, huf1, _ = _per_block("HUF", rates, db, geom, 10**5, 43)
            _, _, luf2 = _per_block("LUF", rates, db, geom, 10**5, 43)
            mismatches += int(np.count_nonzero(huf1 != es1) + np.count_nonzero(luf2 != es2))
    verdict(
        3,
        "HUF user-1 and LUF user-2 outage equal the per-user exhaustive search",
        mismatches == 0,
        f"{mismatches} mismatches",
    )


def test_criterion_4_r0_outage_is_certain(verdict):
    geom = Geometry(40, 30)
    t = ThresholdPair.from_rates(2.0, 1.8)
    values = []
    for db in (0, 30, 60, 90):
        p = params(db, geom)
        est = compare_strategies(list(StrategyId), 10**5, 4, p, t, geom)
        for e in est.values():
            values += [e.p_sys_hat, e.p_user1_hat, e.p_user2_hat]
        # and without the short cut: evaluate every block explicitly
        h1, h2 = block_gains(4, 0, 10**5, p.eta1, p.eta2)
        for s in StrategyId:
            values += [float(np.mean(o)) for o in block_outcomes(s, h1, h2, t, p, geom)]
        u = user_outage_exact(t, p)
        values += [psys_exact(t, p), *u.huf, *u.luf]
    verdict(
        4,
        "rate pair (2, 1.8) gives outage probability exactly 1 everywhere",
        all(v == 1.0 for v in values),
        f"{len(values)} probabilities, min={min(values)}",
    )


def test_criterion_5_csd_floor_and_huf_decay(verdict):
    geom = Geometry(40, 30)
    t = ThresholdPair.from_rates(2.0, 1.7)
    floor = 5**2.7 / (5**2.7 + 4**2.7)
    csd = estimate_outage(SimConfig(10**6, 55, StrategyId.CSD, params(60, geom), t, geom)).p_sys_hat
    huf60 = estimate_outage(SimConfig(10**6, 56, StrategyId.HUF, params(60, geom), t)).p_sys_hat
    huf57 = estimate_outage(SimConfig(10**6, 57, StrategyId.HUF, params(57, geom), t)).p_sys_hat
    rel = abs(csd - floor) / floor
    ratio = huf57 / huf60
    verdict(
        5,
        "CSD error floor at 60 dB and 1/rho decay of HUF",
        rel <= 0.02 and abs(ratio - 2.0) <= 0.2,
        f"CSD={csd:.5f} floor={floor:.5f} rel={rel:.4f}; HUF57/HUF60={ratio:.3f}",
    )


def test_criterion_6_coding_gain(verdict):
    geom = Geometry(40, 30)
    t = ThresholdPair.from_rates(1.6, 1.2)
    p = params(50, geom)
    est = compare_strategies(["HUF", "CSD"], 10**7, 66, p, t, geom)
    measured = 10 * math.log10(est[StrategyId.CSD].p_sys_hat / est[StrategyId.HUF].p_sys_hat)
    gain = coding_gain(t, p)
    verdict(
        6,
        "measured CSD/HUF gap at 50 dB matches theta",
        gain.theta_db is not None and abs(measured - gain.theta_db) <= 0.3,
        f"measured={measured:.3f} dB theta={gain.theta_db:.3f} dB",
    )


def test_criterion_7_power_contradiction_vanishes(verdict):
    geom = Geometry(40, 30)
    t = ThresholdPair.from_rates(1.6, 0.4)
    u40 = user_outage_exact(t, params(40, geom))
    gap = abs(u40.huf[1] - u40.luf[1]) / u40.luf[1]
    u50 = user_outage_exact(t, params(50, geom))
    a50 = user_outage_asymptotic(t, params(50, geom))
    devs = {
        f"{name} user {i + 1}": abs(pair[i] - a50[i]) / pair[i]
        for name, pair in (("HUF", u50.huf), ("LUF", u50.luf))
        for i in (0, 1)
    }
    ok = gap <= 0.05 and all(d <= 0.02 for d in devs.values())
    verdict(
        7,
        "HUF/LUF user-2 agreement at 40 dB and user asymptotes at 50 dB",
        ok,
        f"user-2 gap at 40 dB={gap:.4f} (limit 0.05); "
        + ", ".join(f"{k} asym dev={v:.4f}" for k, v in devs.items())
        + " (limit 0.02)",
    )


def test_criterion_8_property_suites(verdict):
    import test_properties as props

    failures = []
    suites = [
        ("partition", props.test_partitions_exhaustive_and_disjoint),
        ("R0 consistency", props.test_r0_consistency),
        ("phi availability", props.test_availability_and_phi_invariants),
        ("phi orderings", props.test_threshold_orderings),
        ("max-Phi brute force", props.test_max_phi_matches_brute_force),
    ]
    for name, fn in suites:
        try:
            fn()
        except AssertionError as exc:
            failures.append(f"{name}: {exc}")
    geom = Geometry(40, 30)
    t = ThresholdPair.from_rates(1.6, 0.4)
    ref = compare_strategies(list(StrategyId), 200_000, 808, params(30, geom), t, geom, workers=1)
    for workers, chunk in ((2, 10_007), (4, 65_536), (8, 1 << 14)):
        got = compare_strategies(
            list(StrategyId), 200_000, 808, params(30, geom), t, geom, workers=workers, chunk=chunk
        )
        if got != ref:
            failures.append(f"determinism with {workers} workers")
    verdict(
        8,
        "partition, phi, max-Phi and determinism property suites",
        not failures,
        "; ".join(failures) or "zero violations",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
