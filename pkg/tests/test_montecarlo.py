import math

import numpy as np
import pytest

from noma_pados.analytics import psys_exact
from noma_pados.core import Geometry, InvalidInputError, SystemParams, ThresholdPair
from noma_pados.montecarlo import (
    GainStream,
    OutageEstimate,
    SimConfig,
    block_gains,
    block_outcomes,
    compare_strategies,
    estimate_outage,
    sample_gain,
)
from noma_pados.strategies import StrategyId

ALPHA = 0.7
T_S3 = ThresholdPair.from_rates(1.6, 0.4)


def params(db, geom=Geometry(40, 30)):
    return SystemParams.from_geometry(ALPHA, db, geom)


class TestSampling:
    def test_mean(self):
        s = GainStream(seed=5)
        x = np.array([sample_gain(1.0, s) for _ in range(1_000_000)])
        assert abs(x.mean() - 1.0) <= 0.004

    def test_scaling_on_same_stream(self):
        a = [sample_gain(1.0, GainStream(9, k)) for k in range(200)]
        b = [sample_gain(2.0, GainStream(9, k)) for k in range(200)]
        assert np.allclose(np.array(b), 2.0 * np.array(a), rtol=1e-15)

    def test_tail(self):
        h1, _ = block_gains(3, 0, 400_000, 2.0, 1.0)
        p_hat = np.mean(h1 > 2.0)
        se = math.sqrt(p_hat * (1 - p_hat) / h1.size)
        assert abs(p_hat - math.exp(-1)) < 4 * se

    def test_stream_walks_block_lanes(self):
        h1, h2 = block_gains(77, 0, 5000, 1.0, 1.0)
        s = GainStream(77)
        seq = [sample_gain(1.0, s) for _ in range(10_000)]
        assert np.array_equal(np.array(seq[0::2]), h1)
        assert np.array_equal(np.array(seq[1::2]), h2)

    def test_blocks_are_position_keyed(self):
        h1, h2 = block_gains(11, 0, 1000, 1.0, 2.0)
        g1, g2 = block_gains(11, 600, 400, 1.0, 2.0)
        assert np.array_equal(h1[600:], g1) and np.array_equal(h2[600:], g2)

    def test_rejects_bad_eta(self):
        with pytest.raises(InvalidInputError):
            sample_gain(0.0, GainStream(1))


class TestEstimates:
    def test_config_validation(self):
        with pytest.raises(InvalidInputError):
            SimConfig(0, 1, StrategyId.HUF, params(30), T_S3)
        with pytest.raises(InvalidInputError):
            SimConfig(10, -1, StrategyId.HUF, params(30), T_S3)
        with pytest.raises(ValueError):
            SimConfig(10, 1, "XYZ", params(30), T_S3)

    def test_stderr_formula(self):
        e = OutageEstimate.from_counts(30, 10, 0, 100)
        assert e.stderr_sys == pytest.approx(math.sqrt(0.3 * 0.7 / 100))
        assert e.stderr_u2 == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 2**64 - 1])
    def test_single_trial(self, seed):
        e = estimate_outage(SimConfig(1, seed, StrategyId.HUF, params(20), T_S3))
        assert e.p_sys_hat in (0.0, 1.0) and e.p_user1_hat in (0.0, 1.0)

    def test_r0_short_circuit(self):
        t = ThresholdPair.from_rates(2.0, 1.8)
        e = estimate_outage(SimConfig(1000, 4, StrategyId.CSD, params(60), t))
        assert (e.p_sys_hat, e.stderr_sys, e.p_user1_hat, e.p_user2_hat) == (1.0, 0.0, 1.0, 1.0)

    def test_deterministic_across_workers_and_chunks(self):
        sids = list(StrategyId)
        ref = compare_strategies(sids, 50_000, 123, params(30), T_S3, Geometry(40, 30))
        for workers, chunk in ((1, 7_919), (4, 4_096), (8, 50_000), (3, 1 << 18)):
            got = compare_strategies(
                sids, 50_000, 123, params(30), T_S3, Geometry(40, 30), workers=workers, chunk=chunk
            )
            assert got == ref

    def test_es_equals_huf_and_luf(self):
        est = compare_strategies(["HUF", "LUF", "ES"], 100_000, 8, params(25), T_S3)
        assert est[StrategyId.HUF].p_sys_hat == est[StrategyId.ES].p_sys_hat
        assert est[StrategyId.LUF].p_sys_hat == est[StrategyId.ES].p_sys_hat
        assert est[StrategyId.HUF].p_user1_hat == est[StrategyId.ES].p_user1_hat
        assert est[StrategyId.LUF].p_user2_hat == est[StrategyId.ES].p_user2_hat

    def test_huf_not_worse_than_baselines(self):
        geom = Geometry(40, 30)
        for rates in ((0.8, 0.4), (1.6, 0.4), (1.6, 1.2), (2.0, 1.7)):
            t = ThresholdPair.from_rates(*rates)
            est = compare_strategies(list(StrategyId), 50_000, 6, params(30), t, geom)
            huf = est[StrategyId.HUF].p_sys_hat
            for s in (StrategyId.CSD, StrategyId.CMD, StrategyId.DD, StrategyId.SPD):
                assert huf <= est[s].p_sys_hat
            for u in (1, 2):
                assert all(est[StrategyId.ES].user(u)[0] <= e.user(u)[0] for e in est.values())

    def test_block_outcomes_shapes(self):
        h1, h2 = block_gains(1, 0, 10, 1.0, 1.0)
        for s in StrategyId:
            out = block_outcomes(s, h1, h2, T_S3, params(30), Geometry(40, 30))
            assert all(o.shape == (10,) and o.dtype == bool for o in out)

    def test_statistical_consistency_over_seeds(self):
        """|p_hat - p| <= 3 stderr for at least 99% of (seed, SNR) points."""
        t = ThresholdPair.from_rates(0.8, 0.4)
        geom = Geometry(40, 40)
        hits = total = 0
        for seed in range(20):
            for db in (15, 20, 25, 30, 35):
                p = SystemParams.from_geometry(ALPHA, db, geom)
                exact = psys_exact(t, p)
                e = estimate_outage(SimConfig(100_000, seed, StrategyId.HUF, p, t))
                se = math.sqrt(exact * (1 - exact) / e.trials)
                hits += abs(e.p_sys_hat - exact) <= 3 * se
                total += 1
        assert hits >= 0.99 * total
