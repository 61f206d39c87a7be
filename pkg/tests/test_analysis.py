"""Optimizers, frontier search, conversions and the sweep engine."""


import numpy as np
import pytest

from cvqkd import analysis as an
from cvqkd import protocols as pr
from cvqkd.errors import DomainError

CFG = pr.PurificationConfig()


def coh(v_m, dv=0.0, nd=0.0, beta=1.0, direction=pr.RR):
    return pr.ProtocolParams(pr.COHERENT, 1.0, v_m, dv, nd, beta, direction)


class TestConversions:
    def test_unity_transmittance(self):
        assert an.loss_distance_convert(1.0, "eta", "db") == 0.0
        assert an.loss_distance_convert(1.0, "eta", "km") == 0.0

    def test_twenty_kilometers(self):
        assert an.loss_distance_convert(20.0, "km", "db") == pytest.approx(4.0)
        assert an.loss_distance_convert(20.0, "km", "eta") == pytest.approx(
            10 ** -0.4, rel=1e-12)

    def test_round_trip(self):
        for eta in (1.0, 0.5, 0.123):
            km = an.loss_distance_convert(eta, "eta", "km")
            assert an.loss_distance_convert(km, "km", "eta") == pytest.approx(
                eta, abs=1e-12)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            an.loss_distance_convert(0.0, "eta", "db")
        with pytest.raises(DomainError):
            an.loss_distance_convert(-1.0, "db", "eta")
        with pytest.raises(DomainError):
            an.loss_distance_convert(1.0, "eta", "miles")


class TestOptimizeModulation:
    def test_monotone_rate_returns_upper_bound(self):
        # beta = 1 without noise: K grows with modulation
        v_m, k = an.optimize_modulation(coh(1.0), pr.ChannelParams(0.4, 0.0), CFG)
        assert v_m == pytest.approx(1e4, rel=1e-3)
        assert k > 0

    def test_finite_interior_optimum_with_imperfect_reconciliation(self):
        p = coh(1.0, beta=0.95)
        c = pr.ChannelParams(0.1, 0.0)
        v_m, k = an.optimize_modulation(p, c, CFG)
        assert 1.0 < v_m < 1e3
        grid = np.logspace(-3, 4, 100)
        ks = [pr.key_rate(pr.with_params(p, v_m=v), c, CFG).k for v in grid]
        assert k >= max(ks) - 1e-9

    def test_idempotence(self):
        p = coh(1.0, beta=0.95)
        c = pr.ChannelParams(0.1, 0.0)
        v_m, k1 = an.optimize_modulation(p, c, CFG)
        _, k2 = an.optimize_modulation(pr.with_params(p, v_m=v_m), c, CFG)
        assert k2 == pytest.approx(k1, abs=1e-8)

    def test_bad_bounds_rejected(self):
        with pytest.raises(DomainError):
            an.optimize_modulation(coh(1.0), pr.ChannelParams(0.5), CFG,
                                   bounds=(1.0, 0.1))


class TestOptimizeTrustedNoise:
    def test_direction_pairing_enforced(self):
        c = pr.ChannelParams(0.5, 0.0)
        with pytest.raises(DomainError):
            an.optimize_trusted_noise(coh(1e6, direction=pr.RR), c, CFG, which="delta_v")
        with pytest.raises(DomainError):
            an.optimize_trusted_noise(coh(1e6, direction=pr.DR), c, CFG, which="n")

    def test_quiet_channel_needs_no_noise(self):
        p = coh(1e6, direction=pr.DR)
        noise, _ = an.optimize_trusted_noise(p, pr.ChannelParams(0.6, 0.01), CFG,
                                             which="delta_v")
        assert noise == 0.0

    def test_noisy_channel_benefits_from_preparation_noise(self):
        p = coh(1e6, direction=pr.DR)
        c = pr.ChannelParams(0.6, 0.15)
        noise, k = an.optimize_trusted_noise(p, c, CFG, which="delta_v")
        assert k >= pr.key_rate(p, c, CFG).k

    def test_detection_noise_can_restore_security(self):
        p = coh(1e6, direction=pr.RR)
        c = pr.ChannelParams(0.1, 0.18)
        k0 = pr.key_rate(p, c, CFG).k
        noise, k = an.optimize_trusted_noise(p, c, CFG, which="n")
        assert k0 < 0.0
        assert noise > 0.0
        assert k > k0


class TestFrontier:
    def test_bracketing_invariant(self):
        point = an.max_tolerable_excess_noise(coh(1e6), 0.5, CFG)
        p_opt = pr.with_params(coh(1e6), v_m=point.v_m_opt,
                               delta_v=point.delta_v_opt, n_det=point.n_opt)
        below = pr.key_rate(p_opt, pr.ChannelParams(0.5, point.eps_max * (1 - 1e-3)), CFG).k
        above = pr.key_rate(p_opt, pr.ChannelParams(0.5, point.eps_max * (1 + 1e-3)), CFG).k
        assert below > 0.0
        assert above < 0.0

    def test_matches_brute_force_scan_at_high_transmittance(self):
        point = an.max_tolerable_excess_noise(coh(1e6), 0.99, CFG)
        # large compared to moderate loss, and finite (not the search ceiling)
        assert an.max_tolerable_excess_noise(coh(1e6), 0.5, CFG).eps_max < point.eps_max < 5.0
        assert "at_ceiling" not in point.flags
        grid = np.arange(0.0, 5.0, 1e-3)
        k_of = lambda e: pr.key_rate(coh(1e6), pr.ChannelParams(0.99, e), CFG).k
        brute = max(e for e in grid if k_of(e) > 0)
        assert point.eps_max == pytest.approx(brute, abs=2e-3)

    def test_dr_dies_at_three_db(self):
        point = an.max_tolerable_excess_noise(
            coh(1e6, direction=pr.DR), an.loss_distance_convert(3.2, "db", "eta"), CFG)
        assert point.eps_max == 0.0
        assert "insecure_at_zero" in point.flags

    def test_preparation_noise_shrinks_reverse_frontier(self):
        for db in (1.0, 4.0, 8.0):
            eta = an.loss_distance_convert(db, "db", "eta")
            clean = an.max_tolerable_excess_noise(coh(1e6), eta, CFG)
            noisy = an.max_tolerable_excess_noise(coh(1e6, dv=0.5), eta, CFG)
            assert noisy.eps_max < clean.eps_max

    def test_dr_frontier_zero_at_half_transmittance_for_any_trusted_noise(self):
        for eta in (0.5, 0.45):
            for dv, nd, opt in ((0.0, 0.0, ()), (0.5, 0.0, ()),
                                (0.0, 0.5, ()), (0.0, 0.0, ("delta_v",))):
                p = coh(1e6, dv=dv, nd=nd, direction=pr.DR)
                point = an.max_tolerable_excess_noise(p, eta, CFG, optimize_over=opt)
                assert point.eps_max == 0.0
                assert "insecure_at_zero" in point.flags


class TestSweep:
    def test_single_point(self):
        spec = an.SweepSpec(protocol=coh(5.0), channel=pr.ChannelParams(0.5, 0.0))
        rows = an.run_sweep(spec)
        assert len(rows) == 1
        assert rows[0]["report"].k == pytest.approx(
            pr.key_rate(coh(5.0), pr.ChannelParams(0.5, 0.0), CFG).k)

    def test_grid_order_and_parameter_echo(self):
        spec = an.SweepSpec(protocol=coh(5.0), channel=pr.ChannelParams(0.5, 0.0),
                            axes=(("delta_v", (0.0, 0.5)), ("eps", (0.0, 0.1))))
        rows = an.run_sweep(spec)
        assert [(r["delta_v"], r["eps"]) for r in rows] == [
            (0.0, 0.0), (0.0, 0.1), (0.5, 0.0), (0.5, 0.1)]
        assert rows[2]["protocol"].delta_v == 0.5

    def test_parallel_matches_serial_bitwise(self):
        spec = an.SweepSpec(protocol=coh(5.0), channel=pr.ChannelParams(0.5, 0.0),
                            axes=(("eps", tuple(np.linspace(0, 0.2, 7))),))
        serial = an.run_sweep(spec, workers=1)
        parallel = an.run_sweep(spec, workers=4)
        for a, b in zip(serial, parallel):
            assert a["report"].k == b["report"].k
            assert a["report"].chi == b["report"].chi

    def test_per_point_failures_do_not_abort(self):
        # the cloner has no dilation at eta = 1, so that point must fail alone
        spec = an.SweepSpec(protocol=coh(5.0), channel=pr.ChannelParams(0.5, 0.0),
                            axes=(("eta", (0.5, 1.0)),), method=pr.METHOD_CLONER)
        rows = an.run_sweep(spec)
        assert rows[0]["error"] is None
        assert "UnsupportedModelError" in rows[1]["error"]

    def test_axis_validation(self):
        with pytest.raises(DomainError):
            an.SweepSpec(protocol=coh(1.0), channel=pr.ChannelParams(0.5),
                         axes=(("eps", ()),))
        with pytest.raises(DomainError):
            an.SweepSpec(protocol=coh(1.0), channel=pr.ChannelParams(0.5),
                         axes=(("eps", (0.1, 0.0, 0.2)),))
        with pytest.raises(DomainError):
            an.SweepSpec(protocol=coh(1.0), channel=pr.ChannelParams(0.5),
                         axes=(("bogus", (0.0, 1.0)),))
        with pytest.raises(DomainError):
            an.SweepSpec(protocol=coh(1.0), channel=pr.ChannelParams(0.5),
                         axes=(("v_m", (1.0, 2.0)),), optimize_over=("v_m",))

    def test_frontier_objective(self):
        spec = an.SweepSpec(protocol=coh(1e6), channel=pr.ChannelParams(0.5, 0.0),
                            axes=(("loss_db", (1.0, 2.0)),), objective="frontier")
        rows = an.run_sweep(spec)
        assert len(rows) == 2
        assert rows[0]["frontier"].eps_max > rows[1]["frontier"].eps_max

    def test_distance_sweep_with_optimized_modulation_decreases(self):
        # realistic reverse-reconciliation settings over a distance axis
        p = pr.ProtocolParams(pr.SQUEEZED, 0.1, 1.0, beta=0.95, direction=pr.RR)
        spec = an.SweepSpec(protocol=p, channel=pr.ChannelParams(1.0, 0.0),
                            axes=(("distance_km", (5.0, 30.0, 60.0)),),
                            optimize_over=("v_m",))
        ks = [row["report"].k for row in an.run_sweep(spec)]
        assert all(b < a for a, b in zip(ks, ks[1:]))
        assert ks[0] > 0.0


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("CVQKD_THREADS", "3")
    assert an.worker_count() == 3
    monkeypatch.setenv("CVQKD_THREADS", "zebra")
    with pytest.raises(DomainError):
        an.worker_count()
