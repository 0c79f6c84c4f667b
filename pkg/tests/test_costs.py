import numpy as np
import pytest

from xlmimo.config import SystemConfig, derive_frame
from xlmimo.costs import (energy_efficiency, flops_channel_estimation,
                          flops_total, gflops_rounded, power_circuit,
                          power_report, power_transmit, round_half_up)

# reference complexity table: (M, N, K) -> Gflop/s per processing variant
TABLE3 = {
    (32, 4, 2): {"noas_mr": 4, "as_mr": 1, "noas_zf": 4, "as_zf": 1},
    (128, 16, 8): {"noas_mr": 62, "as_mr": 12, "noas_zf": 76, "as_zf": 14},
    (512, 64, 32): {"noas_mr": 990, "as_mr": 369, "noas_zf": 3848,
                    "as_zf": 819},
    (2048, 256, 128): {"noas_mr": 15834, "as_mr": 17551, "noas_zf": 702031,
                       "as_zf": 126822},
}


def _frame_for(M, K):
    return derive_frame(SystemConfig(M=M, K=K))


def test_estimation_flops_examples():
    assert flops_channel_estimation(100, 4, 4) == 4800
    assert flops_channel_estimation(100, 0, 0) == 0
    assert flops_channel_estimation(32, 2, 2) == 384


@pytest.mark.parametrize("scenario", sorted(TABLE3))
def test_reference_table_cells(scenario):
    M, N, K = scenario
    frame = _frame_for(M, K)
    cfg = SystemConfig()
    for scheme in ("mr", "zf"):
        for as_enabled, label in ((False, "noas"), (True, "as")):
            rep = flops_total(M, N, K, frame, scheme, as_enabled, cfg.B)
            assert gflops_rounded(rep) == TABLE3[scenario][f"{label}_{scheme}"]


def test_selection_overhead_can_exceed_full_array_mr():
    M, N, K = 2048, 256, 128
    frame = _frame_for(M, K)
    on = flops_total(M, N, K, frame, "mr", True, 20e6)
    off = flops_total(M, N, K, frame, "mr", False, 20e6)
    assert on.flops_per_second > off.flops_per_second


def test_no_selection_equals_full_selection_minus_scoring():
    frame = _frame_for(100, 4)
    for scheme in ("mr", "zf"):
        on = flops_total(100, 100, 4, frame, scheme, True, 20e6)
        off = flops_total(100, 17, 4, frame, scheme, False, 20e6)
        assert off.c_theta == 0.0
        assert off.c_tsp == pytest.approx(on.c_tsp - on.c_theta, rel=1e-12)


def test_ledger_monotone_in_dimensions(rng):
    for _ in range(30):
        M = int(rng.integers(20, 200))
        K = int(rng.integers(1, 8))
        n = int(rng.integers(K, M // 2))
        frame = _frame_for(M, K)
        for scheme in ("mr", "zf"):
            base = flops_total(M, n, K, frame, scheme, True, 20e6)
            more_n = flops_total(M, n + 1, K, frame, scheme, True, 20e6)
            more_m = flops_total(M + 8, n, K, _frame_for(M + 8, K), scheme,
                                 True, 20e6)
            assert more_n.c_tsp >= base.c_tsp
            assert more_m.c_tsp + more_m.c_ce >= base.c_tsp + base.c_ce


def test_rounding_half_up():
    assert round_half_up(0.5502) == 1
    assert round_half_up(0.4999) == 0
    assert round_half_up(2.5) == 3
    assert round_half_up(369.48) == 369


def test_transmit_power_hand_value():
    cfg = SystemConfig()
    frame = derive_frame(cfg)
    p_tr, p_ul, p_dl = power_transmit(frame, cfg)
    assert p_tr == pytest.approx(0.016, rel=1e-12)
    assert p_ul == pytest.approx(78.4 / 200 / 0.5 * 4 * 0.1, rel=1e-12)
    assert p_dl == pytest.approx(117.6 / 200 / 0.4 * 1.0, rel=1e-12)


def test_transmit_power_zero_pilot():
    cfg = SystemConfig(p_p=0.0)    # unvalidated on purpose
    p_tr, _, _ = power_transmit(derive_frame(cfg), cfg)
    assert p_tr == 0.0


def test_dl_transmit_power_independent_of_k():
    a = power_transmit(derive_frame(SystemConfig(K=4)), SystemConfig(K=4))
    b = power_transmit(derive_frame(SystemConfig(K=40)), SystemConfig(K=40))
    assert a[2] == pytest.approx(b[2] * (117.6 / 200) / (96 / 200), rel=1e-9)
    # total DL amplifier input is P_dl_total / eta_dl scaled by the DL share
    cfg = SystemConfig(K=4)
    frame = derive_frame(cfg)
    assert a[2] == pytest.approx(frame.tau_d / frame.tau_c / cfg.eta_dl,
                                 rel=1e-12)


def test_circuit_power_hand_values():
    cfg = SystemConfig()
    frame = derive_frame(cfg)
    rep = flops_total(100, 4, 4, frame, "mr", True, cfg.B)
    circ = power_circuit(rep, n_act=0, se=0.0, cfg=cfg, frame=frame)
    assert circ["p_ce"] == pytest.approx(1e5 * 4800 / 75e9, rel=1e-12)
    assert circ["p_ce"] == pytest.approx(6.4e-3, rel=1e-12)
    assert circ["p_cd"] == 0.0 and circ["p_bh"] == 0.0
    # transceiver power grows by one antenna's share
    c0 = power_circuit(rep, n_act=10, se=1.0, cfg=cfg, frame=frame)
    c1 = power_circuit(rep, n_act=11, se=1.0, cfg=cfg, frame=frame)
    assert c1["p_tc"] - c0["p_tc"] == pytest.approx(0.2, rel=1e-12)
    assert c0["p_tc"] == pytest.approx(0.2 + 10 * 0.2 + 4 * 0.2, rel=1e-12)


def test_circuit_power_rate_terms_scale_with_se():
    cfg = SystemConfig()
    frame = derive_frame(cfg)
    rep = flops_total(100, 4, 4, frame, "mr", True, cfg.B)
    c = power_circuit(rep, n_act=4, se=10.0, cfg=cfg, frame=frame)
    assert c["p_cd"] == pytest.approx(cfg.B * 10.0 * 9e-10, rel=1e-12)
    assert c["p_bh"] == pytest.approx(cfg.B * 10.0 * 2.5e-10, rel=1e-12)


def test_energy_efficiency_basics():
    assert energy_efficiency(0.0, 10.0, 20e6) == 0.0
    assert energy_efficiency(5.0, 10.0, 20e6) == \
        pytest.approx(2 * energy_efficiency(5.0, 20.0, 20e6), rel=1e-12)
    with pytest.raises(ValueError):
        energy_efficiency(1.0, 0.0, 20e6)


def test_power_report_total_and_ee():
    cfg = SystemConfig()
    frame = derive_frame(cfg)
    rep = flops_total(100, 6, 4, frame, "zf", True, cfg.B)
    power = power_report(rep, n_act=20, se=40.0, cfg=cfg, frame=frame)
    total = (power.p_tx_tr + power.p_tx_ul + power.p_tx_dl + power.p_cp)
    assert power.p_total == pytest.approx(total, rel=1e-12)
    assert power.p_cp == pytest.approx(
        power.p_fix + power.p_tc + power.p_ce + power.p_cd + power.p_bh +
        power.p_sp, rel=1e-12)
    assert power.ee == pytest.approx(cfg.B * 40.0 / power.p_total, rel=1e-12)
