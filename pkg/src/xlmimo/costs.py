"""Analytic flop-count and power-consumption ledgers and energy efficiency.

Flop counts are per coherence block (fpcb): complex multiplications count
3 flops, complex divisions 7 flops. The ledger follows the analytic
per-operation formulas rather than instrumenting actual arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import FrameStructure, SystemConfig
from .selection import SCHEME_ZF, SCHEMES


@dataclass(frozen=True)
class ComplexityReport:
    c_ce: float       # channel estimation [fpcb]
    c_comb: float     # combining matrix computation [fpcb]
    c_prec: float     # precoder normalization [fpcb]
    c_rxtx: float     # per-sample receive/transmit processing [fpcb]
    c_theta: float    # per-antenna scoring [fpcb], zero without selection
    c_tsp: float      # total signal processing [fpcb]
    flops_per_second: float   # B * (c_ce + c_tsp) / tau_c


@dataclass(frozen=True)
class PowerReport:
    p_tx_tr: float    # pilot-phase amplifier power [W]
    p_tx_ul: float    # UL data amplifier power [W]
    p_tx_dl: float    # DL data amplifier power [W]
    p_fix: float
    p_tc: float       # transceiver chains
    p_ce: float       # channel estimation compute
    p_sp: float       # signal processing compute
    p_cd: float       # coding + decoding
    p_bh: float       # load-dependent backhaul
    p_cp: float       # total circuit power
    p_total: float
    ee: float         # bits per joule


def flops_channel_estimation(M: int, K: int, tau_p: float) -> float:
    """Pilot correlation cost: 3 * M * K * tau_p fpcb."""
    return 3.0 * M * K * tau_p


def flops_combining(K: int, n: int, scheme: str) -> float:
    """Combining matrix cost. MR is one normalizing division per user;
    ZF forms the Gram, factors it and back-substitutes per user."""
    if scheme == SCHEME_ZF:
        return K ** 4 + 1.5 * K ** 3 * n + 4.5 * K ** 2 * n + 6.0 * K ** 2
    return 7.0 * K


def flops_precoding(K: int, n: int) -> float:
    return 4.0 * K * n


def flops_rxtx(K: int, n: int, tau_u: float, tau_d: float) -> float:
    return 3.0 * (tau_u + tau_d) * K * n


def flops_scoring(M: int, K: int) -> float:
    """Per-antenna score cost, 2(K+1)MK fpcb (the form the reference
    scenario table is consistent with)."""
    return 2.0 * (K + 1) * M * K


def flops_total(M: int, n: int, K: int, frame: FrameStructure, scheme: str,
                as_enabled: bool, bandwidth: float) -> ComplexityReport:
    """Full ledger for one operating point.

    Without antenna selection all M antennas serve every user (n := M) and
    the scoring term vanishes.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if n > M:
        raise ValueError(f"n={n} exceeds M={M}")
    n_eff = n if as_enabled else M
    c_ce = flops_channel_estimation(M, K, frame.tau_p)
    c_comb = flops_combining(K, n_eff, scheme)
    c_prec = flops_precoding(K, n_eff)
    c_rxtx = flops_rxtx(K, n_eff, frame.tau_u, frame.tau_d)
    c_theta = flops_scoring(M, K) if as_enabled else 0.0
    c_tsp = c_comb + c_prec + c_rxtx + c_theta
    fps = bandwidth * (c_ce + c_tsp) / frame.tau_c
    return ComplexityReport(c_ce=c_ce, c_comb=c_comb, c_prec=c_prec,
                            c_rxtx=c_rxtx, c_theta=c_theta, c_tsp=c_tsp,
                            flops_per_second=fps)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def gflops_rounded(report: ComplexityReport) -> int:
    """Gflop/s rounded half-up, the table presentation unit."""
    return round_half_up(report.flops_per_second / 1e9)


def power_transmit(frame: FrameStructure, cfg: SystemConfig):
    """Amplifier power of the pilot, UL data and DL data phases [W]."""
    p_tx_tr = frame.tau_p / frame.tau_c / cfg.eta_ul * cfg.K * cfg.p_p
    p_tx_ul = frame.tau_u / frame.tau_c / cfg.eta_ul * cfg.K * cfg.p_ul
    p_tx_dl = frame.tau_d / frame.tau_c / cfg.eta_dl * cfg.P_dl_total
    return p_tx_tr, p_tx_ul, p_tx_dl


def power_circuit(report: ComplexityReport, n_act: int, se: float,
                  cfg: SystemConfig, frame: FrameStructure) -> dict:
    """Circuit power terms [W] for one operating point."""
    p_tc = cfg.P_LO + n_act * cfg.P_BS_ant + cfg.K * cfg.P_UE
    p_ce = cfg.B * report.c_ce / (frame.tau_c * cfg.L_BS)
    p_sp = cfg.B * report.c_tsp / (frame.tau_c * cfg.L_BS)
    p_cd = cfg.B * se * (cfg.P_cod + cfg.P_dec)
    p_bh = cfg.B * se * cfg.P_bt
    p_cp = cfg.P_FIX + p_tc + p_ce + p_cd + p_bh + p_sp
    return dict(p_fix=cfg.P_FIX, p_tc=p_tc, p_ce=p_ce, p_sp=p_sp,
                p_cd=p_cd, p_bh=p_bh, p_cp=p_cp)


def energy_efficiency(se: float, p_total: float, bandwidth: float) -> float:
    """Throughput per watt, bits per joule."""
    if p_total <= 0:
        raise ValueError("total power must be positive")
    return bandwidth * se / p_total


def power_report(report: ComplexityReport, n_act: int, se: float,
                 cfg: SystemConfig, frame: FrameStructure) -> PowerReport:
    """Assemble the full power ledger and the resulting energy efficiency."""
    p_tx_tr, p_tx_ul, p_tx_dl = power_transmit(frame, cfg)
    circ = power_circuit(report, n_act, se, cfg, frame)
    p_total = p_tx_ul + p_tx_dl + p_tx_tr + circ["p_cp"]
    return PowerReport(p_tx_tr=p_tx_tr, p_tx_ul=p_tx_ul, p_tx_dl=p_tx_dl,
                       p_total=p_total,
                       ee=energy_efficiency(se, p_total, cfg.B), **circ)
