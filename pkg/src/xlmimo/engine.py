"""Seeded Monte Carlo orchestration: realizations, sweeps and the N* search.

Reproducibility contract: realization i of a run with master seed s draws
from an independent counter-based stream keyed by (s, i), and per-point
results are stored in realization order before any reduction. Outputs are
therefore identical for any worker count and for repeated runs.

Per realization the draw order is fixed: user x, user y, VR spans, VR
starts, fading real, fading imaginary, pilot noise real, pilot noise
imaginary.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .channel import ChannelRealization, draw_visibility, place_users, realize_channel
from .config import FrameStructure, SystemConfig, derive_frame, with_overrides
from .costs import ComplexityReport, flops_total, power_report
from .metrics import (RealizationMetrics, ergodic_se,
                      power_stats_from_crossgains, sinrs_from_crossgains,
                      stats_to_dbm)
from .pilots import ChannelEstimate, simulate_pilot_phase
from .selection import (SCHEME_MR, SCHEME_ZF, SCHEMES, ZF_PIVOT_RTOL,
                        ZfInfeasibleError, hrnp_scores, selection_tiebreak)

log = logging.getLogger("xlmimo")

# Per-realization result row layout.
_COLS = ("se_ul", "se_dl", "se_total", "ee", "p_total", "n_act",
         "s_ul", "i_ul", "n_ul", "s_dl", "i_dl", "n_dl", "ok")
_NCOLS = len(_COLS)
_OK = _COLS.index("ok")


@dataclass(frozen=True)
class SweepSpec:
    variable: str                 # "N" or "K"
    values: tuple                 # strictly increasing sweep values
    scheme: str = SCHEME_MR       # "mr", "zf" or "both"
    as_enabled: bool = True
    realizations: int | None = None   # default: cfg.realizations
    seed: int | None = None           # default: cfg.seed
    n_fixed: int | None = None        # antennas per user for K sweeps


@dataclass(frozen=True)
class AggregateResult:
    variable: str
    value: int
    scheme: str
    as_enabled: bool
    realizations: int
    skipped: int
    se_ul: float
    se_dl: float
    se_total: float
    throughput_bps: float
    ee: float
    p_total: float
    n_act_mean: float
    flops_per_second: float
    stats_dbm: tuple              # six Table-style received powers
    stderr: dict                  # standard errors of the stochastic means


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent counter-based stream for realization ``index``."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def generate_realization(cfg: SystemConfig, index: int,
                         seed: int | None = None
                         ) -> tuple[ChannelRealization, ChannelEstimate]:
    """Draw one seeded realization: geometry, VRs, fading and pilot phase."""
    rng = substream(cfg.seed if seed is None else seed, index)
    layout = place_users(cfg, rng)
    mask = draw_visibility(cfg, rng)
    chan = realize_channel(cfg, layout, mask, rng)
    est = simulate_pilot_phase(chan, cfg, rng)
    return chan, est


def resolve_workers(requested: int | None = None) -> int:
    """Worker count, capped by the XLMIMO_THREADS environment variable."""
    cap_env = os.environ.get("XLMIMO_THREADS")
    cap = int(cap_env) if cap_env else (os.cpu_count() or 1)
    workers = cap if requested is None else requested
    return max(1, min(workers, cap))


@dataclass(frozen=True)
class _Point:
    scheme: str
    n: int              # reported sweep value
    n_eff: int          # antennas actually selected (M when AS is off)
    as_enabled: bool
    complexity: ComplexityReport


def _make_point(cfg: SystemConfig, frame: FrameStructure, n: int, scheme: str,
                as_enabled: bool) -> _Point:
    n_eff = n if as_enabled else cfg.M
    report = flops_total(cfg.M, n, cfg.K, frame, scheme, as_enabled, cfg.B)
    return _Point(scheme=scheme, n=n, n_eff=n_eff, as_enabled=as_enabled,
                  complexity=report)


def _zf_feasible(cfg: SystemConfig, point: _Point) -> bool:
    return point.scheme != SCHEME_ZF or point.n_eff >= cfg.K


def _evaluate_point(cfg, frame, chan, est, order, point: _Point) -> np.ndarray:
    """One (realization, point) evaluation into a result row."""
    row = np.zeros(_NCOLS)
    P, vnorm2, n_act, ok = kernels.evaluate_selection(
        chan.H, est.H_hat, order, point.n_eff,
        point.scheme == SCHEME_ZF, ZF_PIVOT_RTOL)
    if not ok:
        return row
    p_dl = cfg.P_dl_total / cfg.K
    gamma_ul, gamma_dl = sinrs_from_crossgains(
        P, vnorm2, cfg.p_ul, p_dl, cfg.sigma2_ul, cfg.sigma2_dl)
    se_ul, se_dl = ergodic_se(gamma_ul, gamma_dl, frame)
    se = se_ul + se_dl
    if not point.as_enabled:
        n_act = cfg.M
    power = power_report(point.complexity, n_act, se, cfg, frame)
    stats = power_stats_from_crossgains(
        P, vnorm2, cfg.p_ul, p_dl, cfg.sigma2_ul, cfg.sigma2_dl)
    row[:6] = (se_ul, se_dl, se, power.ee, power.p_total, n_act)
    row[6:12] = stats
    row[_OK] = 1.0
    return row


def _no_as_order(cfg: SystemConfig) -> np.ndarray:
    return np.tile(np.arange(cfg.M, dtype=np.int64)[:, None], (1, cfg.K))


def _simulate_block(cfg: SystemConfig, frame: FrameStructure, points, seed,
                    i0: int, i1: int, need_order: bool) -> np.ndarray:
    rows = np.zeros((i1 - i0, len(points), _NCOLS))
    fixed_order = None if need_order else _no_as_order(cfg)
    for offset, index in enumerate(range(i0, i1)):
        chan, est = generate_realization(cfg, index, seed)
        if need_order:
            theta = hrnp_scores(est.H_hat)
            strength = selection_tiebreak(theta, est.H_hat)
            order = kernels.selection_order(theta, strength)
        else:
            order = fixed_order
        for p, point in enumerate(points):
            rows[offset, p] = _evaluate_point(cfg, frame, chan, est, order,
                                              point)
    return rows


def _run_points(cfg: SystemConfig, frame: FrameStructure, points,
                realizations: int, seed: int,
                workers: int | None = None) -> np.ndarray:
    """All (realization, point) rows, realization-ordered."""
    workers = resolve_workers(workers)
    need_order = any(p.as_enabled for p in points)
    if workers == 1 or realizations < 4 * workers:
        return _simulate_block(cfg, frame, points, seed, 0, realizations,
                               need_order)
    bounds = np.linspace(0, realizations, workers + 1, dtype=int)
    rows = np.zeros((realizations, len(points), _NCOLS))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {}
        for w in range(workers):
            i0, i1 = int(bounds[w]), int(bounds[w + 1])
            if i0 == i1:
                continue
            futures[pool.submit(_simulate_block, cfg, frame, points, seed,
                                i0, i1, need_order)] = (i0, i1)
        for fut, (i0, i1) in futures.items():
            rows[i0:i1] = fut.result()
    return rows


def _aggregate(cfg: SystemConfig, variable: str, point: _Point,
               rows: np.ndarray, realizations: int) -> AggregateResult:
    valid = rows[:, _OK] == 1.0
    skipped = int(realizations - valid.sum())
    vals = rows[valid, :12]
    if vals.shape[0] == 0:
        means = np.full(12, np.nan)
        err = np.full(12, np.nan)
        stats_dbm = tuple(np.full(6, np.nan))
    else:
        means = vals.mean(axis=0)
        if vals.shape[0] > 1:
            err = vals.std(axis=0, ddof=1) / np.sqrt(vals.shape[0])
        else:
            err = np.full(12, np.nan)
        stats_dbm = tuple(stats_to_dbm(means[6:12]))
    stderr = {name: float(err[i]) for i, name in enumerate(_COLS[:6])}
    value = point.n if variable == "N" else cfg.K
    return AggregateResult(
        variable=variable, value=value, scheme=point.scheme,
        as_enabled=point.as_enabled, realizations=realizations,
        skipped=skipped, se_ul=float(means[0]), se_dl=float(means[1]),
        se_total=float(means[2]), throughput_bps=cfg.B * float(means[2]),
        ee=float(means[3]), p_total=float(means[4]),
        n_act_mean=float(means[5]),
        flops_per_second=point.complexity.flops_per_second,
        stats_dbm=stats_dbm, stderr=stderr)


def run_realization(cfg: SystemConfig, n: int, scheme: str, as_enabled: bool,
                    index: int):
    """Full pipeline for one seeded realization.

    Returns (RealizationMetrics, PowerReport or None, ComplexityReport).
    Deterministic in (cfg.seed, index); a ZF-singular draw is returned with
    skipped=True rather than raised.
    """
    frame = derive_frame(cfg)
    point = _make_point(cfg, frame, n, scheme, as_enabled)
    if not _zf_feasible(cfg, point):
        raise ZfInfeasibleError(
            f"ZF needs n >= K={cfg.K}, got n={point.n_eff}")
    chan, est = generate_realization(cfg, index)
    if as_enabled:
        theta = hrnp_scores(est.H_hat)
        order = kernels.selection_order(theta,
                                        selection_tiebreak(theta, est.H_hat))
    else:
        order = _no_as_order(cfg)
    P, vnorm2, n_act, ok = kernels.evaluate_selection(
        chan.H, est.H_hat, order, point.n_eff, scheme == SCHEME_ZF,
        ZF_PIVOT_RTOL)
    if not ok:
        empty = np.full(cfg.K, np.nan)
        metrics = RealizationMetrics(sinr_ul=empty, sinr_dl=empty,
                                     se_ul=np.nan, se_dl=np.nan,
                                     se_total=np.nan,
                                     power_stats_linear=np.full(6, np.nan),
                                     skipped=True)
        return metrics, None, point.complexity
    p_dl = cfg.P_dl_total / cfg.K
    gamma_ul, gamma_dl = sinrs_from_crossgains(
        P, vnorm2, cfg.p_ul, p_dl, cfg.sigma2_ul, cfg.sigma2_dl)
    se_ul, se_dl = ergodic_se(gamma_ul, gamma_dl, frame)
    stats = power_stats_from_crossgains(
        P, vnorm2, cfg.p_ul, p_dl, cfg.sigma2_ul, cfg.sigma2_dl)
    if not as_enabled:
        n_act = cfg.M
    power = power_report(point.complexity, n_act, se_ul + se_dl, cfg, frame)
    metrics = RealizationMetrics(sinr_ul=gamma_ul, sinr_dl=gamma_dl,
                                 se_ul=se_ul, se_dl=se_dl,
                                 se_total=se_ul + se_dl,
                                 power_stats_linear=stats, skipped=False)
    return metrics, power, point.complexity


def _validate_spec(cfg: SystemConfig, spec: SweepSpec) -> None:
    if spec.variable not in ("N", "K"):
        raise ValueError(f"unknown sweep variable {spec.variable!r}")
    if len(spec.values) == 0:
        raise ValueError("sweep values must be nonempty")
    if any(b <= a for a, b in zip(spec.values, spec.values[1:])):
        raise ValueError("sweep values must be strictly increasing")
    if spec.scheme not in SCHEMES + ("both",):
        raise ValueError(f"unknown scheme {spec.scheme!r}")
    if spec.variable == "N":
        if spec.values[0] < 1 or spec.values[-1] > cfg.M:
            raise ValueError(f"N values must lie in [1, {cfg.M}]")
    else:
        if spec.values[0] < 1:
            raise ValueError("K values must be >= 1")
        if spec.n_fixed is not None and not 1 <= spec.n_fixed <= cfg.M:
            raise ValueError(f"n must lie in [1, {cfg.M}]")


def run_sweep(cfg: SystemConfig, spec: SweepSpec,
              workers: int | None = None) -> list[AggregateResult]:
    """One AggregateResult per feasible (scheme, value) pair.

    ZF points with fewer selected antennas than users are omitted (logged).
    Channel realizations are shared across the points of an N sweep, which
    is equivalent to evaluating each point independently because the draw
    stream does not depend on the operating point.
    """
    _validate_spec(cfg, spec)
    realizations = spec.realizations or cfg.realizations
    seed = cfg.seed if spec.seed is None else spec.seed
    schemes = SCHEMES if spec.scheme == "both" else (spec.scheme,)
    results = []
    if spec.variable == "N":
        frame = derive_frame(cfg)
        points = []
        for scheme in schemes:
            for n in spec.values:
                point = _make_point(cfg, frame, int(n), scheme,
                                    spec.as_enabled)
                if not _zf_feasible(cfg, point):
                    log.info("omitting zf point N=%d: needs N >= K=%d",
                             point.n_eff, cfg.K)
                    continue
                points.append(point)
        if not points:
            raise ZfInfeasibleError(
                f"no feasible sweep point (ZF needs N >= K={cfg.K})")
        rows = _run_points(cfg, frame, points, realizations, seed, workers)
        for p, point in enumerate(points):
            results.append(_aggregate(cfg, "N", point, rows[:, p],
                                      realizations))
            log.info("point %s N=%d done (skipped %d)", point.scheme,
                     point.n, results[-1].skipped)
    else:
        for value in spec.values:
            cfg_k = with_overrides(cfg, K=int(value))
            frame = derive_frame(cfg_k)
            n = spec.n_fixed if spec.n_fixed is not None else cfg_k.M
            for scheme in schemes:
                point = _make_point(cfg_k, frame, int(n), scheme,
                                    spec.as_enabled)
                if not _zf_feasible(cfg_k, point):
                    log.info("omitting zf point K=%d: needs N >= K", value)
                    continue
                rows = _run_points(cfg_k, frame, [point], realizations, seed,
                                   workers)
                results.append(_aggregate(cfg_k, "K", point, rows[:, 0],
                                          realizations))
                log.info("point %s K=%d done (skipped %d)", scheme, value,
                         results[-1].skipped)
    return results


def run_point(cfg: SystemConfig, n: int, scheme: str, as_enabled: bool = True,
              realizations: int | None = None, seed: int | None = None,
              workers: int | None = None) -> AggregateResult:
    """Monte Carlo aggregate of a single operating point."""
    frame = derive_frame(cfg)
    point = _make_point(cfg, frame, n, scheme, as_enabled)
    if not _zf_feasible(cfg, point):
        raise ZfInfeasibleError(f"ZF needs n >= K={cfg.K}, got {point.n_eff}")
    rows = _run_points(cfg, frame, [point], realizations or cfg.realizations,
                       cfg.seed if seed is None else seed, workers)
    return _aggregate(cfg, "N", point, rows[:, 0],
                      realizations or cfg.realizations)


def coarse_grid(M: int) -> tuple:
    """Small-N-dense candidate grid: 1..10 then every 4th value up to M."""
    return tuple(range(1, 11)) + tuple(range(12, M + 1, 4))


def find_optimal_n(cfg: SystemConfig, scheme: str, k: int | None = None,
                   candidates=None, realizations: int | None = None,
                   workers: int | None = None):
    """N maximizing the mean energy efficiency; ties go to the smaller N.

    Returns (n_star, results) with the per-candidate aggregates.
    """
    if k is not None:
        cfg = with_overrides(cfg, K=k)
    if candidates is None:
        candidates = range(1, cfg.M + 1)
    values = tuple(int(v) for v in candidates)
    if scheme == SCHEME_ZF:
        values = tuple(v for v in values if v >= cfg.K)
    if not values:
        raise ValueError(f"no feasible candidate N for scheme {scheme!r} "
                         f"at K={cfg.K}")
    spec = SweepSpec(variable="N", values=values, scheme=scheme,
                     realizations=realizations)
    results = run_sweep(cfg, spec, workers=workers)
    best = None
    for res in results:
        if np.isnan(res.ee):
            continue
        if best is None or res.ee > best.ee:
            best = res
    if best is None:
        raise ValueError("every candidate point was skipped")
    return best.value, results
