"""Geometry, visibility regions and non-stationary channel realizations.

The base station is a uniform linear array along the x axis with the first
antenna at (0, 0) and the last at (L, 0). Users are dropped uniformly on
the rectangle [0, L] x [d_min, d_max]. Each user sees the array through
N_c randomly placed visibility regions (VRs); the channel coefficient is
exactly zero at antennas outside the union of the user's VRs.

Antenna indices are 0-based everywhere in code; file dumps and docs use
1-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig

# Fraction of the array a single VR may span. Calibrated so that the drawn
# per-user visible set matches the target statistics (mean union of the
# N_c=3 VRs about 56 antennas out of M=100).
VR_SPAN_FRACTIONS = (0.12, 0.36)


@dataclass(frozen=True)
class UserLayout:
    positions: np.ndarray   # (K, 2) user coordinates [m]
    antenna_x: np.ndarray   # (M,) antenna abscissae [m]
    distances: np.ndarray   # (M, K) antenna-to-user distances [m]


@dataclass(frozen=True)
class VisibilityMask:
    starts: np.ndarray      # (K, N_c) first antenna of each VR, 1-based
    spans: np.ndarray       # (K, N_c) VR span N_ik; the VR holds N_ik+1 antennas
    mask: np.ndarray        # (M, K) boolean, True where antenna m sees user k

    def visible_counts(self) -> np.ndarray:
        """Number of antennas visible per user, |C_k|."""
        return self.mask.sum(axis=0)


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray           # (M, K) complex channel matrix
    pathloss_gain: np.ndarray   # (M, K) large-scale gains b_mk
    smallfading: np.ndarray     # (M, K) unit-variance complex fading
    mask: VisibilityMask
    layout: UserLayout


def antenna_positions(cfg: SystemConfig) -> np.ndarray:
    """Uniformly spaced abscissae with exact endpoints 0 and L."""
    return np.linspace(0.0, cfg.L, cfg.M)


def place_users(cfg: SystemConfig, rng: np.random.Generator) -> UserLayout:
    """Drop K users uniformly on the service rectangle.

    Draw order (x coordinates, then y coordinates) is part of the
    reproducibility contract.
    """
    x = rng.uniform(0.0, cfg.L, cfg.K)
    y = rng.uniform(cfg.d_min, cfg.d_max, cfg.K)
    ax = antenna_positions(cfg)
    d = np.hypot(ax[:, None] - x[None, :], y[None, :])
    return UserLayout(positions=np.column_stack([x, y]), antenna_x=ax,
                      distances=d)


def pathloss(d, cfg: SystemConfig):
    """Large-scale gain b0 * d**(-gamma). Scalar or elementwise on arrays."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("pathloss requires strictly positive distances")
    return cfg.b0 * d ** (-cfg.gamma)


def vr_span_bounds(cfg: SystemConfig) -> tuple[int, int]:
    lo = int(np.ceil(VR_SPAN_FRACTIONS[0] * cfg.M))
    hi = int(np.floor(VR_SPAN_FRACTIONS[1] * cfg.M))
    if not 1 <= lo <= hi:
        raise ValueError(f"M={cfg.M} too small for VR span bounds [{lo}, {hi}]")
    return lo, hi


def draw_visibility(cfg: SystemConfig, rng: np.random.Generator) -> VisibilityMask:
    """Draw the per-user visibility regions and assemble the binary mask.

    Each VR spans antennas c_ik .. c_ik + N_ik (1-based, inclusive) with
    N_ik an integer uniform on the span bounds and c_ik uniform on
    [1, M - N_ik]. VRs of one user are independent and may overlap. Spans
    are drawn first, then starts.
    """
    lo, hi = vr_span_bounds(cfg)
    spans = rng.integers(lo, hi + 1, size=(cfg.K, cfg.N_c))
    starts = rng.integers(1, cfg.M - spans + 1)
    mask = np.zeros((cfg.M, cfg.K), dtype=bool)
    for k in range(cfg.K):
        for i in range(cfg.N_c):
            c = starts[k, i]
            mask[c - 1: c + spans[k, i], k] = True
    return VisibilityMask(starts=starts, spans=spans, mask=mask)


def realize_channel(cfg: SystemConfig, layout: UserLayout,
                    mask: VisibilityMask,
                    rng: np.random.Generator) -> ChannelRealization:
    """Assemble H = mask * sqrt(pathloss) * fading elementwise.

    The small-scale fading is i.i.d. circularly-symmetric complex Gaussian
    with unit variance (real and imaginary parts drawn in that order).
    """
    gains = pathloss(layout.distances, cfg)
    re = rng.standard_normal((cfg.M, cfg.K))
    im = rng.standard_normal((cfg.M, cfg.K))
    hbar = (re + 1j * im) * np.sqrt(0.5)
    H = np.where(mask.mask, np.sqrt(gains) * hbar, 0.0 + 0.0j)
    return ChannelRealization(H=H, pathloss_gain=gains, smallfading=hbar,
                              mask=mask, layout=layout)
