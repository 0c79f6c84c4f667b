"""Orthogonal pilot codebook and least-squares channel estimation.

All users transmit their pilot sequences synchronously; the BS correlates
the received block with each sequence to obtain the per-user channel
estimate. With mutually orthogonal sequences the estimation error is pure
receiver noise with per-element variance sigma2_ul / (tau_p * p_p).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .config import SystemConfig


@dataclass(frozen=True)
class PilotCodebook:
    Psi: np.ndarray   # (tau_p, K) unit-modulus pilot symbols


@dataclass(frozen=True)
class ChannelEstimate:
    H_hat: np.ndarray     # (M, K) estimated channel matrix
    noise_scale: float    # per-element error variance sigma2_ul/(tau_p*p_p)


def pilot_codebook(tau_p: int, K: int) -> PilotCodebook:
    """First K columns of the tau_p-point DFT matrix.

    Unit-modulus entries, pairwise orthogonal with inner product tau_p on
    the diagonal. Requires K <= tau_p.
    """
    if K > tau_p:
        raise ValueError(
            f"only {tau_p} orthogonal sequences of length {tau_p} exist, "
            f"need {K}")
    t = np.arange(tau_p)
    return PilotCodebook(Psi=np.exp(-2j * np.pi * np.outer(t, np.arange(K)) / tau_p))


def simulate_pilot_phase(chan: ChannelRealization, cfg: SystemConfig,
                         rng: np.random.Generator) -> ChannelEstimate:
    """Run the UL pilot phase and return the least-squares estimate.

    The received block is formed explicitly (superposition of all users'
    scaled sequences plus noise) and then correlated, so the full pilot
    arithmetic is exercised rather than a noise-shortcut.
    """
    tau_p = cfg.K
    Psi = pilot_codebook(tau_p, cfg.K).Psi
    re = rng.standard_normal((cfg.M, tau_p))
    im = rng.standard_normal((cfg.M, tau_p))
    noise = (re + 1j * im) * np.sqrt(cfg.sigma2_ul / 2.0)
    Y = np.sqrt(cfg.p_p) * (chan.H @ Psi.conj().T) + noise
    H_hat = Y @ Psi / (tau_p * np.sqrt(cfg.p_p))
    return ChannelEstimate(H_hat=H_hat,
                           noise_scale=cfg.sigma2_ul / (tau_p * cfg.p_p))
