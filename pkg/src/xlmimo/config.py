"""System configuration: loading, validation and derived frame structure.

The configuration is a flat ``key = value`` UTF-8 text file with ``#``
comments. Every key has a default, so an empty document is a valid
configuration. Noise powers are configured in dBm and exposed in linear
watts through the ``sigma2_ul`` / ``sigma2_dl`` properties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace


class ConfigError(ValueError):
    """Invalid configuration document or parameter value."""


class FrameError(ValueError):
    """Frame split infeasible for the requested parameters."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt) + 30.0


@dataclass(frozen=True)
class SystemConfig:
    M: int = 100            # BS antennas (uniform linear array)
    K: int = 4              # single-antenna users
    L: float = 60.0         # array length [m]
    d_min: float = 5.0      # user rectangle, nearest edge [m]
    d_max: float = 30.0     # user rectangle, farthest edge [m]
    N_c: int = 3            # visibility regions per user
    gamma: float = 2.5      # pathloss exponent
    b0: float = 2.95e-4     # median channel gain at 1 m (linear)
    B: float = 20e6         # transmission bandwidth [Hz]
    B_C: float = 100e3      # coherence bandwidth [Hz]
    T_C: float = 2e-3       # coherence time [s]
    sigma2_ul_dbm: float = -100.0   # total UL noise power [dBm]
    sigma2_dl_dbm: float = -80.0    # total DL noise power [dBm]
    p_p: float = 0.1        # per-user pilot power [W]
    p_ul: float = 0.1       # per-user UL data power [W]
    P_dl_total: float = 1.0  # total DL data power, split equally [W]
    eps_u: float = 0.4      # UL fraction of the data part of the block
    eps_d: float = 0.6      # DL fraction of the data part of the block
    eta_ul: float = 0.5     # amplifier efficiency, user side
    eta_dl: float = 0.4     # amplifier efficiency, BS side
    L_BS: float = 75e9      # BS computational efficiency [flop/s per W]
    P_FIX: float = 10.0     # fixed site power [W]
    P_LO: float = 0.2       # local oscillator power [W]
    P_BS_ant: float = 0.2   # circuit power per active BS antenna [W]
    P_UE: float = 0.2       # circuit power per user terminal [W]
    P_cod: float = 1e-10    # coding power density [W per bit/s]
    P_dec: float = 8e-10    # decoding power density [W per bit/s]
    P_bt: float = 2.5e-10   # backhaul traffic power density [W per bit/s]
    realizations: int = 1000  # Monte Carlo realizations
    seed: int = 1           # master RNG seed

    @property
    def sigma2_ul(self) -> float:
        """Total UL noise power in linear watts."""
        return dbm_to_watt(self.sigma2_ul_dbm)

    @property
    def sigma2_dl(self) -> float:
        """Total DL noise power in linear watts."""
        return dbm_to_watt(self.sigma2_dl_dbm)

    def validate(self) -> "SystemConfig":
        _require(self.M >= 2, "M", "must be an integer >= 2")
        _require(self.K >= 1, "K", "must be an integer >= 1")
        _require(self.N_c >= 1, "N_c", "must be an integer >= 1")
        _require(self.realizations >= 1, "realizations", "must be >= 1")
        _require(self.seed >= 0, "seed", "must be a nonnegative integer")
        _require(self.L > 0, "L", "must be positive")
        _require(0 < self.d_min < self.d_max, "d_min",
                 "requires 0 < d_min < d_max")
        _require(self.gamma >= 2, "gamma", "must be >= 2")
        for key in ("b0", "B", "B_C", "T_C", "p_p", "p_ul", "P_dl_total",
                    "L_BS", "P_FIX", "P_LO", "P_BS_ant", "P_UE",
                    "P_cod", "P_dec", "P_bt"):
            _require(getattr(self, key) > 0, key, "must be positive")
        for key in ("eta_ul", "eta_dl"):
            _require(0 < getattr(self, key) <= 1, key, "must be in (0, 1]")
        for key in ("eps_u", "eps_d"):
            _require(0 < getattr(self, key) < 1, key, "must be in (0, 1)")
        if abs(self.eps_u + self.eps_d - 1.0) > 1e-9:
            raise ConfigError("eps_u+eps_d != 1 "
                              f"(got {self.eps_u} + {self.eps_d})")
        return self


@dataclass(frozen=True)
class FrameStructure:
    """Per-coherence-block sample budget (real-valued, never rounded)."""
    tau_c: float   # samples per coherence block
    tau_p: float   # pilot samples (one per user)
    tau_u: float   # UL data samples
    tau_d: float   # DL data samples


_INT_FIELDS = {"M", "K", "N_c", "realizations", "seed"}
_FIELD_NAMES = [f.name for f in fields(SystemConfig)]


def _require(cond: bool, key: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{key}: {msg}")


def _parse_value(key: str, raw: str):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: non-numeric value {raw!r}") from None
    if key in _INT_FIELDS:
        if not value.is_integer():
            raise ConfigError(f"{key}: expected an integer, got {raw!r}")
        return int(value)
    return value


def parse_overrides(pairs) -> dict:
    """Parse ``key=value`` strings (the --set flag) into typed values."""
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key, _, raw = pair.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ConfigError(f"{key}: unknown configuration key")
        out[key] = _parse_value(key, raw.strip())
    return out


def load_config(text: str, overrides: dict | None = None) -> SystemConfig:
    """Parse and validate a configuration document.

    Omitted keys take their defaults. Duplicate keys, unknown keys and
    non-numeric values are reported by key name. ``overrides`` (from CLI
    ``--set`` flags) are applied after the document.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {body!r}")
        key, _, raw = body.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ConfigError(f"{key}: unknown configuration key (line {lineno})")
        if key in values:
            raise ConfigError(f"{key}: duplicate key (line {lineno})")
        values[key] = _parse_value(key, raw.strip())
    if overrides:
        values.update(overrides)
    return SystemConfig(**values).validate()


def load_config_file(path, overrides: dict | None = None) -> SystemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read(), overrides)


def serialize_config(cfg: SystemConfig) -> str:
    """Emit a document that parses back to an equal SystemConfig."""
    lines = []
    for f in fields(SystemConfig):
        value = getattr(cfg, f.name)
        lines.append(f"{f.name} = {value!r}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: SystemConfig, **kwargs) -> SystemConfig:
    """Derived config with some fields replaced, revalidated."""
    return replace(cfg, **kwargs).validate()


def derive_frame(cfg: SystemConfig) -> FrameStructure:
    """Split the coherence block into pilot, UL data and DL data samples.

    tau_c = T_C * B_C and tau_p equals the number of users (one orthogonal
    pilot each). The UL/DL data parts keep their exact real values.
    """
    tau_c = cfg.T_C * cfg.B_C
    tau_p = float(cfg.K)
    if tau_p >= tau_c:
        raise FrameError(
            f"infeasible frame: tau_p={tau_p} does not fit in tau_c={tau_c}")
    tau_u = cfg.eps_u * (tau_c - tau_p)
    tau_d = cfg.eps_d * (tau_c - tau_p)
    return FrameStructure(tau_c=tau_c, tau_p=tau_p, tau_u=tau_u, tau_d=tau_d)
