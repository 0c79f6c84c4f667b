"""Link-level simulator for antenna selection in extra-large MIMO arrays
under spatially non-stationary channels."""

from .config import (ConfigError, FrameError, FrameStructure, SystemConfig,
                     derive_frame, load_config, load_config_file,
                     serialize_config, with_overrides)
from .engine import (AggregateResult, SweepSpec, coarse_grid, find_optimal_n,
                     run_point, run_realization, run_sweep, substream)
from .kernels import active_backend
from .selection import (SCHEME_MR, SCHEME_ZF, SelectionResult,
                        SingularChannelError, ZeroCombinerError,
                        ZfInfeasibleError, build_selection)

__version__ = "0.1.0"

__all__ = [
    "AggregateResult", "ConfigError", "FrameError", "FrameStructure",
    "SCHEME_MR", "SCHEME_ZF", "SelectionResult", "SingularChannelError",
    "SweepSpec", "SystemConfig", "ZeroCombinerError", "ZfInfeasibleError",
    "active_backend", "build_selection", "coarse_grid", "derive_frame",
    "find_optimal_n", "load_config", "load_config_file", "run_point",
    "run_realization", "run_sweep", "serialize_config", "substream",
    "with_overrides", "__version__",
]
