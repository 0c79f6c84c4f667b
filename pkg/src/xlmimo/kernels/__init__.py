"""Backend selection for the per-realization hot kernels.

The compiled extension (``xlmimo.kernels._core``) is preferred when it
imported successfully; the pure numpy fallback (``_ref``) is used
otherwise. Set ``XLMIMO_BACKEND=python`` or ``XLMIMO_BACKEND=native`` to
force a backend; ``native`` raises if the extension is missing. Both
backends implement the same contract and agree to floating-point rounding;
a fixed backend gives bit-identical results across runs.
"""

from __future__ import annotations

import os

import numpy as np

from . import _ref

try:
    from . import _core
    HAVE_NATIVE = True
except ImportError:   # extension not built on this install
    _core = None
    HAVE_NATIVE = False


def _select():
    choice = os.environ.get("XLMIMO_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "native", "python"):
        raise ValueError(f"XLMIMO_BACKEND must be auto, native or python, "
                         f"got {choice!r}")
    if choice == "python":
        return _ref
    if choice == "native":
        if not HAVE_NATIVE:
            raise ImportError("XLMIMO_BACKEND=native but the compiled "
                              "kernels are not available")
        return _core
    return _core if HAVE_NATIVE else _ref


_impl = _select()


def active_backend() -> str:
    return _impl.BACKEND_NAME


def use_backend(name: str) -> None:
    """Switch backend in-process (mainly for tests and benchmarks)."""
    global _impl
    if name == "python":
        _impl = _ref
    elif name == "native":
        if not HAVE_NATIVE:
            raise ImportError("compiled kernels are not available")
        _impl = _core
    else:
        raise ValueError(f"unknown backend {name!r}")


def selection_order(theta: np.ndarray, strength: np.ndarray) -> np.ndarray:
    # sort-bound, and numpy's lexsort is already compiled; both backends
    # share it (the extension's greedy variant exists as a cross-check)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    strength = np.ascontiguousarray(strength, dtype=np.float64)
    return _ref.selection_order(theta, strength)


def evaluate_selection(H: np.ndarray, H_hat: np.ndarray, order: np.ndarray,
                       n: int, use_zf: bool, pivot_rtol: float):
    H = np.ascontiguousarray(H, dtype=np.complex128)
    H_hat = np.ascontiguousarray(H_hat, dtype=np.complex128)
    order = np.ascontiguousarray(order, dtype=np.int64)
    return _impl.evaluate_selection(H, H_hat, order, int(n), bool(use_zf),
                                    float(pivot_rtol))
