"""1D discrete-time quantum walk simulation and walk-parameter estimation."""

from .walk import (
    COMPILED_KERNELS,
    CoinSpec,
    Distribution,
    WalkSpec,
    WalkState,
    apply_coin,
    apply_shift,
    evolve,
    evolve_recording,
    make_coin,
    measure,
    origin_state,
)

__version__ = "0.1.0"

__all__ = [
    "COMPILED_KERNELS",
    "CoinSpec",
    "Distribution",
    "WalkSpec",
    "WalkState",
    "apply_coin",
    "apply_shift",
    "evolve",
    "evolve_recording",
    "make_coin",
    "measure",
    "origin_state",
    "__version__",
]
