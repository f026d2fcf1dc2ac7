"""Exact dense simulation of 1D discrete-time and split-step quantum walks.

A walker state lives on a bounded integer lattice and carries a two-component
complex amplitude (spin up / spin down) at every site.  One standard step
applies a 2x2 coin to the spin at each site and then shifts spin-up
amplitudes one site left and spin-down one site right.  A split-step walk
applies two coins and two one-sided shifts per step.

The stepping loops are provided by a compiled extension when available, with
a pure-numpy fallback selected at import (set QWLEARN_PURE_PYTHON=1 to force
the fallback).  Both backends produce bit-identical amplitudes.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, OutOfBoundsError, ShapeError

if os.environ.get("QWLEARN_PURE_PYTHON"):
    from . import _kernels_py as _kernels
else:
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _kernels

COMPILED_KERNELS = _kernels.COMPILED

# one-parameter coin convention: xi = 0, zeta = -pi/2
ONE_PARAM_XI = 0.0
ONE_PARAM_ZETA = -math.pi / 2

# common origin spin states: "plain" = (1,1)/sqrt2, "i" = (1,i)/sqrt2.
# (1,1) is an eigenvector of the one-parameter coin, so it yields exactly
# mirror-symmetric distributions for both walk kinds; (1,i) is maximally
# biased at theta=pi/4 (the names follow the CLI flag values, not the
# symmetry they produce).  The two magnitudes are the adjacent binary64
# neighbors of sqrt(1/2) whose squares sum to exactly 1.0, so an
# unevolved walker reports total probability 1 verbatim.
_HALF_HI = math.nextafter(1 / math.sqrt(2), 1.0)
_HALF_LO = 1 / math.sqrt(2)
INIT_SYMMETRIC_PLAIN = (complex(_HALF_HI), complex(_HALF_LO))
INIT_SYMMETRIC_I = (complex(_HALF_HI), 1j * _HALF_LO)

STANDARD = "standard"
SPLIT_STEP = "split-step"
SHIFT_MODES = (STANDARD, "plus", "minus")


def _require_finite(name, value):
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class CoinSpec:
    """Angles (theta, xi, zeta) of the 2x2 SU(2) coin."""

    theta: float
    xi: float = ONE_PARAM_XI
    zeta: float = ONE_PARAM_ZETA

    def __post_init__(self):
        for name in ("theta", "xi", "zeta"):
            _require_finite(name, getattr(self, name))


@dataclass(frozen=True)
class WalkSpec:
    """Walk kind, participating coins, and step count."""

    kind: str
    coin1: CoinSpec
    coin2: CoinSpec | None = None  # ignored for standard walks
    steps: int = 0

    def __post_init__(self):
        if self.kind not in (STANDARD, SPLIT_STEP):
            raise InvalidParameterError(f"unknown walk kind {self.kind!r}")
        if self.steps < 0:
            raise InvalidParameterError(f"steps must be >= 0, got {self.steps}")
        if self.kind == SPLIT_STEP and self.coin2 is None:
            raise InvalidParameterError("split-step walk requires coin2")


@dataclass
class WalkState:
    """Spin amplitudes on the lattice.

    `amps` has shape (2, extent), complex128: row 0 spin-up, row 1 spin-down.
    Storage index i holds lattice position i - offset.
    """

    amps: np.ndarray
    offset: int

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.ndim != 2 or self.amps.shape[0] != 2 or self.amps.shape[1] < 1:
            raise ShapeError(f"amps must have shape (2, extent), got {self.amps.shape}")

    @property
    def extent(self) -> int:
        return self.amps.shape[1]

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.extent) - self.offset

    def norm_sq(self) -> float:
        return float((np.abs(self.amps) ** 2).sum())

    def copy(self) -> "WalkState":
        return WalkState(self.amps.copy(), self.offset)


@dataclass
class Distribution:
    """Position-space probabilities; index i holds position i - offset."""

    probs: np.ndarray
    offset: int

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1:
            raise ShapeError(f"probs must be one-dimensional, got {self.probs.shape}")

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.probs.size) - self.offset

    def prob_at(self, x: int) -> float:
        i = x + self.offset
        if 0 <= i < self.probs.size:
            return float(self.probs[i])
        return 0.0

    def total(self) -> float:
        return float(self.probs.sum())

    def to_text(self) -> str:
        """Tab-separated "position<TAB>probability" lines, positions ascending."""
        lines = [
            f"{x}\t{format_f64(p)}"
            for x, p in zip(self.positions, self.probs)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Distribution":
        positions = []
        probs = []
        for ln, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ShapeError(f"line {ln}: expected 'position<TAB>probability'")
            positions.append(int(parts[0]))
            probs.append(float(parts[1]))
        if not positions:
            raise ShapeError("empty distribution text")
        pos = np.asarray(positions)
        if not np.array_equal(pos, np.arange(pos[0], pos[0] + pos.size)):
            raise ShapeError("positions must be consecutive and ascending")
        return cls(np.asarray(probs), -int(pos[0]))

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def read(cls, path) -> "Distribution":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


def format_f64(value: float) -> str:
    """Shortest decimal string that round-trips the binary64 value."""
    s = repr(float(value))
    return s[:-2] if s.endswith(".0") else s


def make_coin(spec: CoinSpec) -> np.ndarray:
    """2x2 unitary [[e^{i xi} cos, e^{i zeta} sin], [-e^{-i zeta} sin, e^{-i xi} cos]]."""
    ct = math.cos(spec.theta)
    st = math.sin(spec.theta)
    exi = complex(math.cos(spec.xi), math.sin(spec.xi))
    eze = complex(math.cos(spec.zeta), math.sin(spec.zeta))
    return np.array(
        [
            [exi * ct, eze * st],
            [-(eze.conjugate() * st), exi.conjugate() * ct],
        ],
        dtype=np.complex128,
    )


def origin_state(alpha: complex, beta: complex, half_width: int) -> WalkState:
    """Walker at the origin with spin (alpha, beta) on a 2*half_width+1 lattice."""
    if half_width < 0:
        raise InvalidParameterError(f"half_width must be >= 0, got {half_width}")
    alpha = complex(alpha)
    beta = complex(beta)
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidParameterError(f"{name} must be finite, got {v!r}")
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > 1e-10:
        raise InvalidParameterError(
            f"|alpha|^2 + |beta|^2 must be 1 within 1e-10, got {norm!r}"
        )
    amps = np.zeros((2, 2 * half_width + 1), dtype=np.complex128)
    amps[0, half_width] = alpha
    amps[1, half_width] = beta
    return WalkState(amps, half_width)


def apply_coin(state: WalkState, coin: np.ndarray) -> WalkState:
    """Apply a 2x2 coin to the spin pair at every site.

    Complex products are decomposed into ordered real operations, matching
    the evolution kernels bit for bit.
    """
    coin = np.asarray(coin, dtype=np.complex128)
    if coin.shape != (2, 2):
        raise ShapeError(f"coin must be 2x2, got {coin.shape}")
    if not np.isfinite(coin.view(np.float64)).all():
        raise InvalidParameterError("coin contains non-finite entries")
    (r00, i00), (r01, i01) = (coin[0, 0].real, coin[0, 0].imag), (coin[0, 1].real, coin[0, 1].imag)
    (r10, i10), (r11, i11) = (coin[1, 0].real, coin[1, 0].imag), (coin[1, 1].real, coin[1, 1].imag)
    u, d = state.amps
    ur, ui, dr, di = u.real, u.imag, d.real, d.imag
    out = np.empty_like(state.amps)
    out[0].real = (r00 * ur - i00 * ui) + (r01 * dr - i01 * di)
    out[0].imag = (r00 * ui + i00 * ur) + (r01 * di + i01 * dr)
    out[1].real = (r10 * ur - i10 * ui) + (r11 * dr - i11 * di)
    out[1].imag = (r10 * ui + i10 * ur) + (r11 * di + i11 * dr)
    return WalkState(out, state.offset)


def apply_shift(state: WalkState, mode: str = STANDARD) -> WalkState:
    """Shift amplitudes: standard moves up left and down right; plus moves
    only down right; minus moves only up left.

    Raises OutOfBoundsError when a nonzero amplitude would leave the lattice.
    """
    if mode not in SHIFT_MODES:
        raise InvalidParameterError(f"unknown shift mode {mode!r}")
    u, d = state.amps
    nu = np.zeros_like(u)
    nd = np.zeros_like(d)
    moves_up = mode in (STANDARD, "minus")
    moves_down = mode in (STANDARD, "plus")
    if moves_up:
        if u[0] != 0:
            raise OutOfBoundsError(
                "spin-up amplitude at the left lattice edge would be lost; "
                "the state was under-allocated"
            )
        nu[:-1] = u[1:]
    else:
        nu[:] = u
    if moves_down:
        if d[-1] != 0:
            raise OutOfBoundsError(
                "spin-down amplitude at the right lattice edge would be lost; "
                "the state was under-allocated"
            )
        nd[1:] = d[:-1]
    else:
        nd[:] = d
    return WalkState(np.array([nu, nd]), state.offset)


def measure(state: WalkState) -> Distribution:
    """Position probabilities |up|^2 + |down|^2 per site."""
    u, d = state.amps
    probs = (u.real**2 + u.imag**2) + (d.real**2 + d.imag**2)
    return Distribution(probs, state.offset)


def _coin_matrices(spec: WalkSpec):
    if spec.kind == STANDARD:
        return make_coin(spec.coin1), None
    return make_coin(spec.coin1), make_coin(spec.coin2)


def evolve(initial: WalkState, spec: WalkSpec) -> WalkState:
    """Run the full walk and return the final state."""
    amps = np.ascontiguousarray(initial.amps.copy())
    c1, c2 = _coin_matrices(spec)
    if spec.kind == STANDARD:
        _kernels.evolve_standard(amps, c1, spec.steps)
    else:
        _kernels.evolve_split(amps, c1, c2, spec.steps)
    return WalkState(amps, initial.offset)


def evolve_record_matrix(initial: WalkState, spec: WalkSpec, n_max: int):
    """Evolve n_max steps, returning ((n_max, extent) probabilities, offset).

    Row k holds the distribution after k+1 steps; each row is bit-identical
    to a fresh evolve+measure at that step count.
    """
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
    amps = np.ascontiguousarray(initial.amps.copy())
    record = np.empty((n_max, initial.extent), dtype=np.float64)
    c1, c2 = _coin_matrices(spec)
    if spec.kind == STANDARD:
        _kernels.evolve_standard(amps, c1, n_max, record)
    else:
        _kernels.evolve_split(amps, c1, c2, n_max, record)
    return record, initial.offset


def evolve_recording(initial: WalkState, spec: WalkSpec, n_max: int) -> list[Distribution]:
    """Distributions after steps 1..n_max (rows view a shared record matrix)."""
    record, offset = evolve_record_matrix(initial, spec, n_max)
    return [Distribution(record[k], offset) for k in range(n_max)]
