"""Deterministic generation, splitting, and serialization of sweep datasets.

Three generators produce (probability distribution, target) rows on
arithmetic parameter grids: a theta sweep at fixed step count, a full
(theta, steps) grid, and a split-step theta1 sweep.  Generation is
reproducible byte for byte; set QWALK_THREADS to parallelize across grid
points (rows are assembled in grid order regardless).
"""

from __future__ import annotations

import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DatasetParseError, InvalidGridError, InvalidParameterError
from .rng import shuffled_indices
from .walk import (
    INIT_SYMMETRIC_I,
    INIT_SYMMETRIC_PLAIN,
    SPLIT_STEP,
    STANDARD,
    CoinSpec,
    WalkSpec,
    evolve,
    evolve_record_matrix,
    format_f64,
    measure,
    origin_state,
)

FORMAT_VERSION = 1

SINGLE_THETA = "single_theta"
THETA_STEPS = "theta_steps"
SSQW_THETA1 = "ssqw_theta1"

# endpoint slack for the arithmetic theta progression
_STOP_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Parameter sweep description.

    theta values are theta_start + k * theta_step for every k with value
    <= theta_stop + 1e-12.  steps_fixed applies to single_theta and
    ssqw_theta1 sweeps; steps_range (inclusive) to theta_steps grids.
    """

    kind: str
    theta_start: float
    theta_stop: float
    theta_step: float
    steps_fixed: int | None = None
    steps_range: tuple[int, int] | None = None
    theta2_fixed: float | None = None
    initial_state: tuple[complex, complex] = INIT_SYMMETRIC_PLAIN

    def __post_init__(self):
        if self.kind not in (SINGLE_THETA, THETA_STEPS, SSQW_THETA1):
            raise InvalidGridError(f"unknown grid kind {self.kind!r}")
        for name in ("theta_start", "theta_stop", "theta_step"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidGridError(f"{name} must be finite, got {v!r}")
        if self.theta_step <= 0:
            raise InvalidGridError(f"theta_step must be > 0, got {self.theta_step}")
        if self.theta_stop < self.theta_start:
            raise InvalidGridError("theta_stop must be >= theta_start (empty grid)")
        if self.kind in (SINGLE_THETA, SSQW_THETA1):
            if self.steps_fixed is None or self.steps_fixed < 0:
                raise InvalidGridError(f"{self.kind} grid needs steps_fixed >= 0")
        if self.kind == THETA_STEPS:
            if self.steps_range is None:
                raise InvalidGridError("theta_steps grid needs steps_range")
            lo, hi = self.steps_range
            if not (1 <= lo <= hi):
                raise InvalidGridError(f"steps_range must satisfy 1 <= lo <= hi, got {self.steps_range}")
        if self.kind == SSQW_THETA1:
            if self.theta2_fixed is None or not math.isfinite(self.theta2_fixed):
                raise InvalidGridError("ssqw_theta1 grid needs a finite theta2_fixed")


def default_grid(kind: str) -> GridSpec:
    """The canonical sweep for each dataset kind."""
    pi = math.pi
    if kind == SINGLE_THETA:
        return GridSpec(SINGLE_THETA, pi / 180, 89 * pi / 180, pi / 1800, steps_fixed=500)
    if kind == THETA_STEPS:
        return GridSpec(THETA_STEPS, pi / 180, pi / 2, pi / 180, steps_range=(1, 499))
    if kind == SSQW_THETA1:
        # the split-step estimators need the left/right asymmetry of the
        # (1, i)/sqrt2 spin state; the equal-amplitude state is mirror
        # symmetric for this walk and folds distinct theta1 together
        return GridSpec(
            SSQW_THETA1, pi / 1800, pi / 2, 0.04 * pi / 180,
            steps_fixed=100, theta2_fixed=pi / 4,
            initial_state=INIT_SYMMETRIC_I,
        )
    raise InvalidGridError(f"unknown grid kind {kind!r}")


def theta_values(grid: GridSpec) -> np.ndarray:
    """The arithmetic theta progression (integer-multiplied, not accumulated)."""
    values = []
    k = 0
    while True:
        v = grid.theta_start + k * grid.theta_step
        if v > grid.theta_stop + _STOP_TOL:
            break
        values.append(v)
        k += 1
    if not values:
        raise InvalidGridError("grid contains no theta values")
    return np.asarray(values)


def grid_to_dict(grid: GridSpec) -> dict:
    a, b = grid.initial_state
    return {
        "kind": grid.kind,
        "theta_start": grid.theta_start,
        "theta_stop": grid.theta_stop,
        "theta_step": grid.theta_step,
        "steps_fixed": grid.steps_fixed,
        "steps_range": list(grid.steps_range) if grid.steps_range else None,
        "theta2_fixed": grid.theta2_fixed,
        "initial_state": [[a.real, a.imag], [b.real, b.imag]],
    }


def grid_from_dict(d: dict) -> GridSpec:
    (ar, ai), (br, bi) = d["initial_state"]
    rng = d.get("steps_range")
    return GridSpec(
        kind=d["kind"],
        theta_start=d["theta_start"],
        theta_stop=d["theta_stop"],
        theta_step=d["theta_step"],
        steps_fixed=d.get("steps_fixed"),
        steps_range=tuple(rng) if rng else None,
        theta2_fixed=d.get("theta2_fixed"),
        initial_state=(complex(ar, ai), complex(br, bi)),
    )


@dataclass
class Dataset:
    """Ordered (feature vector, target vector) rows plus grid metadata.

    Features are probability distributions over lattice positions; index j
    of a row holds position j - position_offset.
    """

    kind: str
    features: np.ndarray  # (n, feature_len) float64
    targets: np.ndarray  # (n, n_targets) float64
    target_names: list[str]
    position_offset: int
    metadata: dict = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def feature_len(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class SplitSpec:
    """Train fraction and shuffle seed; train size = floor(ratio * rows)."""

    ratio: float
    seed: int

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise InvalidParameterError(f"ratio must lie in (0, 1), got {self.ratio}")


def _thread_count() -> int:
    raw = os.environ.get("QWALK_THREADS")
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise InvalidParameterError(
            f"QWALK_THREADS must be a positive integer, got {raw!r}"
        ) from None
    if n < 1:
        raise InvalidParameterError(f"QWALK_THREADS must be >= 1, got {n}")
    return n


def _run_grid(worker, count: int) -> None:
    threads = _thread_count()
    if threads == 1:
        for i in range(count):
            worker(i)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # consume to surface worker exceptions; writes are index-disjoint
        list(pool.map(worker, range(count)))


def gen_single_theta(grid: GridSpec) -> Dataset:
    """One row per theta: the distribution after steps_fixed standard steps."""
    if grid.kind != SINGLE_THETA:
        raise InvalidGridError(f"expected a {SINGLE_THETA} grid, got {grid.kind!r}")
    thetas = theta_values(grid)
    n = grid.steps_fixed
    feature_len = 2 * n + 1
    alpha, beta = grid.initial_state
    features = np.empty((thetas.size, feature_len))

    def worker(i):
        spec = WalkSpec(STANDARD, CoinSpec(thetas[i]), steps=n)
        state = evolve(origin_state(alpha, beta, n), spec)
        features[i] = measure(state).probs

    _run_grid(worker, thetas.size)
    return Dataset(
        kind=SINGLE_THETA,
        features=features,
        targets=thetas.reshape(-1, 1).copy(),
        target_names=["theta"],
        position_offset=n,
        metadata={"version": FORMAT_VERSION, "grid": grid_to_dict(grid)},
    )


def gen_theta_steps(grid: GridSpec) -> Dataset:
    """Rows for every (theta, steps) pair, theta ascending then steps ascending.

    One recorded evolution per theta supplies all step counts; rows are
    zero-padded to the widest lattice (shared position offset).
    """
    if grid.kind != THETA_STEPS:
        raise InvalidGridError(f"expected a {THETA_STEPS} grid, got {grid.kind!r}")
    thetas = theta_values(grid)
    lo, hi = grid.steps_range
    per_theta = hi - lo + 1
    feature_len = 2 * hi + 1
    alpha, beta = grid.initial_state
    n_rows = thetas.size * per_theta
    features = np.empty((n_rows, feature_len))
    targets = np.empty((n_rows, 2))

    def worker(i):
        spec = WalkSpec(STANDARD, CoinSpec(thetas[i]), steps=hi)
        record, _ = evolve_record_matrix(origin_state(alpha, beta, hi), spec, hi)
        rows = slice(i * per_theta, (i + 1) * per_theta)
        features[rows] = record[lo - 1 :]
        targets[rows, 0] = thetas[i]
        targets[rows, 1] = np.arange(lo, hi + 1)

    _run_grid(worker, thetas.size)
    return Dataset(
        kind=THETA_STEPS,
        features=features,
        targets=targets,
        target_names=["theta", "steps"],
        position_offset=hi,
        metadata={"version": FORMAT_VERSION, "grid": grid_to_dict(grid)},
    )


def gen_ssqw_sweep(grid: GridSpec) -> Dataset:
    """One row per theta1: split-step walk with fixed theta2 and step count."""
    if grid.kind != SSQW_THETA1:
        raise InvalidGridError(f"expected a {SSQW_THETA1} grid, got {grid.kind!r}")
    thetas = theta_values(grid)
    n = grid.steps_fixed
    coin2 = CoinSpec(grid.theta2_fixed)
    alpha, beta = grid.initial_state
    features = np.empty((thetas.size, 2 * n + 1))

    def worker(i):
        spec = WalkSpec(SPLIT_STEP, CoinSpec(thetas[i]), coin2, steps=n)
        state = evolve(origin_state(alpha, beta, n), spec)
        features[i] = measure(state).probs

    _run_grid(worker, thetas.size)
    return Dataset(
        kind=SSQW_THETA1,
        features=features,
        targets=thetas.reshape(-1, 1).copy(),
        target_names=["theta1"],
        position_offset=n,
        metadata={"version": FORMAT_VERSION, "grid": grid_to_dict(grid)},
    )


GENERATORS = {
    SINGLE_THETA: gen_single_theta,
    THETA_STEPS: gen_theta_steps,
    SSQW_THETA1: gen_ssqw_sweep,
}


def generate(grid: GridSpec) -> Dataset:
    return GENERATORS[grid.kind](grid)


def split(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Seeded Fisher-Yates split; first floor(ratio*n) shuffled rows train."""
    perm = shuffled_indices(ds.n_rows, spec.seed)
    n_train = math.floor(spec.ratio * ds.n_rows)
    parts = []
    for role, idx in (("train", perm[:n_train]), ("test", perm[n_train:])):
        meta = dict(ds.metadata)
        meta["split"] = {"seed": spec.seed, "ratio": spec.ratio, "role": role}
        parts.append(
            Dataset(
                kind=ds.kind,
                features=ds.features[idx],
                targets=ds.targets[idx],
                target_names=list(ds.target_names),
                position_offset=ds.position_offset,
                metadata=meta,
            )
        )
    return parts[0], parts[1]


def save_dataset(ds: Dataset, path) -> None:
    """Write the one-line JSON header plus one CSV row per dataset row."""
    header = {
        "version": FORMAT_VERSION,
        "kind": ds.kind,
        "feature_len": ds.feature_len,
        "position_offset": ds.position_offset,
        "target_names": list(ds.target_names),
        "theta_unit": "radian",
        "grid": ds.metadata.get("grid", {}),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for feat, targ in zip(ds.features, ds.targets):
            row = [format_f64(v) for v in feat]
            row.extend(format_f64(v) for v in targ)
            fh.write(",".join(row) + "\n")


def _scan_rows(body: str, expected: int) -> None:
    """Locate the first malformed CSV row and raise with its line number."""
    for ln, line in enumerate(body.splitlines(), start=2):
        parts = line.split(",")
        if len(parts) != expected:
            raise DatasetParseError(
                f"expected {expected} comma-separated values, found {len(parts)}",
                line=ln,
            )
        for tok in parts:
            try:
                v = float(tok)
            except ValueError:
                raise DatasetParseError(f"non-numeric value {tok!r}", line=ln) from None
            if not math.isfinite(v):
                raise DatasetParseError(f"non-finite value {tok!r}", line=ln)


def load_dataset(path) -> Dataset:
    """Parse a dataset file; inverse of save_dataset, bit-exact on values."""
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise DatasetParseError("empty file, missing JSON header", line=1)
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise DatasetParseError(f"malformed JSON header: {exc}", line=1) from None
        if not isinstance(header, dict):
            raise DatasetParseError("header must be a JSON object", line=1)
        if header.get("version") != FORMAT_VERSION:
            raise DatasetParseError(
                f"unsupported version {header.get('version')!r}", line=1
            )
        try:
            kind = header["kind"]
            feature_len = int(header["feature_len"])
            position_offset = int(header["position_offset"])
            target_names = list(header["target_names"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DatasetParseError(f"bad header field: {exc}", line=1) from None
        if feature_len < 1 or not target_names:
            raise DatasetParseError("feature_len and target_names must be nonempty", line=1)
        body = fh.read()

    expected = feature_len + len(target_names)
    if body.strip() == "":
        rows = np.empty((0, expected))
    else:
        try:
            rows = np.loadtxt(io.StringIO(body), delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            _scan_rows(body, expected)
            raise DatasetParseError(str(exc)) from None
        if rows.shape[1] != expected:
            _scan_rows(body, expected)
            raise DatasetParseError(
                f"rows have {rows.shape[1]} values, header implies {expected}"
            )
        if not np.isfinite(rows).all():
            _scan_rows(body, expected)

    return Dataset(
        kind=kind,
        features=rows[:, :feature_len],
        targets=rows[:, feature_len:],
        target_names=[str(t) for t in target_names],
        position_offset=position_offset,
        metadata={"version": FORMAT_VERSION, "grid": header.get("grid", {})},
    )
