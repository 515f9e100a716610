"""Domain types, dataset normalization, and deterministic randomness.

All container types are immutable after construction (arrays are marked
read-only); mutation happens by building new values.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """A dataset, file, or argument violated one of the documented contracts."""


@dataclass(frozen=True)
class Trajectory:
    """An ordered sequence of D-dimensional real state vectors.

    ``states`` has shape (n, D) with n >= 1 and D >= 1; every component
    must be finite.
    """

    id: str
    states: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.states, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DataError(
                f"trajectory {self.id!r}: states must be a (n>=1, D>=1) array, "
                f"got shape {np.shape(self.states)}"
            )
        if not np.all(np.isfinite(arr)):
            raise DataError(f"trajectory {self.id!r}: non-finite state component")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "states", arr)

    @property
    def length(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]


@dataclass(frozen=True)
class NormalizationRecord:
    """Per-dimension affine transform ``x -> (x - mean) / scale``.

    ``zero_variance`` lists dimensions that were only centered (scale kept
    at 1.0 because their population std was zero).
    """

    mean: np.ndarray
    scale: np.ndarray
    zero_variance: tuple[int, ...] = ()

    def __post_init__(self):
        for name in ("mean", "scale"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)


@dataclass(frozen=True)
class TrajectoryDataset:
    """A collection of trajectories with optional integer class labels."""

    trajectories: tuple[Trajectory, ...]
    labels: dict[str, int] | None = None
    normalization: NormalizationRecord | None = None

    def __post_init__(self):
        trajs = tuple(self.trajectories)
        object.__setattr__(self, "trajectories", trajs)
        if len(trajs) < 1:
            raise DataError("dataset must contain at least one trajectory")
        ids = [t.id for t in trajs]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"duplicate trajectory ids: {dupes}")
        dims = {t.dim for t in trajs}
        if len(dims) != 1:
            raise DataError(f"trajectories have mixed dimensionality: {sorted(dims)}")
        if self.labels is not None:
            missing = [i for i in ids if i not in self.labels]
            if missing:
                raise DataError(f"labels missing for ids: {missing}")
            extra = [i for i in self.labels if i not in set(ids)]
            if extra:
                raise DataError(f"labels for unknown ids: {sorted(extra)}")

    @property
    def ids(self) -> list[str]:
        return [t.id for t in self.trajectories]

    @property
    def size(self) -> int:
        return len(self.trajectories)

    @property
    def dim(self) -> int:
        return self.trajectories[0].dim

    def label_vector(self) -> np.ndarray:
        if self.labels is None:
            raise DataError("dataset has no labels")
        return np.array([self.labels[t.id] for t in self.trajectories], dtype=np.int64)


@dataclass(frozen=True)
class WarpParams:
    """The (alpha, gamma, epsilon) triple selecting one warping distance.

    alpha in [0, 1] weighs non-diagonal (gap) steps via the coefficient
    a = alpha / (1 - alpha); gamma >= 0 is a flat gap penalty; epsilon in
    (0, 1] sets the soft threshold tau = epsilon / (1 - epsilon).  The
    derived coefficients are extended reals: +inf at alpha = 1 or
    epsilon = 1.
    """

    alpha: float
    gamma: float
    epsilon: float

    def __post_init__(self):
        a, g, e = float(self.alpha), float(self.gamma), float(self.epsilon)
        if not (0.0 <= a <= 1.0):
            raise DataError(f"alpha must lie in [0, 1], got {a}")
        if not (g >= 0.0):
            raise DataError(f"gamma must be >= 0, got {g}")
        if not (0.0 < e <= 1.0):
            raise DataError(f"epsilon must lie in (0, 1], got {e}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "epsilon", e)

    @property
    def gap_coeff(self) -> float:
        """a = alpha / (1 - alpha); +inf at alpha = 1."""
        return math.inf if self.alpha == 1.0 else self.alpha / (1.0 - self.alpha)

    @property
    def tau(self) -> float:
        """Soft-threshold level epsilon / (1 - epsilon); +inf at epsilon = 1."""
        return math.inf if self.epsilon == 1.0 else self.epsilon / (1.0 - self.epsilon)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.gamma, self.epsilon)


@dataclass(frozen=True)
class LatentMatrix:
    """One latent vector per trajectory, rows aligned with ``ids``."""

    ids: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        ids = tuple(self.ids)
        object.__setattr__(self, "ids", ids)
        arr = np.asarray(self.vectors, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != len(ids):
            raise DataError(
                f"latent matrix must be 2-D with one row per id, got shape {arr.shape} "
                f"for {len(ids)} ids"
            )
        if not np.all(np.isfinite(arr)):
            raise DataError("latent matrix contains non-finite entries")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "vectors", arr)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise distance matrix with a zero diagonal.

    Entries are non-negative extended reals; +inf is permitted (it arises
    for the alpha = 1 member on unequal-length pairs).
    """

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        ids = tuple(self.ids)
        object.__setattr__(self, "ids", ids)
        arr = np.asarray(self.values, dtype=np.float64)
        t = len(ids)
        if arr.shape != (t, t):
            raise DataError(f"distance matrix shape {arr.shape} does not match {t} ids")
        if np.any(np.isnan(arr)):
            raise DataError("distance matrix contains NaN")
        if np.any(arr < 0):
            raise DataError("distance matrix contains negative entries")
        if np.any(np.diag(arr) != 0.0):
            raise DataError("distance matrix diagonal must be zero")
        if not np.array_equal(arr, arr.T):
            raise DataError("distance matrix must be symmetric")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        return len(self.ids)

    def scaled(self, c: float) -> "DistanceMatrix":
        return DistanceMatrix(self.ids, self.values * float(c))


def _stacked_states(ds: TrajectoryDataset) -> np.ndarray:
    return np.concatenate([t.states for t in ds.trajectories], axis=0)


def normalize_dataset(ds: TrajectoryDataset) -> TrajectoryDataset:
    """Z-score every state dimension across all states of all trajectories.

    Uses the population std.  Zero-variance dimensions are centered only
    and flagged in the returned dataset's normalization record.
    """
    if ds.size < 2:
        raise DataError("normalization needs at least 2 trajectories")
    stacked = _stacked_states(ds)
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)  # population std
    flagged = tuple(int(d) for d in np.nonzero(std == 0.0)[0])
    scale = np.where(std == 0.0, 1.0, std)
    record = NormalizationRecord(mean=mean, scale=scale, zero_variance=flagged)
    trajs = tuple(
        Trajectory(t.id, (t.states - mean) / scale) for t in ds.trajectories
    )
    return TrajectoryDataset(trajs, labels=ds.labels, normalization=record)


def denormalize_dataset(ds: TrajectoryDataset) -> TrajectoryDataset:
    """Invert the transform recorded by :func:`normalize_dataset`."""
    rec = ds.normalization
    if rec is None:
        raise DataError("dataset carries no normalization record")
    trajs = tuple(
        Trajectory(t.id, t.states * rec.scale + rec.mean) for t in ds.trajectories
    )
    return TrajectoryDataset(trajs, labels=ds.labels, normalization=None)


def seeded_rng(seed: int) -> np.random.Generator:
    """A deterministic generator: identical seeds yield identical streams."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def substream(seed: int, name: str) -> np.random.Generator:
    """An independent named substream of the master seed.

    The stream depends only on (seed, name), so modules can draw from
    private streams without coordinating draw order.
    """
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    key = tuple(int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4))
    seq = np.random.SeedSequence(int(seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))
