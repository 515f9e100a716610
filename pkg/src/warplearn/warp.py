"""The three-parameter warping-distance family.

A warping path traverses the (n+1) x (m+1) index grid from (0, 0) to
(n, m) by diagonal, vertical, or horizontal steps; index 0 denotes the
null state.  A diagonal step into cell (i, j) costs sigma(|a_i - b_j|,
tau); a non-diagonal step costs a * sigma(|a_i - b_j|, tau) + gamma with
a = alpha/(1-alpha) and tau = epsilon/(1-epsilon).  The distance is the
minimum total cost over all paths, computed by dynamic programming in
O(n*m); a brute-force path enumeration serves as an independent oracle
for small instances.

The null state sits at the origin of the (normalized) state space, so
border steps use the plain state norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import DataError, DistanceMatrix, Trajectory, TrajectoryDataset, WarpParams

_ORACLE_MAX = 16


def soft_threshold(x: float, y: float) -> float:
    """y * tanh(x / y), saturating x smoothly at level y; identity at y = inf."""
    if not (x >= 0.0) or not math.isfinite(x):
        raise DataError(f"soft_threshold requires finite x >= 0, got {x}")
    if not (y > 0.0):
        raise DataError(f"soft_threshold requires y > 0, got {y}")
    if math.isinf(y):
        return float(x)
    return y * math.tanh(x / y)


def _state_gap(a_state, b_state) -> float:
    if a_state is None and b_state is None:
        raise DataError("step_cost: at most one state may be null")
    if a_state is None:
        return float(np.linalg.norm(np.asarray(b_state, dtype=np.float64)))
    if b_state is None:
        return float(np.linalg.norm(np.asarray(a_state, dtype=np.float64)))
    a = np.asarray(a_state, dtype=np.float64)
    b = np.asarray(b_state, dtype=np.float64)
    return float(np.linalg.norm(a - b))


def step_cost(params: WarpParams, a_state, b_state, step_kind: str) -> float:
    """Cost of one path step into the cell pairing ``a_state`` with
    ``b_state`` (either may be None, the null state)."""
    gap = _state_gap(a_state, b_state)
    if step_kind == "diagonal":
        return soft_threshold(gap, params.tau)
    if step_kind == "nondiagonal":
        if params.alpha == 1.0:
            return math.inf
        return params.gap_coeff * soft_threshold(gap, params.tau) + params.gamma
    raise DataError(f"unknown step kind {step_kind!r}")


@dataclass(frozen=True)
class WarpPath:
    """An ordered sequence of index pairs from (0, 0) to (n, m)."""

    steps: tuple[tuple[int, int], ...]

    def __post_init__(self):
        steps = tuple((int(i), int(j)) for i, j in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps or steps[0] != (0, 0):
            raise DataError("warping path must start at (0, 0)")
        for (i0, j0), (i1, j1) in zip(steps, steps[1:]):
            if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
                raise DataError(
                    f"invalid path step from ({i0}, {j0}) to ({i1}, {j1})"
                )

    @property
    def end(self) -> tuple[int, int]:
        return self.steps[-1]


def _check_pair(t_a: Trajectory, t_b: Trajectory) -> None:
    if t_a.dim != t_b.dim:
        raise DataError(
            f"dimensional mismatch: {t_a.id!r} has D={t_a.dim}, "
            f"{t_b.id!r} has D={t_b.dim}"
        )


def warp_distance(params: WarpParams, t_a: Trajectory, t_b: Trajectory) -> float:
    """Minimum warping-path cost between two trajectories, O(n*m).

    Returns +inf for the alpha = 1 member on unequal lengths (every path
    then needs a non-diagonal step of infinite cost).
    """
    _check_pair(t_a, t_b)
    return float(
        _kernels._dp_distance(
            t_a.states, t_b.states, params.gap_coeff, params.tau, params.gamma
        )
    )


def warp_path(params: WarpParams, t_a: Trajectory, t_b: Trajectory) -> tuple[float, WarpPath]:
    """Distance plus the tie-broken optimal path (diagonal preferred,
    then vertical, then horizontal)."""
    _check_pair(t_a, t_b)
    value, choice = _kernels._dp_choices(
        t_a.states, t_b.states, params.gap_coeff, params.tau, params.gamma
    )
    if not math.isfinite(value):
        raise DataError("optimal path is undefined at infinite distance")
    i, j = t_a.length, t_b.length
    rev = [(i, j)]
    while i != 0 or j != 0:
        ch = choice[i, j]
        if ch == 0:
            i, j = i - 1, j - 1
        elif ch == 1:
            i -= 1
        else:
            j -= 1
        rev.append((i, j))
    return float(value), WarpPath(tuple(reversed(rev)))


def oracle_distance(
    params: WarpParams, t_a: Trajectory, t_b: Trajectory
) -> tuple[float, WarpPath]:
    """Exhaustive minimum over every valid warping path (n+m <= 16).

    Independent of the DP: enumerates paths recursively and sums step
    costs directly.
    """
    _check_pair(t_a, t_b)
    n, m = t_a.length, t_b.length
    if n + m > _ORACLE_MAX:
        raise DataError(f"oracle enumeration capped at n+m <= {_ORACLE_MAX}, got {n + m}")

    dists = np.asarray(_kernels._cell_dists(t_a.states, t_b.states))
    tau = params.tau
    if math.isinf(tau):
        diag_cost = dists.copy()
    else:
        diag_cost = tau * np.tanh(dists / tau)
    if params.alpha == 1.0:
        nond_cost = np.full_like(dists, math.inf)
    else:
        nond_cost = params.gap_coeff * diag_cost + params.gamma

    best_cost = math.inf
    best_path: list[tuple[int, int]] | None = None
    path: list[tuple[int, int]] = [(0, 0)]

    def visit(i: int, j: int, cost: float) -> None:
        nonlocal best_cost, best_path
        if i == n and j == m:
            if cost < best_cost:
                best_cost = cost
                best_path = list(path)
            return
        if i < n and j < m:
            path.append((i + 1, j + 1))
            visit(i + 1, j + 1, cost + diag_cost[i + 1, j + 1])
            path.pop()
        if i < n:
            path.append((i + 1, j))
            visit(i + 1, j, cost + nond_cost[i + 1, j])
            path.pop()
        if j < m:
            path.append((i, j + 1))
            visit(i, j + 1, cost + nond_cost[i, j + 1])
            path.pop()

    visit(0, 0, 0.0)
    if best_path is None:
        # All paths infinite (alpha = 1, unequal lengths): report any path.
        best_path = [(0, 0)] + [(i, 0) for i in range(1, n + 1)] + [
            (n, j) for j in range(1, m + 1)
        ]
    return best_cost, WarpPath(tuple(best_path))


def preset(name: str, gamma0: float | None = None, epsilon0: float | None = None) -> WarpParams:
    """Named members of the family: euclidean (1,0,1), dtw (0.5,0,1),
    edit(g0) = (0,g0,1), edr(g0,e0) = (0,g0,e0)."""
    if name == "euclidean":
        _reject_extras(name, gamma0, epsilon0)
        return WarpParams(1.0, 0.0, 1.0)
    if name == "dtw":
        _reject_extras(name, gamma0, epsilon0)
        return WarpParams(0.5, 0.0, 1.0)
    if name == "edit":
        if gamma0 is None or not gamma0 > 0:
            raise DataError("edit preset requires gamma0 > 0")
        if epsilon0 is not None:
            raise DataError("edit preset takes no epsilon0")
        return WarpParams(0.0, float(gamma0), 1.0)
    if name == "edr":
        if gamma0 is None or not gamma0 > 0:
            raise DataError("edr preset requires gamma0 > 0")
        if epsilon0 is None or not (0.0 < epsilon0 < 1.0):
            raise DataError("edr preset requires 0 < epsilon0 < 1")
        return WarpParams(0.0, float(gamma0), float(epsilon0))
    raise DataError(f"unknown preset {name!r}")


def _reject_extras(name: str, gamma0, epsilon0) -> None:
    if gamma0 is not None or epsilon0 is not None:
        raise DataError(f"preset {name!r} takes no extra parameters")


def pairwise_distances(params: WarpParams, ds: TrajectoryDataset) -> DistanceMatrix:
    """Distance matrix over the dataset; each unordered pair evaluated once."""
    t = ds.size
    out = np.zeros((t, t))
    if t > 1:
        flat = np.concatenate([tr.states for tr in ds.trajectories], axis=0)
        offsets = np.zeros(t + 1, dtype=np.int64)
        for k, tr in enumerate(ds.trajectories):
            offsets[k + 1] = offsets[k] + tr.length
        _kernels._pairwise(flat, offsets, params.gap_coeff, params.tau, params.gamma, out)
    return DistanceMatrix(tuple(ds.ids), out)
