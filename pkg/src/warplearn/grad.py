"""Exact forward-mode derivatives of the warping distance.

The parameter space is fixed at three coordinates (alpha, gamma,
epsilon), so forward mode with a single 3-partial dual number is optimal
and needs no tape.  The distance is a finite composition of sums and
minimums of differentiable step costs; the gradient follows the
tie-broken argmin branch at every cell, which is the exact derivative
wherever the argmin is locally stable (almost everywhere).

Two routes are provided: a fast kernel used by the optimizer, and a
generic dual-number dynamic program kept as an independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .core import DataError, Trajectory, WarpParams
from .warp import _check_pair

Partials = tuple[float, float, float]


@dataclass(frozen=True)
class Dual3:
    """A scalar with partials w.r.t. (alpha, gamma, epsilon)."""

    value: float
    partials: Partials = (0.0, 0.0, 0.0)

    @staticmethod
    def constant(x: float) -> "Dual3":
        return Dual3(float(x))

    @staticmethod
    def variable(x: float, index: int) -> "Dual3":
        p = [0.0, 0.0, 0.0]
        p[index] = 1.0
        return Dual3(float(x), tuple(p))

    @staticmethod
    def _lift(x) -> "Dual3":
        return x if isinstance(x, Dual3) else Dual3(float(x))

    def __add__(self, other) -> "Dual3":
        o = Dual3._lift(other)
        return Dual3(
            self.value + o.value,
            tuple(a + b for a, b in zip(self.partials, o.partials)),
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Dual3":
        o = Dual3._lift(other)
        return Dual3(
            self.value - o.value,
            tuple(a - b for a, b in zip(self.partials, o.partials)),
        )

    def __rsub__(self, other) -> "Dual3":
        return Dual3._lift(other).__sub__(self)

    def __mul__(self, other) -> "Dual3":
        o = Dual3._lift(other)
        return Dual3(
            self.value * o.value,
            tuple(
                a * o.value + self.value * b
                for a, b in zip(self.partials, o.partials)
            ),
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Dual3":
        o = Dual3._lift(other)
        if o.value == 0.0:
            raise ZeroDivisionError("Dual3 division by zero value")
        inv = 1.0 / o.value
        return Dual3(
            self.value * inv,
            tuple(
                (a * o.value - self.value * b) * inv * inv
                for a, b in zip(self.partials, o.partials)
            ),
        )

    def __rtruediv__(self, other) -> "Dual3":
        return Dual3._lift(other).__truediv__(self)

    def __neg__(self) -> "Dual3":
        return Dual3(-self.value, tuple(-a for a in self.partials))

    def tanh(self) -> "Dual3":
        t = math.tanh(self.value)
        sech2 = 1.0 - t * t
        return Dual3(t, tuple(sech2 * a for a in self.partials))


def dual_min(candidates: Sequence[Dual3]) -> Dual3:
    """Minimum by value; exact ties keep the earliest candidate, matching
    the DP tie-break order (diagonal, vertical, horizontal)."""
    best = candidates[0]
    for c in candidates[1:]:
        if c.value < best.value:
            best = c
    return best


def _check_interior(params: WarpParams) -> None:
    if params.alpha >= 1.0:
        raise DataError("gradient undefined at alpha = 1 (infinite gap coefficient)")
    if not (0.0 < params.epsilon < 1.0):
        raise DataError("gradient requires epsilon strictly inside (0, 1)")


def warp_distance_grad(
    params: WarpParams, t_a: Trajectory, t_b: Trajectory
) -> tuple[float, np.ndarray]:
    """Distance and its exact gradient w.r.t. (alpha, gamma, epsilon).

    The value matches :func:`warplearn.warp.warp_distance` bit-for-bit;
    the gradient differentiates along the tie-broken optimal path.
    """
    _check_interior(params)
    _check_pair(t_a, t_b)
    value, ga, gg, ge = _kernels._dp_grad(
        t_a.states, t_b.states, params.alpha, params.gamma, params.epsilon
    )
    return float(value), np.array([ga, gg, ge])


def warp_distance_dual(params: WarpParams, t_a: Trajectory, t_b: Trajectory) -> Dual3:
    """Reference dual-number DP, independent of the fast kernel.

    O(n*m) in dual arithmetic; used to cross-check the kernel gradients.
    """
    _check_interior(params)
    _check_pair(t_a, t_b)
    alpha = Dual3.variable(params.alpha, 0)
    gamma = Dual3.variable(params.gamma, 1)
    eps = Dual3.variable(params.epsilon, 2)
    a = alpha / (1.0 - alpha)
    tau = eps / (1.0 - eps)

    dists = np.asarray(_kernels._cell_dists(t_a.states, t_b.states))
    n, m = t_a.length, t_b.length

    def soft(x: float) -> Dual3:
        return tau * (Dual3.constant(x) / tau).tanh()

    acc: list[list[Dual3]] = [
        [Dual3.constant(0.0)] * (m + 1) for _ in range(n + 1)
    ]
    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            sv = soft(float(dists[i, j]))
            nd = a * sv + gamma
            candidates = []
            if i >= 1 and j >= 1:
                candidates.append(acc[i - 1][j - 1] + sv)
            if i >= 1:
                candidates.append(acc[i - 1][j] + nd)
            if j >= 1:
                candidates.append(acc[i][j - 1] + nd)
            acc[i][j] = dual_min(candidates)
    return acc[n][m]


def objective_grad(
    params: WarpParams,
    batch_close: Iterable[tuple[Trajectory, Trajectory]],
    batch_all: Iterable[tuple[Trajectory, Trajectory]],
) -> tuple[float, np.ndarray]:
    """Batched objective  sum_close d / sum_all d  and its gradient.

    The gradient follows the quotient rule over per-pair gradients; pairs
    are accumulated in list order so results are reproducible.
    """
    batch_close = list(batch_close)
    batch_all = list(batch_all)
    if not batch_close or not batch_all:
        raise DataError("objective needs non-empty batches")
    num = 0.0
    num_grad = np.zeros(3)
    for ta, tb in batch_close:
        v, g = warp_distance_grad(params, ta, tb)
        num += v
        num_grad += g
    den = 0.0
    den_grad = np.zeros(3)
    for ta, tb in batch_all:
        v, g = warp_distance_grad(params, ta, tb)
        den += v
        den_grad += g
    if den == 0.0:
        raise DataError(
            "all sampled pair distances are zero; resample the batches "
            "(the dataset may be degenerate)"
        )
    beta = num / den
    grad = (num_grad * den - num * den_grad) / (den * den)
    return beta, grad


def objective_value(
    params: WarpParams,
    batch_close: Iterable[tuple[Trajectory, Trajectory]],
    batch_all: Iterable[tuple[Trajectory, Trajectory]],
) -> float:
    """Plain (gradient-free) recomputation of the batched objective."""
    from .warp import warp_distance

    num = 0.0
    for ta, tb in batch_close:
        num += warp_distance(params, ta, tb)
    den = 0.0
    for ta, tb in batch_all:
        den += warp_distance(params, ta, tb)
    if den == 0.0:
        raise DataError(
            "all sampled pair distances are zero; resample the batches "
            "(the dataset may be degenerate)"
        )
    return num / den
