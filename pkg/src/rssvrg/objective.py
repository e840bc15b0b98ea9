"""Composite objectives P(x) = (1/N) sum_i f_i(x) + R(x).

Points are plain 1-D float64 numpy arrays. Component oracles are 1-based:
``i`` runs over 1..N, matching the usual finite-sum indexing, and anything
outside that range is a fatal input error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError

Point = np.ndarray

REG_KINDS = ("none", "l1", "ridge", "elastic_net")


def as_point(x, dim: Optional[int] = None) -> Point:
    """Coerce to a finite 1-D float64 vector, optionally checking length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ConfigurationError(f"point must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ConfigurationError(f"dimension mismatch: expected {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigurationError("point has non-finite entries")
    return arr


@dataclass(frozen=True)
class Regularizer:
    """R(x) = lam1*||x||_2^2 + lam2*||x||_1, restricted by ``kind``.

    kind is one of {none, l1, ridge, elastic_net}; the inactive weight is
    forced to zero so value() and prox_step() cannot disagree with the kind.
    """

    kind: str
    lam1: float = 0.0
    lam2: float = 0.0

    def __post_init__(self):
        if self.kind not in REG_KINDS:
            raise ConfigurationError(f"unknown regularizer kind {self.kind!r}")
        if self.lam1 < 0 or self.lam2 < 0:
            raise ConfigurationError("regularizer weights must be nonnegative")
        if self.kind == "none" and (self.lam1 or self.lam2):
            raise ConfigurationError("kind 'none' takes no weights")
        if self.kind == "l1" and self.lam1:
            raise ConfigurationError("kind 'l1' takes lam2 only")
        if self.kind == "ridge" and self.lam2:
            raise ConfigurationError("kind 'ridge' takes lam1 only")

    @staticmethod
    def none() -> "Regularizer":
        return Regularizer("none")

    @staticmethod
    def l1(lam2: float) -> "Regularizer":
        return Regularizer("l1", 0.0, lam2)

    @staticmethod
    def ridge(lam1: float) -> "Regularizer":
        return Regularizer("ridge", lam1, 0.0)

    @staticmethod
    def elastic_net(lam1: float, lam2: float) -> "Regularizer":
        return Regularizer("elastic_net", lam1, lam2)

    def value(self, x: Point) -> float:
        if self.kind == "none":
            return 0.0
        return float(self.lam1 * (x @ x) + self.lam2 * np.abs(x).sum())


def prox_step(reg: Regularizer, y: Point, gamma: float) -> Point:
    """argmin_x { 0.5*||x - y||^2 + gamma*R(x) }, coordinatewise closed form.

    Soft-threshold by gamma*lam2, then scale by 1/(1 + 2*gamma*lam1). Exact
    for all four kinds since R is separable.
    """
    if not gamma > 0:
        raise ConfigurationError(f"prox step size must be positive, got {gamma}")
    y = np.asarray(y, dtype=np.float64)
    if reg.kind == "none":
        return y.copy()
    out = np.sign(y) * np.maximum(np.abs(y) - gamma * reg.lam2, 0.0)
    out /= 1.0 + 2.0 * gamma * reg.lam1
    return out


@dataclass(frozen=True)
class CompositeProblem:
    """Finite-sum objective with a proximable regularizer.

    component_subgrad(i, x) returns one element of the subdifferential of
    f_i at x, deterministically (the problem fixes a tie-break rule at
    kinks); component_value(i, x) returns f_i(x). Both take i in 1..N.

    hinge_diffs, when set, is the N x d matrix of difference vectors of a
    hinge ranking problem; solvers use it to take a vectorized fast path
    that is algebraically identical to calling the oracles.
    """

    dim: int
    n_components: int
    component_subgrad: Callable[[int, Point], Point]
    component_value: Callable[[int, Point], float]
    regularizer: Regularizer
    lipschitz_l0: float
    component_lipschitz: Optional[np.ndarray] = None
    hinge_diffs: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1 or self.n_components < 1:
            raise ConfigurationError("dim and n_components must be positive")
        if self.lipschitz_l0 < 0:
            raise ConfigurationError("lipschitz_l0 must be nonnegative")

    def lipschitz_vector(self) -> np.ndarray:
        """Per-component constants; defaults to L0 for every component."""
        if self.component_lipschitz is not None:
            return np.asarray(self.component_lipschitz, dtype=np.float64)
        return np.full(self.n_components, self.lipschitz_l0)

    def check_index(self, i: int) -> None:
        if not 1 <= i <= self.n_components:
            raise ConfigurationError(
                f"component index {i} out of range 1..{self.n_components}")

    def value_batch(self, xs: np.ndarray) -> np.ndarray:
        """F at each row of xs (k x d) -> length-k vector.

        Vectorized for hinge problems, plain loop otherwise. Used by the
        Monte-Carlo smoothing estimators where k is large.
        """
        xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
        if self.hinge_diffs is not None:
            margins = xs @ self.hinge_diffs.T  # k x N
            return np.maximum(1.0 - margins, 0.0).mean(axis=1)
        out = np.empty(xs.shape[0])
        for k in range(xs.shape[0]):
            out[k] = sum(self.component_value(i, xs[k])
                         for i in range(1, self.n_components + 1)) / self.n_components
        return out


def evaluate_objective(problem: CompositeProblem, x: Point) -> float:
    """P(x) = (1/N) sum_i f_i(x) + R(x). Deterministic."""
    x = as_point(x, problem.dim)
    return float(problem.value_batch(x[None, :])[0]) + problem.regularizer.value(x)


def component_subgradient(problem: CompositeProblem, i: int, x: Point) -> Point:
    """One deterministic element of the subdifferential of f_i at x."""
    problem.check_index(i)
    x = as_point(x, problem.dim)
    return np.asarray(problem.component_subgrad(i, x), dtype=np.float64)


def component_value(problem: CompositeProblem, i: int, x: Point) -> float:
    problem.check_index(i)
    x = as_point(x, problem.dim)
    return float(problem.component_value(i, x))
