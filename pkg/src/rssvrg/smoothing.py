"""Randomized smoothing: F_a(x) = E[F(x + a*Z)] for three perturbation laws.

The smoothed gradient estimators here are plain averages of component
subgradients at perturbed points; everything is deterministic given the
drawn batch, and batches are deterministic given a seeded stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import ConfigurationError
from .objective import CompositeProblem, Point, as_point

DIST_KINDS = ("uniform_l2_ball", "gaussian", "uniform_linf_ball")

# CLI spellings
_ALIASES = {
    "l2ball": "uniform_l2_ball",
    "gaussian": "gaussian",
    "linfball": "uniform_linf_ball",
}


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class SmoothingDistribution:
    """One of uniform-l2-ball, standard Gaussian, uniform-linf-ball on R^d."""

    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in DIST_KINDS:
            raise ConfigurationError(f"unknown smoothing distribution {self.kind!r}")
        if self.dim < 1:
            raise ConfigurationError("dim must be positive")

    def sample(self, rng: np.random.Generator, m: int) -> np.ndarray:
        """m i.i.d. draws, one per row."""
        if m < 1:
            raise ConfigurationError("sample count m must be >= 1")
        d = self.dim
        if self.kind == "gaussian":
            return rng.standard_normal((m, d))
        if self.kind == "uniform_linf_ball":
            return rng.uniform(-1.0, 1.0, (m, d))
        # uniform in the unit l2 ball: direction x radial U^(1/d), exact
        # and rejection-free in any dimension
        g = rng.standard_normal((m, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = rng.uniform(0.0, 1.0, (m, 1)) ** (1.0 / d)
        return g * r

    @property
    def cli_name(self) -> str:
        return {v: k for k, v in _ALIASES.items()}[self.kind]


def make_distribution(name: str, dim: int) -> SmoothingDistribution:
    """Accepts both the CLI spellings and the full kind names."""
    kind = _ALIASES.get(name, name)
    return SmoothingDistribution(kind, dim)


@dataclass(frozen=True)
class DistributionConstants:
    """Factors tying a distribution to the convergence theory.

    Smoothed F has gradient Lipschitz constant l1_factor*L0/a; the smoothing
    bias obeys F_a <= F + bias_factor*L0*a; the m-sample estimator variance
    is bounded by variance_factor*L0^2/m. The table is read off the
    distribution-specific convergence bounds and validated empirically by
    the sandwich tests rather than trusted blindly.
    """

    l1_factor: float
    bias_factor: float
    variance_factor: float

    def __post_init__(self):
        if min(self.l1_factor, self.bias_factor, self.variance_factor) <= 0:
            raise ConfigurationError("distribution constants must be positive")


def constants_for(dist: SmoothingDistribution) -> DistributionConstants:
    d = dist.dim
    if dist.kind == "uniform_l2_ball":
        return DistributionConstants(math.sqrt(d), 1.0, 1.0)
    if dist.kind == "gaussian":
        return DistributionConstants(1.0, math.sqrt(d), 1.0)
    return DistributionConstants(1.0, d / 2.0, 4.0)


@dataclass(frozen=True)
class PerturbationBatch:
    """m perturbation directions with the radius they will be scaled by."""

    samples: np.ndarray  # m x d
    radius: float
    epoch: int = 0

    def __post_init__(self):
        if self.samples.ndim != 2 or self.samples.shape[0] < 1:
            raise ConfigurationError("batch needs at least one sample row")
        if not self.radius > 0:
            raise ConfigurationError("batch radius must be positive")

    @property
    def m(self) -> int:
        return self.samples.shape[0]


def sample_batch(dist: SmoothingDistribution, m: int, radius: float,
                 rng: np.random.Generator, epoch: int = 0) -> PerturbationBatch:
    if m < 1:
        raise ConfigurationError("sample count m must be >= 1")
    if not radius > 0:
        raise ConfigurationError("radius must be positive")
    return PerturbationBatch(dist.sample(rng, m), radius, epoch)


def smoothed_component_grad(problem: CompositeProblem, i: int, x: Point,
                            batch: PerturbationBatch) -> Point:
    """(1/m) sum_j subgrad of f_i at x + radius*Z_j."""
    problem.check_index(i)
    x = as_point(x, problem.dim)
    acc = np.zeros(problem.dim)
    for j in range(batch.m):
        acc += problem.component_subgrad(i, x + batch.radius * batch.samples[j])
    return acc / batch.m


def smoothed_full_grad(problem: CompositeProblem, x: Point,
                       batch: PerturbationBatch) -> Point:
    """Average of smoothed_component_grad over all components.

    Hinge problems take a vectorized path computing the same counts the
    per-component oracle would; others loop.
    """
    x = as_point(x, problem.dim)
    U = problem.hinge_diffs
    if U is not None:
        shifts = U @ (batch.radius * batch.samples.T)  # N x m
        coefs = np.count_nonzero((U @ x)[:, None] + shifts < 1.0, axis=1) / batch.m
        return -(U.T @ coefs) / problem.n_components
    acc = np.zeros(problem.dim)
    for i in range(1, problem.n_components + 1):
        acc += smoothed_component_grad(problem, i, x, batch)
    return acc / problem.n_components


def estimate_smoothed_value(problem: CompositeProblem, dist: SmoothingDistribution,
                            x: Point, radius: float, n_mc: int,
                            rng: np.random.Generator) -> Tuple[float, float]:
    """Monte-Carlo estimate of F_radius(x) = E[F(x + radius*Z)].

    Returns (mean, stderr) with stderr the sample standard deviation over
    the n_mc draws divided by sqrt(n_mc).
    """
    if n_mc < 2:
        raise ConfigurationError("n_mc must be >= 2")
    if not radius > 0:
        raise ConfigurationError("radius must be positive")
    x = as_point(x, problem.dim)
    vals = np.empty(n_mc)
    chunk = max(1, min(n_mc, 20_000_000 // max(1, problem.n_components)))
    done = 0
    while done < n_mc:
        k = min(chunk, n_mc - done)
        Z = dist.sample(rng, k)
        vals[done:done + k] = problem.value_batch(x[None, :] + radius * Z)
        done += k
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(n_mc))
    return mean, stderr
