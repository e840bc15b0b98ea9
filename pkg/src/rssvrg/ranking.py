"""Synthetic bipartite-ranking instances with hinge component losses.

Each training pair contributes f_i(w) = max{1 - u_i^T w, 0} where u_i is
the difference of the pair's feature vectors, both drawn i.i.d. uniform on
[0, feature_high] per entry. The bias of a linear ranker cancels in the
difference, so the decision variable is just w.

Features are intentionally NOT standardized: with the default range the
component Lipschitz constants are of order 1e2*sqrt(d), and the schedule
constants have to absorb that. The bound calculators make the effect
visible instead of hiding it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as streams
from .errors import ConfigurationError
from .objective import CompositeProblem, Regularizer

REG_SETTINGS = ("lasso", "ridge", "elastic")
_REG_WEIGHT = 0.01


def regularizer_for(reg_setting: str) -> Regularizer:
    if reg_setting == "lasso":
        return Regularizer.l1(_REG_WEIGHT)
    if reg_setting == "ridge":
        return Regularizer.ridge(_REG_WEIGHT)
    if reg_setting == "elastic":
        return Regularizer.elastic_net(_REG_WEIGHT, _REG_WEIGHT)
    raise ConfigurationError(f"unknown reg setting {reg_setting!r}")


@dataclass(frozen=True)
class RankingInstance:
    n_pairs: int
    dim: int
    diffs: np.ndarray  # n_pairs x dim, entries in [-feature_high, feature_high]
    reg_setting: str
    feature_high: float = 100.0

    def __post_init__(self):
        if self.reg_setting not in REG_SETTINGS:
            raise ConfigurationError(f"unknown reg setting {self.reg_setting!r}")
        if self.diffs.shape != (self.n_pairs, self.dim):
            raise ConfigurationError("diffs shape does not match n_pairs x dim")
        if np.abs(self.diffs).max() > self.feature_high:
            raise ConfigurationError("difference entries exceed the feature range")


def generate_instance(n_pairs: int, dim: int, seed: int,
                      reg_setting: str = "ridge",
                      feature_high: float = 100.0) -> RankingInstance:
    """Draw n_pairs feature-vector pairs and keep their differences."""
    if n_pairs < 1 or dim < 1:
        raise ConfigurationError("n_pairs and dim must be positive")
    rng = streams.instance_stream(seed)
    x_feats = rng.uniform(0.0, feature_high, (n_pairs, dim))
    y_feats = rng.uniform(0.0, feature_high, (n_pairs, dim))
    return RankingInstance(n_pairs, dim, x_feats - y_feats, reg_setting, feature_high)


def to_problem(instance: RankingInstance) -> CompositeProblem:
    """Composite problem with hinge components over the difference vectors.

    The subgradient convention at the hinge kink (margin exactly 1) is the
    zero vector, i.e. the flat side.
    """
    U = np.ascontiguousarray(instance.diffs, dtype=np.float64)
    n, d = U.shape
    norms = np.linalg.norm(U, axis=1)

    def value(i: int, w: np.ndarray) -> float:
        return float(max(1.0 - U[i - 1] @ w, 0.0))

    def subgrad(i: int, w: np.ndarray) -> np.ndarray:
        if U[i - 1] @ w < 1.0:
            return -U[i - 1]
        return np.zeros(d)

    return CompositeProblem(
        dim=d,
        n_components=n,
        component_subgrad=subgrad,
        component_value=value,
        regularizer=regularizer_for(instance.reg_setting),
        lipschitz_l0=float(norms.max()),
        component_lipschitz=norms,
        hinge_diffs=U,
    )


def export_csv(instance: RankingInstance, path) -> None:
    """One row per pair, the entries of u_i, 17 significant digits."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        for row in instance.diffs:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def import_csv(path, reg_setting: str = "ridge",
               feature_high: float = 100.0) -> RankingInstance:
    diffs = np.atleast_2d(np.loadtxt(path, delimiter=",", dtype=np.float64))
    return RankingInstance(diffs.shape[0], diffs.shape[1], diffs,
                           reg_setting, feature_high)
