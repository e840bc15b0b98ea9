"""Variance-reduced randomized-smoothing solver and the four baselines.

All five runners take (problem, config) and emit a RunTrace with one record
per epoch. The variance-reduced solver defines the per-epoch gradient-call
budgets N*m + 2*m*M_s; the baselines spend the same cumulative budget and
place their trace points at those epoch boundaries, so traces are directly
comparable on the gradient-call axis.

Randomness is drawn from two streams per run (component indices, and
perturbations keyed by epoch) so that runs with the same seed are
reproducible bitwise and arms of a study share their draws; see rng.py.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import kernels
from . import rng as streams
from .errors import ConfigurationError, SolverDivergedError
from .objective import (CompositeProblem, Point, as_point, evaluate_objective,
                        prox_step)
from .smoothing import (PerturbationBatch, SmoothingDistribution,
                        make_distribution, smoothed_component_grad)

SOLVER_NAMES = ("rs_svrg", "prox_sgd", "prox_fgd", "rs_sgd", "rs_sag")


@dataclass(frozen=True)
class EpochSchedule:
    """Per-epoch constants: radius a_s = a0*phi^s, step gamma_s =
    a_s/(c_step*l1), inner count M_s = 2^s*M (optionally capped).

    l1 is the smoothed-gradient Lipschitz constant of the problem at unit
    radius (distribution l1_factor times L0). c_step defaults to the rate
    theorem's divisor 25.
    """

    a0: float
    phi: float
    M: int
    l1: float
    c_step: float = 25.0
    m_cap: Optional[int] = None

    def __post_init__(self):
        if not self.a0 > 0:
            raise ConfigurationError("a0 must be positive")
        if not 0 < self.phi < 1:
            raise ConfigurationError("phi must lie in (0, 1)")
        if self.M < 1:
            raise ConfigurationError("M must be >= 1")
        if not self.l1 > 0:
            raise ConfigurationError("l1 must be positive")
        if not self.c_step > 0:
            raise ConfigurationError("c_step must be positive")
        if self.m_cap is not None and self.m_cap < 1:
            raise ConfigurationError("m_cap must be >= 1 when given")

    def radius(self, s: int) -> float:
        return self.a0 * self.phi ** s

    def step_size(self, s: int) -> float:
        return self.radius(s) / (self.c_step * self.l1)

    def inner_count(self, s: int) -> int:
        n = (2 ** s) * self.M
        if self.m_cap is not None:
            n = min(n, self.m_cap)
        return n


@dataclass(frozen=True)
class SolverConfig:
    solver: str
    schedule: EpochSchedule
    m_samples: int = 5
    epochs: int = 10
    seed: int = 0
    x_init: Optional[np.ndarray] = None
    dist: Optional[SmoothingDistribution] = None

    def __post_init__(self):
        if self.solver not in SOLVER_NAMES:
            raise ConfigurationError(f"unknown solver {self.solver!r}")
        if self.m_samples < 1:
            raise ConfigurationError("m_samples must be >= 1")
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    anchor_objective: float
    grad_evals: int
    wall_ms: float


@dataclass
class RunTrace:
    solver: str
    seed: int
    records: List[EpochRecord]
    final_x: np.ndarray

    def objectives(self) -> np.ndarray:
        return np.array([r.anchor_objective for r in self.records])

    def grad_evals(self) -> np.ndarray:
        return np.array([r.grad_evals for r in self.records])


def epoch_budgets(n_components: int, config: SolverConfig) -> np.ndarray:
    """Cumulative gradient-call budgets at the epoch boundaries.

    Epoch s of the variance-reduced solver is charged N*m anchor calls plus
    2*m per inner step (current point and anchor point), whether or not the
    implementation caches the anchor values.
    """
    m = config.m_samples
    deltas = [n_components * m + 2 * m * config.schedule.inner_count(s)
              for s in range(1, config.epochs + 1)]
    return np.cumsum(deltas)


def variance_reduced_gradient(g_cur_i: Point, g_anchor_i: Point,
                              g_anchor_full: Point) -> Point:
    """v = g_i(x) - g_i(anchor) + g(anchor)."""
    g_cur_i = np.asarray(g_cur_i, dtype=np.float64)
    if g_cur_i.shape != np.shape(g_anchor_i) or g_cur_i.shape != np.shape(g_anchor_full):
        raise ConfigurationError("variance_reduced_gradient: dimension mismatch")
    return g_cur_i - g_anchor_i + g_anchor_full


def _distribution(problem: CompositeProblem, config: SolverConfig) -> SmoothingDistribution:
    if config.dist is None:
        return make_distribution("gaussian", problem.dim)
    if config.dist.dim != problem.dim:
        raise ConfigurationError(
            f"distribution dim {config.dist.dim} != problem dim {problem.dim}")
    return config.dist


def _initial_point(problem: CompositeProblem, config: SolverConfig) -> np.ndarray:
    if config.x_init is None:
        return np.zeros(problem.dim)
    return as_point(config.x_init, problem.dim).copy()


def _require(config: SolverConfig, name: str) -> None:
    if config.solver != name:
        raise ConfigurationError(f"config.solver is {config.solver!r}, expected {name!r}")


def _diverged(solver: str, s: int, t: int, gamma: float) -> SolverDivergedError:
    return SolverDivergedError(
        f"{solver} produced a non-finite iterate at epoch {s}, step {t} "
        f"(step size {gamma:.3e}); check the step/Lipschitz configuration")


def _check_finite(x: np.ndarray, solver: str, s: int, t: int, gamma: float) -> None:
    if not np.all(np.isfinite(x)):
        raise _diverged(solver, s, t, gamma)


def run_rs_svrg(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Epoch-doubling variance-reduced descent on the smoothed objective.

    Per epoch: draw one m-sample perturbation batch at radius a_s, compute
    all component gradients at the anchor and their average, then run M_s
    proximal steps with the variance-reduced direction, reusing the same
    batch for the inner-loop gradients. The next anchor is the epoch
    average of the inner iterates; the inner loop itself warm-starts from
    the last iterate.
    """
    _require(config, "rs_svrg")
    sched = config.schedule
    N, d, m = problem.n_components, problem.dim, config.m_samples
    dist = _distribution(problem, config)
    reg = problem.regularizer
    x = _initial_point(problem, config)
    x_tilde = x.copy()
    U = problem.hinge_diffs
    engine = kernels.get_engine()
    irng = streams.index_stream(config.seed)
    evals = 0
    t0 = time.perf_counter()
    records: List[EpochRecord] = []

    for s in range(1, config.epochs + 1):
        a = sched.radius(s)
        gamma = sched.step_size(s)
        inner = sched.inner_count(s)
        Z = dist.sample(streams.epoch_stream(config.seed, s), m)
        idx = irng.integers(0, N, inner)
        x_sum = np.zeros(d)

        if U is not None:
            uz = np.ascontiguousarray(U @ Z.T)  # N x m perturbation margins
            anchor_coefs = np.count_nonzero(
                (U @ x_tilde)[:, None] + a * uz < 1.0, axis=1) / m
            g_full = -(U.T @ anchor_coefs) / N
            bad = engine.svrg_epoch(U, uz, anchor_coefs, g_full,
                                    idx.astype(np.int64), x, x_sum,
                                    gamma, a, reg.lam1, reg.lam2)
            if bad >= 0:
                raise _diverged("rs_svrg", s, int(bad), gamma)
        else:
            batch = PerturbationBatch(Z, a, s)
            anchor_grads = np.stack(
                [smoothed_component_grad(problem, i, x_tilde, batch)
                 for i in range(1, N + 1)])
            g_full = anchor_grads.mean(axis=0)
            for t in range(inner):
                i = int(idx[t])
                g_cur = smoothed_component_grad(problem, i + 1, x, batch)
                v = g_cur - anchor_grads[i] + g_full
                x = prox_step(reg, x - gamma * v, gamma)
                _check_finite(x, "rs_svrg", s, t, gamma)
                x_sum += x

        evals += N * m + 2 * m * inner
        x_tilde = x_sum / inner
        records.append(EpochRecord(s, evaluate_objective(problem, x_tilde), evals,
                                   (time.perf_counter() - t0) * 1e3))

    return RunTrace("rs_svrg", config.seed, records, x_tilde.copy())


def _hinge_component_subgrad(U: np.ndarray, i: int, x: np.ndarray) -> np.ndarray:
    if U[i] @ x < 1.0:
        return -U[i]
    return np.zeros(x.shape[0])


def run_prox_sgd(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Plain proximal stochastic subgradient descent, gamma_t = 1/sqrt(t).

    No smoothing. Runs one step per component-subgradient call up to the
    total epoch-boundary budget, recording at each boundary.
    """
    _require(config, "prox_sgd")
    N, d = problem.n_components, problem.dim
    reg = problem.regularizer
    budgets = epoch_budgets(N, config)
    x = _initial_point(problem, config)
    U = problem.hinge_diffs
    idx = streams.index_stream(config.seed).integers(0, N, int(budgets[-1]))
    t0 = time.perf_counter()
    records: List[EpochRecord] = []
    k = 0
    for t in range(1, int(budgets[-1]) + 1):
        i = int(idx[t - 1])
        if U is not None:
            g = _hinge_component_subgrad(U, i, x)
        else:
            g = np.asarray(problem.component_subgrad(i + 1, x), dtype=np.float64)
        gamma = 1.0 / np.sqrt(t)
        x = prox_step(reg, x - gamma * g, gamma)
        _check_finite(x, "prox_sgd", k + 1, t, gamma)
        if k < len(budgets) and t == budgets[k]:
            records.append(EpochRecord(k + 1, evaluate_objective(problem, x), t,
                                       (time.perf_counter() - t0) * 1e3))
            k += 1
    return RunTrace("prox_sgd", config.seed, records, x.copy())


def run_prox_fgd(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Proximal full-subgradient descent with the constant step a0/(c_step*l1)."""
    _require(config, "prox_fgd")
    N, d = problem.n_components, problem.dim
    reg = problem.regularizer
    budgets = epoch_budgets(N, config)
    gamma = config.schedule.step_size(0)
    x = _initial_point(problem, config)
    U = problem.hinge_diffs
    step_targets = budgets // N  # last full step within each budget
    steps = int(step_targets[-1])
    t0 = time.perf_counter()
    records: List[EpochRecord] = []
    k = 0
    for t in range(1, steps + 1):
        if U is not None:
            active = (U @ x < 1.0).astype(np.float64)
            g = -(U.T @ active) / N
        else:
            g = np.zeros(d)
            for i in range(1, N + 1):
                g += np.asarray(problem.component_subgrad(i, x), dtype=np.float64)
            g /= N
        x = prox_step(reg, x - gamma * g, gamma)
        _check_finite(x, "prox_fgd", k + 1, t, gamma)
        while k < len(step_targets) and t == step_targets[k]:
            records.append(EpochRecord(k + 1, evaluate_objective(problem, x), t * N,
                                       (time.perf_counter() - t0) * 1e3))
            k += 1
    return RunTrace("prox_fgd", config.seed, records, x.copy())


def _fresh_batch_grad(problem, dist, i, x, radius, m, prng):
    """Smoothed gradient of one component with a batch drawn on the spot."""
    U = problem.hinge_diffs
    Z = dist.sample(prng, m)
    if U is not None:
        u = U[i]
        cur = np.count_nonzero(u @ x + radius * (Z @ u) < 1.0) / m
        return -cur * u
    batch = PerturbationBatch(Z, radius)
    return smoothed_component_grad(problem, i + 1, x, batch)


def run_rs_sgd(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Smoothed stochastic subgradient descent at a fixed radius a0*phi.

    Each step draws its own fresh m-sample batch (no variance reduction, no
    radius decay), with the diminishing step gamma_t = 1/sqrt(t).
    """
    _require(config, "rs_sgd")
    N, m = problem.n_components, config.m_samples
    dist = _distribution(problem, config)
    reg = problem.regularizer
    budgets = epoch_budgets(N, config)
    radius = config.schedule.radius(1)
    x = _initial_point(problem, config)
    step_targets = budgets // m
    steps = int(step_targets[-1])
    idx = streams.index_stream(config.seed).integers(0, N, steps)
    prng = streams.epoch_stream(config.seed, 0)
    t0 = time.perf_counter()
    records: List[EpochRecord] = []
    k = 0
    for t in range(1, steps + 1):
        g = _fresh_batch_grad(problem, dist, int(idx[t - 1]), x, radius, m, prng)
        gamma = 1.0 / np.sqrt(t)
        x = prox_step(reg, x - gamma * g, gamma)
        _check_finite(x, "rs_sgd", k + 1, t, gamma)
        while k < len(step_targets) and t == step_targets[k]:
            records.append(EpochRecord(k + 1, evaluate_objective(problem, x), t * m,
                                       (time.perf_counter() - t0) * 1e3))
            k += 1
    return RunTrace("rs_sgd", config.seed, records, x.copy())


def run_rs_sag(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Stochastic average gradient on the smoothed components.

    Keeps a table of the last smoothed gradient seen per component
    (zero-initialized, averaged over all N entries). Each step refreshes
    the drawn component's entry with a fresh batch at radius a0*phi, then
    steps with the table average and the constant step a0/(c_step*l1).
    """
    _require(config, "rs_sag")
    N, d, m = problem.n_components, problem.dim, config.m_samples
    dist = _distribution(problem, config)
    reg = problem.regularizer
    budgets = epoch_budgets(N, config)
    radius = config.schedule.radius(1)
    gamma = config.schedule.step_size(0)
    x = _initial_point(problem, config)
    table = np.zeros((N, d))
    table_avg = np.zeros(d)
    step_targets = budgets // m
    steps = int(step_targets[-1])
    idx = streams.index_stream(config.seed).integers(0, N, steps)
    prng = streams.epoch_stream(config.seed, 0)
    t0 = time.perf_counter()
    records: List[EpochRecord] = []
    k = 0
    for t in range(1, steps + 1):
        i = int(idx[t - 1])
        g_new = _fresh_batch_grad(problem, dist, i, x, radius, m, prng)
        table_avg = table_avg + (g_new - table[i]) / N
        table[i] = g_new
        x = prox_step(reg, x - gamma * table_avg, gamma)
        _check_finite(x, "rs_sag", k + 1, t, gamma)
        while k < len(step_targets) and t == step_targets[k]:
            records.append(EpochRecord(k + 1, evaluate_objective(problem, x), t * m,
                                       (time.perf_counter() - t0) * 1e3))
            k += 1
    return RunTrace("rs_sag", config.seed, records, x.copy())


_RUNNERS = {
    "rs_svrg": run_rs_svrg,
    "prox_sgd": run_prox_sgd,
    "prox_fgd": run_prox_fgd,
    "rs_sgd": run_rs_sgd,
    "rs_sag": run_rs_sag,
}


def run(problem: CompositeProblem, config: SolverConfig) -> RunTrace:
    """Dispatch to the runner named by config.solver."""
    return _RUNNERS[config.solver](problem, config)
