"""Experiment harness: reference optimum, bound calculators, variance
diagnostics, solver comparisons, and the sampling/dimension studies.

The reference optimum is a computed UPPER bound on the true minimum (the
best objective value actually evaluated by a large-budget recipe), so
optimality gaps can come out a hair negative for a run that beats it;
gaps are clamped at a -1e-9 tolerance and anything below that aborts with
a request for a larger reference budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import rng as streams
from .errors import ConfigurationError
from .objective import (CompositeProblem, Point, as_point, evaluate_objective,
                        prox_step)
from .ranking import generate_instance, to_problem
from .smoothing import (SmoothingDistribution, constants_for,
                        make_distribution, sample_batch,
                        smoothed_component_grad)
from .solvers import (EpochSchedule, RunTrace, SolverConfig, SOLVER_NAMES,
                      epoch_budgets, run, run_rs_svrg)

CSV_HEADER = "run_id,solver,dist,seed,epoch,grad_evals,objective,gap,wall_ms"
GAP_CLAMP_TOL = -1e-9

STUDY_AXES = ("sampling_m", "dimension_d")
DEFAULT_M_GRID = (1, 5, 50, 100)
DEFAULT_D_GRID = (10, 50, 200)


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class BoundInputs:
    """Everything the convergence-bound formulas consume.

    gap0 and dist_sq0 describe the starting point relative to the optimum;
    B bounds the smoothed-estimator variance; sigma is the sub-Gaussian
    scale used only by the high-probability variant.
    """

    gap0: float
    dist_sq0: float
    l0: float
    l1: float
    a0: float
    M: int
    B: float
    m: int
    sigma: float = 0.0
    delta1: float = 0.1
    delta2: float = 0.1

    def __post_init__(self):
        for name in ("gap0", "dist_sq0", "l0", "l1", "a0", "B", "sigma"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be nonnegative")
        if not (0 < self.delta1 < 1 and 0 < self.delta2 < 1):
            raise ConfigurationError("delta1 and delta2 must lie in (0, 1)")


def compute_bound_D(inputs: BoundInputs) -> float:
    """Four-term constant of the halving-rate bound:
    2*gap0 + 25*l1*dist_sq0/(a0*M) + 3*l0*a0 + a0*M*B/(24*l1)."""
    if not inputs.l1 > 0:
        raise ConfigurationError("l1 must be positive")
    if inputs.M < 1:
        raise ConfigurationError("M must be >= 1")
    if not inputs.a0 > 0:
        raise ConfigurationError("a0 must be positive")
    return (2.0 * inputs.gap0
            + 25.0 * inputs.l1 * inputs.dist_sq0 / (inputs.a0 * inputs.M)
            + 3.0 * inputs.l0 * inputs.a0
            + inputs.a0 * inputs.M * inputs.B / (24.0 * inputs.l1))


def compute_bound_Dprime(inputs: BoundInputs, M_s: int) -> float:
    """High-probability constant: D plus the sub-Gaussian deviation term
    (a0/(24*l1)) * max{8*sigma^2*log(1/delta2), 12*sigma^2*sqrt(M_s*log(1/delta2))}.
    Reduces to D when sigma = 0."""
    if M_s < 1:
        raise ConfigurationError("M_s must be >= 1")
    d_val = compute_bound_D(inputs)
    log_term = math.log(1.0 / inputs.delta2)
    extra = max(8.0 * inputs.sigma ** 2 * log_term,
                12.0 * inputs.sigma ** 2 * math.sqrt(M_s * log_term))
    return d_val + inputs.a0 / (24.0 * inputs.l1) * extra


def stage_threshold(d_prime: float, delta1: float, epsilon: float) -> float:
    """Number of stages after which the gap is below delta1*epsilon with the
    theorem's probability: s >= log2(d_prime/(delta1*epsilon))."""
    if not (0 < delta1 < 1):
        raise ConfigurationError("delta1 must lie in (0, 1)")
    if not epsilon > 0 or not d_prime > 0:
        raise ConfigurationError("epsilon and d_prime must be positive")
    return math.log(d_prime / (delta1 * epsilon)) / math.log(2.0)


# ------------------------------------------------- variance diagnostic

def estimate_variance_B(problem: CompositeProblem, dist: SmoothingDistribution,
                        x: Point, radius: float, m: int, n_rep: int,
                        rng: np.random.Generator) -> float:
    """Empirical bound for the m-sample estimator variance at x.

    Mean over n_rep repetitions of ||g_i(x; fresh m-batch) - ref_i(x)||^2,
    components drawn uniformly, with ref_i a 100x-oversampled estimate.
    """
    if n_rep < 30:
        raise ConfigurationError("n_rep must be >= 30")
    x = as_point(x, problem.dim)
    ref_cache: Dict[int, np.ndarray] = {}
    devs = np.empty(n_rep)
    for r in range(n_rep):
        i = int(rng.integers(1, problem.n_components + 1))
        if i not in ref_cache:
            big = sample_batch(dist, m * 100, radius, rng)
            ref_cache[i] = smoothed_component_grad(problem, i, x, big)
        batch = sample_batch(dist, m, radius, rng)
        dev = smoothed_component_grad(problem, i, x, batch) - ref_cache[i]
        devs[r] = dev @ dev
    return float(devs.mean())


# ------------------------------------------------------ reference optimum

@dataclass(frozen=True)
class ReferenceBudget:
    svrg_epochs: int = 25
    svrg_inner_base: int = 8
    inner_cap: int = 8192
    fgd_iters: int = 100_000
    use_qp: bool = False
    seed: int = 0


STUDY_REFERENCE = ReferenceBudget(svrg_epochs=20, svrg_inner_base=4,
                                  inner_cap=4096, fgd_iters=20_000)


def _reference_schedule(problem: CompositeProblem,
                        budget: ReferenceBudget) -> Tuple[EpochSchedule, SmoothingDistribution]:
    dist = make_distribution("gaussian", problem.dim)
    l1 = constants_for(dist).l1_factor * problem.lipschitz_l0
    if l1 <= 0:  # constant objective; any step size works
        l1 = 1.0
    sched = EpochSchedule(a0=1.0, phi=0.125, M=budget.svrg_inner_base, l1=l1,
                          c_step=25.0, m_cap=budget.inner_cap)
    return sched, dist


def _qp_candidate(problem: CompositeProblem) -> np.ndarray:
    try:
        import cvxpy as cp
    except ImportError as exc:
        raise ConfigurationError(
            "QP reference requested but cvxpy is not installed "
            "(pip install 'rssvrg[reference]')") from exc
    U = problem.hinge_diffs
    n, d = U.shape
    reg = problem.regularizer
    w = cp.Variable(d)
    xi = cp.Variable(n)
    obj = cp.sum(xi) / n
    if reg.lam1:
        obj = obj + reg.lam1 * cp.sum_squares(w)
    if reg.lam2:
        obj = obj + reg.lam2 * cp.norm1(w)
    cp.Problem(cp.Minimize(obj), [xi >= 0, xi >= 1 - U @ w]).solve(solver=cp.CLARABEL)
    return np.asarray(w.value, dtype=np.float64).reshape(d)


def reference_optimum(problem: CompositeProblem,
                      budget: Optional[ReferenceBudget] = None
                      ) -> Tuple[float, np.ndarray]:
    """Best objective value found by a large-budget recipe, with its point.

    The recipe runs the variance-reduced solver long (epoch cap keeps it
    affordable), then a constant-step full-subgradient polish tracking the
    best objective seen at every iterate. p_star upper-bounds the true
    optimum; the polish is deterministic, so p_star is reproducible across
    reference seeds.
    """
    if budget is None:
        budget = ReferenceBudget()
    sched, dist = _reference_schedule(problem, budget)
    N, d = problem.n_components, problem.dim
    reg = problem.regularizer

    cfg = SolverConfig("rs_svrg", sched, m_samples=5, epochs=budget.svrg_epochs,
                       seed=budget.seed, dist=dist)
    trace = run_rs_svrg(problem, cfg)
    best_p = trace.records[-1].anchor_objective
    best_x = trace.final_x.copy()

    # full-subgradient polish with best-value tracking
    U = problem.hinge_diffs
    gamma = sched.step_size(0)
    x = np.zeros(d)
    for _ in range(budget.fgd_iters):
        if U is not None:
            margins = U @ x
            val = float(np.maximum(1.0 - margins, 0.0).mean()) + reg.value(x)
            g = -(U.T @ (margins < 1.0).astype(np.float64)) / N
        else:
            val = evaluate_objective(problem, x)
            g = np.zeros(d)
            for i in range(1, N + 1):
                g += np.asarray(problem.component_subgrad(i, x), dtype=np.float64)
            g /= N
        if val < best_p:
            best_p = val
            best_x = x.copy()
        x = prox_step(reg, x - gamma * g, gamma)
    val = evaluate_objective(problem, x)
    if val < best_p:
        best_p, best_x = val, x.copy()

    if budget.use_qp:
        if problem.hinge_diffs is None:
            raise ConfigurationError("QP reference only applies to hinge problems")
        w = _qp_candidate(problem)
        val = evaluate_objective(problem, w)
        if val < best_p:
            best_p, best_x = val, w.copy()

    if not np.isfinite(best_p):
        raise RuntimeError("reference optimum is non-finite")
    return float(best_p), best_x


def clamp_gap(gap: float) -> float:
    """Clamp tiny negative gaps from the upper-bound reference; anything
    below the tolerance means the reference budget was too small."""
    if gap < GAP_CLAMP_TOL:
        raise RuntimeError(
            f"gap {gap:.3e} below clamp tolerance; re-run the reference "
            "with a larger budget")
    return max(gap, 0.0)


# ------------------------------------------------------------ CSV traces

@dataclass(frozen=True)
class TraceRow:
    run_id: str
    solver: str
    dist: str
    seed: int
    epoch: int
    grad_evals: int
    objective: float
    gap: float
    wall_ms: float


def _f17(v: float) -> str:
    return format(float(v), ".17g")


def reference_trace_row(p_star: float) -> TraceRow:
    return TraceRow("reference", "reference", "-", 0, 0, 0, p_star, 0.0, 0.0)


def trace_rows(trace: RunTrace, dist_name: str, p_star: float,
               timings: bool = False) -> List[TraceRow]:
    rows = []
    for rec in trace.records:
        rows.append(TraceRow(
            run_id=f"{trace.solver}-{trace.seed}",
            solver=trace.solver,
            dist=dist_name,
            seed=trace.seed,
            epoch=rec.epoch,
            grad_evals=rec.grad_evals,
            objective=rec.anchor_objective,
            gap=clamp_gap(rec.anchor_objective - p_star),
            wall_ms=rec.wall_ms if timings else 0.0,
        ))
    return rows


def write_traces(path, rows: Sequence[TraceRow]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for r in rows:
            fh.write(f"{r.run_id},{r.solver},{r.dist},{r.seed},{r.epoch},"
                     f"{r.grad_evals},{_f17(r.objective)},{_f17(r.gap)},"
                     f"{_f17(r.wall_ms)}\n")


# ------------------------------------------------------------ comparison

@dataclass
class ComparisonResult:
    p_star: float
    x_star: np.ndarray
    dist_name: str
    traces: Dict[Tuple[str, int], RunTrace]
    final_gaps: Dict[str, np.ndarray]
    median_final_gap: Dict[str, float]
    budgets: np.ndarray

    def rows(self, timings: bool = False) -> List[TraceRow]:
        out = [reference_trace_row(self.p_star)]
        for (_, _), trace in self.traces.items():
            out.extend(trace_rows(trace, self.dist_name, self.p_star, timings))
        return out


def run_comparison(problem: CompositeProblem, solver_list: Sequence[str],
                   seeds: Sequence[int], config: SolverConfig,
                   reference_budget: Optional[ReferenceBudget] = None
                   ) -> ComparisonResult:
    """Run each solver on the identical problem and budget over shared
    seeds; gaps are relative to one reference optimum."""
    for name in solver_list:
        if name not in SOLVER_NAMES:
            raise ConfigurationError(f"unknown solver {name!r}")
    if not seeds:
        raise ConfigurationError("seed set must be nonempty")
    p_star, x_star = reference_optimum(problem, reference_budget)
    dist = config.dist or make_distribution("gaussian", problem.dim)
    dist_name = dist.cli_name
    traces: Dict[Tuple[str, int], RunTrace] = {}
    for solver in solver_list:
        for seed in seeds:
            cfg = replace(config, solver=solver, seed=int(seed))
            traces[(solver, seed)] = run(problem, cfg)
    final_gaps = {
        solver: np.array([clamp_gap(traces[(solver, seed)].records[-1].anchor_objective
                                    - p_star) for seed in seeds])
        for solver in solver_list
    }
    medians = {solver: float(np.median(v)) for solver, v in final_gaps.items()}
    return ComparisonResult(p_star, x_star, dist_name, traces, final_gaps,
                            medians, epoch_budgets(problem.n_components, config))


# ---------------------------------------------------------------- studies

@dataclass(frozen=True)
class ExperimentSpec:
    """Problem-plus-schedule template the CLI and studies both build from."""

    n_pairs: int = 1000
    dim: int = 10
    reg: str = "ridge"
    dist_name: str = "gaussian"
    a0: float = 1.0
    phi: float = 0.125
    inner_m: int = 2
    m_samples: int = 5
    epochs: int = 10
    c_step: float = 25.0
    m_cap: Optional[int] = None
    feature_high: float = 100.0


def problem_for(spec: ExperimentSpec, seed: int) -> CompositeProblem:
    inst = generate_instance(spec.n_pairs, spec.dim, seed,
                             reg_setting=spec.reg, feature_high=spec.feature_high)
    return to_problem(inst)


def solver_config(spec: ExperimentSpec, solver: str, seed: int,
                  problem: CompositeProblem) -> SolverConfig:
    dist = make_distribution(spec.dist_name, problem.dim)
    l1 = constants_for(dist).l1_factor * problem.lipschitz_l0
    sched = EpochSchedule(a0=spec.a0, phi=spec.phi, M=spec.inner_m, l1=l1,
                          c_step=spec.c_step, m_cap=spec.m_cap)
    return SolverConfig(solver, sched, m_samples=spec.m_samples,
                        epochs=spec.epochs, seed=seed, dist=dist)


@dataclass
class StudyResult:
    axis: str
    grid: List[int]
    median_final_gap: List[float]
    traces: Dict[Tuple[int, int], RunTrace]  # (grid value, seed) -> trace
    config: dict

    def to_json_dict(self) -> dict:
        return {"axis": self.axis, "grid": list(self.grid),
                "median_final_gap": [float(v) for v in self.median_final_gap],
                "config": self.config}


def run_study(axis: str, grid: Sequence[int], base: ExperimentSpec,
              seeds: Sequence[int],
              reference_budget: Optional[ReferenceBudget] = None,
              instance_seed: int = 0) -> StudyResult:
    """Sweep sampling size m or dimension d with everything else fixed.

    The instance is drawn once from instance_seed (redrawn per d on the
    dimension axis, where the feature range is also rescaled by sqrt(10/d)
    so component norms stay comparable and the dimension effect is the
    smoothing's, not the Lipschitz constant's). Seeds vary only the
    solver randomness; medians of final gaps are taken over them."""
    if axis not in STUDY_AXES:
        raise ConfigurationError(f"unknown study axis {axis!r}")
    grid = [int(v) for v in grid]
    if not grid:
        raise ConfigurationError("study grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigurationError("study grid must be strictly increasing")
    if any(v < 1 for v in grid):
        raise ConfigurationError("study grid values must be positive")
    seeds = [int(s) for s in seeds]
    if len(seeds) < 5:
        raise ConfigurationError("studies need at least 5 seeds for medians")
    if reference_budget is None:
        reference_budget = STUDY_REFERENCE

    traces: Dict[Tuple[int, int], RunTrace] = {}
    medians: List[float] = []
    config_meta = {"base": {k: getattr(base, k) for k in
                            ("n_pairs", "dim", "reg", "dist_name", "a0", "phi",
                             "inner_m", "m_samples", "epochs", "c_step")},
                   "seeds": seeds, "instance_seed": instance_seed}

    if axis == "sampling_m":
        problem = problem_for(base, instance_seed)
        p_star = reference_optimum(problem, reference_budget)[0]
        for m in grid:
            gaps = []
            for seed in seeds:
                spec_m = replace(base, m_samples=m)
                cfg = solver_config(spec_m, "rs_svrg", seed, problem)
                tr = run_rs_svrg(problem, cfg)
                traces[(m, seed)] = tr
                gaps.append(clamp_gap(tr.records[-1].anchor_objective - p_star))
            medians.append(float(np.median(gaps)))
    else:
        feature_highs = {}
        for d in grid:
            high = base.feature_high * math.sqrt(base.dim / d)
            feature_highs[d] = high
            spec_d = replace(base, dim=d, feature_high=high)
            prob = problem_for(spec_d, instance_seed)
            p_star = reference_optimum(prob, reference_budget)[0]
            gaps = []
            for seed in seeds:
                cfg = solver_config(spec_d, "rs_svrg", seed, prob)
                tr = run_rs_svrg(prob, cfg)
                traces[(d, seed)] = tr
                gaps.append(clamp_gap(tr.records[-1].anchor_objective - p_star))
            medians.append(float(np.median(gaps)))
        config_meta["feature_high"] = {str(d): feature_highs[d] for d in grid}

    return StudyResult(axis, grid, medians, traces, config_meta)


# --------------------------------------- optional high-probability check

@dataclass(frozen=True)
class CoverageResult:
    fraction: float
    target_probability: float
    d_prime: float
    threshold: float


def dprime_coverage(problem: CompositeProblem, config: SolverConfig,
                    runs: int = 100, delta1: float = 0.1, delta2: float = 0.1,
                    reference_budget: Optional[ReferenceBudget] = None
                    ) -> CoverageResult:
    """Monitored (non-gating) check of the high-probability bound: the
    fraction of seeded runs whose final gap is within (1/2)^S * D_prime,
    against the target (1-delta1)(1-delta2). sigma is set to sqrt(B), a
    documented heuristic since only second moments are estimated."""
    p_star, x_star = reference_optimum(problem, reference_budget)
    x0 = config.x_init if config.x_init is not None else np.zeros(problem.dim)
    dist = config.dist or make_distribution("gaussian", problem.dim)
    B = estimate_variance_B(problem, dist, x0, config.schedule.radius(1),
                            config.m_samples, 50, streams.stream(config.seed, 3))
    inputs = BoundInputs(
        gap0=clamp_gap(evaluate_objective(problem, x0) - p_star),
        dist_sq0=float(np.sum((x0 - x_star) ** 2)),
        l0=problem.lipschitz_l0, l1=config.schedule.l1,
        a0=config.schedule.a0, M=config.schedule.M, B=B,
        m=config.m_samples, sigma=math.sqrt(B), delta1=delta1, delta2=delta2)
    d_prime = compute_bound_Dprime(inputs, config.schedule.M)
    threshold = 0.5 ** config.epochs * d_prime
    hits = 0
    for seed in range(runs):
        tr = run_rs_svrg(problem, replace(config, solver="rs_svrg", seed=seed))
        if tr.records[-1].anchor_objective - p_star <= threshold:
            hits += 1
    return CoverageResult(hits / runs, (1 - delta1) * (1 - delta2),
                          d_prime, threshold)
