"""Small hand-built problems used as test oracles."""

import numpy as np

from rssvrg.objective import CompositeProblem, Regularizer


def abs_problem(reg=None):
    """N=1, d=1, f(x) = |x|; kink subgradient is 0."""

    def sub(i, x):
        v = x[0]
        if v > 0:
            return np.array([1.0])
        if v < 0:
            return np.array([-1.0])
        return np.array([0.0])

    return CompositeProblem(
        dim=1, n_components=1,
        component_subgrad=sub,
        component_value=lambda i, x: abs(float(x[0])),
        regularizer=reg if reg is not None else Regularizer.none(),
        lipschitz_l0=1.0)


def linear_problem(c=1.0, reg=None, n=1):
    """d=1, every component f_i(x) = c*x (constant subgradient c)."""
    return CompositeProblem(
        dim=1, n_components=n,
        component_subgrad=lambda i, x: np.array([c]),
        component_value=lambda i, x: c * float(x[0]),
        regularizer=reg if reg is not None else Regularizer.none(),
        lipschitz_l0=abs(c))


def opposed_linear_problem(c=1.0):
    """N=2, f_1 = c*x, f_2 = -c*x; the average gradient cancels."""
    signs = {1: c, 2: -c}
    return CompositeProblem(
        dim=1, n_components=2,
        component_subgrad=lambda i, x: np.array([signs[i]]),
        component_value=lambda i, x: signs[i] * float(x[0]),
        regularizer=Regularizer.none(),
        lipschitz_l0=abs(c))


def zero_problem(dim=3, reg=None):
    """F identically 0."""
    return CompositeProblem(
        dim=dim, n_components=4,
        component_subgrad=lambda i, x: np.zeros(dim),
        component_value=lambda i, x: 0.0,
        regularizer=reg if reg is not None else Regularizer.none(),
        lipschitz_l0=0.0)


def constant_problem(dim=2, c=3.5):
    """F identically c (zero subgradients)."""
    return CompositeProblem(
        dim=dim, n_components=2,
        component_subgrad=lambda i, x: np.zeros(dim),
        component_value=lambda i, x: c,
        regularizer=Regularizer.none(),
        lipschitz_l0=0.0)


def nan_problem(dim=2):
    """Subgradient oracle that poisons the iterate."""
    return CompositeProblem(
        dim=dim, n_components=3,
        component_subgrad=lambda i, x: np.full(dim, np.nan),
        component_value=lambda i, x: 0.0,
        regularizer=Regularizer.none(),
        lipschitz_l0=1.0)
