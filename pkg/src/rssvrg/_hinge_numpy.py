"""Numpy fallback engine for the hinge inner loop.

Mirrors the compiled kernel operation-for-operation (same precomputed
threshold and denominator, same elementwise order) so the two backends
agree to rounding noise. The contract for svrg_epoch:

mutates x and x_sum in place, returns the step index at which the iterate
went non-finite, or -1 for a clean epoch.
"""

import numpy as np

NAME = "numpy"


def svrg_epoch(U, uz, anchor_coefs, g_full, idx, x, x_sum,
               gamma, radius, lam1, lam2):
    m = uz.shape[1]
    thr = gamma * lam2
    denom = 1.0 + 2.0 * gamma * lam1
    for t in range(idx.shape[0]):
        i = idx[t]
        margin = U[i] @ x
        cur = np.count_nonzero(margin + radius * uz[i] < 1.0) / m
        delta = anchor_coefs[i] - cur
        y = x - gamma * (g_full + delta * U[i])
        shrunk = np.abs(y) - thr
        np.maximum(shrunk, 0.0, out=shrunk)
        np.copyto(x, np.sign(y) * shrunk / denom)
        if not np.all(np.isfinite(x)):
            return t
        x_sum += x
    return -1
