"""NumPy implementation of the full-batch gradient-descent kernel.

Works on a dense residual matrix that is zero at unobserved cells, so the
factor-gradient products only pick up observed contributions. Fine for
desk-scale matrices; the compiled kernel in ``_gdc`` does the same math
cell-by-cell and is preferred when built.
"""

from __future__ import annotations

import numpy as np

STATUS_MAX_ITER = 0
STATUS_CONVERGED = 1
STATUS_DIVERGED = 2

_REL_FLOOR = 1e-12


def cost_and_gradients(theta: np.ndarray, x: np.ndarray,
                       rows: np.ndarray, cols: np.ndarray, values: np.ndarray,
                       regularization: float):
    """Cost J = 0.5 * sum of squared residuals over observed cells plus
    0.5 * regularization * (||theta||^2 + ||x||^2), with its gradients."""
    residual = np.zeros((theta.shape[0], x.shape[0]))
    residual[rows, cols] = np.einsum("cf,cf->c", theta[rows], x[cols]) - values
    cost = 0.5 * float(np.sum(residual * residual))
    cost += 0.5 * regularization * (float(np.sum(theta * theta)) + float(np.sum(x * x)))
    grad_theta = residual @ x + regularization * theta
    grad_x = residual.T @ theta + regularization * x
    return cost, grad_theta, grad_x


def run_gd(theta: np.ndarray, x: np.ndarray,
           rows: np.ndarray, cols: np.ndarray, values: np.ndarray,
           learning_rate: float, regularization: float,
           tol: float, max_iterations: int):
    """Simultaneous full-batch gradient descent on both factor matrices.

    Returns ``(theta, x, costs, status)`` where ``costs[0]`` is the initial
    cost and ``costs[t]`` the cost after update ``t``. Stops when the relative
    cost change drops below ``tol``, the cost goes non-finite, or
    ``max_iterations`` updates have been applied.
    """
    theta = np.array(theta, dtype=float)
    x = np.array(x, dtype=float)
    rows = np.asarray(rows, dtype=np.intp)
    cols = np.asarray(cols, dtype=np.intp)
    values = np.asarray(values, dtype=float)

    cost, grad_theta, grad_x = cost_and_gradients(theta, x, rows, cols, values,
                                                  regularization)
    costs = [cost]
    status = STATUS_MAX_ITER
    for _ in range(max_iterations):
        theta = theta - learning_rate * grad_theta
        x = x - learning_rate * grad_x
        cost, grad_theta, grad_x = cost_and_gradients(theta, x, rows, cols,
                                                      values, regularization)
        costs.append(cost)
        if not np.isfinite(cost):
            status = STATUS_DIVERGED
            break
        if abs(costs[-2] - cost) <= tol * max(abs(costs[-2]), _REL_FLOOR):
            status = STATUS_CONVERGED
            break
    return theta, x, np.array(costs), status
