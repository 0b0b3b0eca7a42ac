# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled full-batch gradient-descent kernel.

Same contract and math as ``gd_numpy.run_gd``, but iterating over the
observed cells directly, which keeps the inner loop tight for the
training-heavy experiment runs.
"""

import numpy as np

from libc.math cimport fabs, isfinite

STATUS_MAX_ITER = 0
STATUS_CONVERGED = 1
STATUS_DIVERGED = 2

cdef double REL_FLOOR = 1e-12


cdef double _evaluate(double[:, ::1] theta, double[:, ::1] x,
                      Py_ssize_t[::1] rows, Py_ssize_t[::1] cols,
                      double[::1] values, double[::1] err,
                      double regularization) noexcept:
    """Residual per observed cell plus the regularized cost."""
    cdef Py_ssize_t c, f, n_cells = rows.shape[0]
    cdef Py_ssize_t k = theta.shape[1]
    cdef double dot, cost = 0.0, norms = 0.0
    for c in range(n_cells):
        dot = 0.0
        for f in range(k):
            dot += theta[rows[c], f] * x[cols[c], f]
        err[c] = dot - values[c]
        cost += err[c] * err[c]
    cost *= 0.5
    if regularization != 0.0:
        for c in range(theta.shape[0]):
            for f in range(k):
                norms += theta[c, f] * theta[c, f]
        for c in range(x.shape[0]):
            for f in range(k):
                norms += x[c, f] * x[c, f]
        cost += 0.5 * regularization * norms
    return cost


def run_gd(theta_in, x_in, rows_in, cols_in, values_in,
           double learning_rate, double regularization,
           double tol, int max_iterations):
    """Simultaneous full-batch gradient descent; see ``gd_numpy.run_gd``."""
    theta_arr = np.array(theta_in, dtype=np.float64, order="C")
    x_arr = np.array(x_in, dtype=np.float64, order="C")
    rows_arr = np.ascontiguousarray(rows_in, dtype=np.intp)
    cols_arr = np.ascontiguousarray(cols_in, dtype=np.intp)
    values_arr = np.ascontiguousarray(values_in, dtype=np.float64)

    cdef double[:, ::1] theta = theta_arr
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t[::1] rows = rows_arr
    cdef Py_ssize_t[::1] cols = cols_arr
    cdef double[::1] values = values_arr

    cdef Py_ssize_t n_users = theta.shape[0]
    cdef Py_ssize_t n_items = x.shape[0]
    cdef Py_ssize_t k = theta.shape[1]
    cdef Py_ssize_t n_cells = rows.shape[0]

    err_arr = np.zeros(n_cells, dtype=np.float64)
    gt_arr = np.zeros((n_users, k), dtype=np.float64)
    gx_arr = np.zeros((n_items, k), dtype=np.float64)
    cdef double[::1] err = err_arr
    cdef double[:, ::1] gt = gt_arr
    cdef double[:, ::1] gx = gx_arr

    costs = [_evaluate(theta, x, rows, cols, values, err, regularization)]
    cdef double cost_prev = costs[0]
    cdef double cost, e, scale
    cdef Py_ssize_t it, c, f, u, i
    cdef int status = STATUS_MAX_ITER

    for it in range(max_iterations):
        # accumulate both gradients at the current point, then step
        gt_arr[:] = 0.0
        gx_arr[:] = 0.0
        for c in range(n_cells):
            u = rows[c]
            i = cols[c]
            e = err[c]
            for f in range(k):
                gt[u, f] += e * x[i, f]
                gx[i, f] += e * theta[u, f]
        scale = 1.0 - learning_rate * regularization
        for u in range(n_users):
            for f in range(k):
                theta[u, f] = scale * theta[u, f] - learning_rate * gt[u, f]
        for i in range(n_items):
            for f in range(k):
                x[i, f] = scale * x[i, f] - learning_rate * gx[i, f]

        cost = _evaluate(theta, x, rows, cols, values, err, regularization)
        costs.append(cost)
        if not isfinite(cost):
            status = STATUS_DIVERGED
            break
        if fabs(cost_prev - cost) <= tol * max(fabs(cost_prev), REL_FLOOR):
            status = STATUS_CONVERGED
            break
        cost_prev = cost

    return theta_arr, x_arr, np.asarray(costs), status
