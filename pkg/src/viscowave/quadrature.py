"""Uniform-grid trapezoid quadrature and causal convolution helpers.

Every time integral in this package runs over a uniform grid t_j = j*h and
is discretized with the composite trapezoid rule, so that all components
(resolvent marching, modal solvers, moment-matrix assembly) share one error
budget of order h**2.
"""

import numpy as np


def uniform_grid(t_max, h):
    """Return the uniform grid 0, h, ..., J*h covering [0, t_max].

    t_max must be an (almost exact) integer multiple of h.
    """
    if h <= 0.0:
        raise ValueError("grid step h must be positive")
    if t_max <= 0.0:
        raise ValueError("grid horizon must be positive")
    steps = int(round(t_max / h))
    if steps < 1 or abs(steps * h - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"horizon {t_max} is not a multiple of step {h}")
    return h * np.arange(steps + 1)


def grid_step(grid):
    """Step of a uniform grid, validating uniformity."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least two nodes")
    h = grid[1] - grid[0]
    if h <= 0.0 or not np.allclose(np.diff(grid), h, rtol=1e-9, atol=1e-12 * h):
        raise ValueError("grid is not uniform")
    return float(h)


def trap_weights(n_nodes):
    """Composite trapezoid weights (1/2, 1, ..., 1, 1/2) for n_nodes nodes."""
    w = np.ones(n_nodes)
    w[0] = 0.5
    w[-1] = 0.5
    return w


def integrate(values, h, axis=0):
    """Trapezoid integral of sampled values along the given axis."""
    values = np.asarray(values)
    n = values.shape[axis]
    w = trap_weights(n)
    shape = [1] * values.ndim
    shape[axis] = n
    return h * np.sum(values * w.reshape(shape), axis=axis)


def causal_convolve(kernel, signal, h):
    """Trapezoid discretization of the causal convolution (kernel * signal).

    Returns c with c[j] ~ int_0^{t_j} kernel(t_j - s) signal(s) ds, i.e.

        c[j] = h * ( sum_{i=0..j} kernel[j-i] signal[i]
                     - (kernel[j] signal[0] + kernel[0] signal[j]) / 2 ).

    `signal` may be 1-d of the same length as `kernel` or 2-d with time on
    the first axis (one column per mode).
    """
    kernel = np.asarray(kernel)
    signal = np.asarray(signal)
    n = kernel.shape[0]
    if signal.shape[0] != n:
        raise ValueError("kernel and signal must share the time grid")
    if signal.ndim == 1:
        full = np.convolve(kernel, signal)[:n]
        full -= 0.5 * (kernel * signal[0] + kernel[0] * signal)
        return h * full
    out = np.empty((n, signal.shape[1]), dtype=np.result_type(kernel, signal))
    for col in range(signal.shape[1]):
        out[:, col] = np.convolve(kernel, signal[:, col])[:n]
    out -= 0.5 * (kernel[:, None] * signal[0] + kernel[0] * signal)
    return h * out
