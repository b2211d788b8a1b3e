"""Numerical estimators for trace bounds and observability constants.

Three quantities are measured at a finite mode truncation N:

* the direct (admissibility) constant: how large the boundary-trace energy
  of a free evolution can get relative to the initial energy;
* the inverse (observability) constant: the smallest eigenvalue of the
  moment Gramian, which bounds the initial energy by the trace energy and
  is positive exactly when the truncated system is steerable;
* the annihilator gap: the smallest singular value of the map from initial
  data to the boundary trace of the associated memory evolution; a
  positive value certifies, at truncation level N, that no nonzero data
  pair annihilates the reachable set.

These are finite-section diagnostics; every report carries N and the grid
parameters because none of them can certify the untruncated statement.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kernels import reduced_form
from .modal import solve_modal_maccamy, solve_modal_memory
from .quadrature import grid_step, trap_weights, uniform_grid


@dataclass
class InequalityReport:
    """Sampled estimate of a trace-inequality constant.

    constant_estimate -- supremum of the sampled ratios
    sharp_constant    -- largest singular value squared of the discrete
                         trace map (the exact constant at this truncation)
    sample_count      -- number of admitted random samples
    worst_case_input  -- descriptor of the maximizing sample
    grid_params       -- record of (h, T, N, boundary nodes, seed)
    """

    constant_estimate: float
    sharp_constant: float
    sample_count: int
    worst_case_input: dict
    grid_params: dict


def _energy_coordinates(basis, xi, eta):
    """Map (displacement, velocity) coefficients to unit-energy coordinates.

    x_n = lambda_n xi_n and y_n = eta_n, so that |x|^2 + |y|^2 is the
    squared H^1_0 x L2 energy of the data.
    """
    return basis.lam * xi, np.asarray(eta, dtype=float)


def _trace_series(basis, z):
    """Boundary trace time series sum_n trace_n(x_q) z_n(t_j)."""
    return z @ basis.traces  # (J+1, Q)


def _trace_sq_norm(basis, tr, h):
    w_t = trap_weights(tr.shape[0])
    space = np.sum(basis.quad_weights * tr**2, axis=1)
    return float(h * np.sum(w_t * space))


def _unit_data_solutions(basis, kernel, grid, dynamics):
    """Per-mode solutions with unit data (1, 0) and (0, 1).

    dynamics "memory" solves the homogeneous memory form (free evolution of
    the system with memory); "annihilator" solves the transformed-form
    equation that characterizes annihilators of the reachable set.  Returns
    (psi0, psi1) arrays of shape (J+1, N).
    """
    h = grid_step(grid)
    if dynamics == "memory":
        psi0 = solve_modal_memory(basis.lam, kernel, 1.0, 0.0, None, grid).z
        psi1 = solve_modal_memory(basis.lam, kernel, 0.0, 1.0, None, grid).z
        return psi0, psi1
    if dynamics == "annihilator":
        if kernel is None or kernel.is_zero:
            b, k_eff = 0.0, None
        else:
            form = reduced_form(kernel, h, float(grid[-1]))
            b, k_eff = form.b, form.kernel
        psi0 = solve_modal_maccamy(basis.lam, b, k_eff, 1.0, 0.0, None, grid).z
        psi1 = solve_modal_maccamy(basis.lam, b, k_eff, 0.0, 1.0, None, grid).z
        return psi0, psi1
    raise ValueError(f"unknown dynamics {dynamics!r}")


def _trace_map_matrix(basis, psi0, psi1, grid):
    """Weighted matrix of (x, y) energy coordinates -> trace samples.

    Row (j, q) carries sqrt(h w_j W_q); the Euclidean norm of the output
    equals the L2(0,T; L2(boundary)) norm of the trace.  Columns follow
    the unit-data solutions: data (xi, eta) produce the per-mode series
    x_n psi0_n + y_n lambda_n psi1_n with x = lam xi, y = eta.
    """
    h = grid_step(grid)
    psi = basis.traces  # (N, Q)
    cols_x = np.einsum("jn,nq->jqn", psi0, psi / basis.lam[:, None])
    cols_y = np.einsum("jn,nq->jqn", psi1, psi)
    mat = np.concatenate([cols_x, cols_y], axis=2)  # (J+1, Q, 2N)
    w_t = h * trap_weights(grid.size)
    weight = np.sqrt(np.outer(w_t, basis.quad_weights))
    mat *= weight[:, :, None]
    return mat.reshape(-1, 2 * basis.n_modes)


def trace_energy_ratio(basis, kernel, t_end, h, xi_coeffs, eta_coeffs):
    """Trace-energy / initial-energy ratio for one specific data pair.

    Simulates the homogeneous memory evolution from (xi, eta) coefficient
    data and returns ||trace||^2 over [0, T] x boundary divided by the
    H^1_0 x L2 energy of the data.  The ratio is invariant under scaling
    of the data; zero data is rejected.
    """
    grid = uniform_grid(t_end, h)
    xi_coeffs = np.asarray(xi_coeffs, dtype=float)
    eta_coeffs = np.asarray(eta_coeffs, dtype=float)
    energy = float(np.sum((basis.lam * xi_coeffs) ** 2)
                   + np.sum(eta_coeffs**2))
    if energy == 0.0:
        raise ValueError("trace ratio is undefined for zero data")
    z = solve_modal_memory(basis.lam, kernel, xi_coeffs, eta_coeffs,
                           None, grid).z
    tr = _trace_series(basis, z)
    return _trace_sq_norm(basis, tr, grid_step(grid)) / energy


def direct_inequality_ratio(basis, kernel, t_end, n_samples, seed, h,
                            threads=1):
    """Sampled direct-inequality constant of the free memory evolution.

    Draws pseudo-random initial data of unit H^1_0 x L2 energy, simulates
    the homogeneous system with memory, and returns the supremum of
    trace-energy / initial-energy ratios.  The ratio is scale-invariant,
    so zero draws are skipped.  The sharp discrete constant (largest
    singular value squared of the trace map) is reported alongside.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    grid = uniform_grid(t_end, h)
    rng = np.random.default_rng(seed)
    n = basis.n_modes

    psi0, psi1 = _unit_data_solutions(basis, kernel, grid, "memory")
    mat = _trace_map_matrix(basis, psi0, psi1, grid)
    sharp = float(np.linalg.svd(mat, compute_uv=False)[0] ** 2)

    draws = rng.standard_normal((n_samples, 2 * n))
    best = -np.inf
    best_idx = -1
    count = 0

    def ratio_of(draw):
        energy = float(np.sum(draw**2))
        if energy == 0.0:
            return None
        # draw = (x, y) energy coordinates; modal data xi = x / lam, eta = y
        z = psi0 * (draw[:n] / basis.lam) + psi1 * draw[n:]
        tr = _trace_series(basis, z)
        return _trace_sq_norm(basis, tr, grid_step(grid)) / energy

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ratios = list(pool.map(ratio_of, draws))
    else:
        ratios = [ratio_of(d) for d in draws]
    for i, r in enumerate(ratios):
        if r is None:
            continue
        count += 1
        if r > best:
            best, best_idx = r, i

    return InequalityReport(
        constant_estimate=best,
        sharp_constant=sharp,
        sample_count=count,
        worst_case_input={"sample_index": best_idx, "seed": int(seed)},
        grid_params={"h": float(h), "T": float(t_end), "N": int(n),
                     "boundary_nodes": int(basis.n_boundary_nodes),
                     "seed": int(seed)},
    )


def inverse_inequality_constant(mm):
    """Smallest eigenvalue of the moment Gramian at this truncation.

    This is the discrete observability constant: it bounds the initial
    energy by the boundary observation and degrades toward zero when the
    horizon is too short for the mode count.  Callers should report it
    together with mm.n_modes.
    """
    eig = np.linalg.eigvalsh(mm.gramian())
    return float(eig[0])


def orthogonality_test(basis, kernel, t_end, n_modes, h):
    """Smallest singular value of the annihilator trace map.

    Builds the map from unit-energy data (xi, eta) to the boundary trace
    of the transformed-form evolution with that data, over [0, T].  A
    value bounded away from zero certifies that, at truncation level
    n_modes, only the zero pair annihilates every reachable state.  The
    input norm follows the two-sided exponential-family convention, so on
    the memoryless matched configuration the square of this value equals
    :func:`inverse_inequality_constant` up to quadrature error.
    """
    if n_modes < 1:
        raise ValueError("need at least one mode")
    sub = basis.truncated(min(n_modes, basis.n_modes))
    grid = uniform_grid(t_end, h)
    psi0, psi1 = _unit_data_solutions(sub, kernel, grid, "annihilator")
    mat = _trace_map_matrix(sub, psi0, psi1, grid)
    sing = np.linalg.svd(mat, compute_uv=False)
    return float(np.sqrt(2.0) * sing[-1])
