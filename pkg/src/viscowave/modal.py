"""Per-mode time integration of wave dynamics with memory.

Each eigenmode of the viscoelastic system solves a scalar second-order
Volterra equation.  Two equivalent formulations are integrated here:

* memory form      w'' = -lam^2 w - lam^2 (M * w) + g
* transformed form w'' = -lam^2 w + b w + (K * w) + g1

where * is causal convolution in time.  The transformed (zero-damping
MacCamy) coefficients b, K come from the resolvent of M; the exponential
factor exp(a t / 2) maps its solution back to the memory-form one, which
:func:`maccamy_equivalence_residual` cross-checks.

The time stepper advances the exact rotation of the oscillator part and
treats the convolution and forcing by trapezoid quadrature, so it is
second-order overall and exact in the memoryless limit: with M = 0 it
reproduces the diagonal cosine/sine propagators to roundoff, and trapezoid
Duhamel sums match :func:`viscowave.cosine.elastic_solution` identically.
"""

from dataclasses import dataclass

import numpy as np

from .cosine import SCALE_EXPONENT, CoeffState
from .errors import GuardError
from .kernels import maccamy_constants, resolvent_kernel
from .quadrature import causal_convolve, grid_step

#: resolution guard: every mode must satisfy lam * h <= this bound
MAX_LAM_H = 0.5


@dataclass
class ModalTrajectory:
    """Per-mode time series of values and derivatives on a uniform grid.

    z and zp have shape (J+1,) for a scalar-frequency solve and (J+1, N)
    for a vector one; row 0 always equals the supplied initial data.
    """

    grid: np.ndarray
    z: np.ndarray
    zp: np.ndarray

    @property
    def h(self):
        return grid_step(self.grid)

    def terminal(self):
        """(z(T), z'(T)) at the last grid node."""
        return self.z[-1], self.zp[-1]


def _as_modes(lam):
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr <= 0.0):
        raise ValueError("mode frequencies must be positive")
    return lam_arr, np.ndim(lam) == 0


def _check_guard(lam_arr, h):
    bad = np.nonzero(lam_arr * h > MAX_LAM_H)[0]
    if bad.size:
        raise GuardError(
            f"grid step {h} violates lam*h <= {MAX_LAM_H} "
            f"first at mode index {bad[0] + 1} (lam = {lam_arr[bad[0]]})"
        )


def _forcing_samples(g, n_nodes, n_modes):
    if g is None:
        return np.zeros((n_nodes, n_modes))
    g = np.asarray(g, dtype=float)
    if g.ndim == 1:
        if g.size != n_nodes:
            raise ValueError("forcing samples do not cover the grid")
        return np.repeat(g[:, None], n_modes, axis=1)
    if g.shape != (n_nodes, n_modes):
        raise ValueError(
            f"forcing shape {g.shape} does not match grid x modes "
            f"({n_nodes}, {n_modes})"
        )
    return g.copy()


def _exp_trap_solve(lam_arr, grid, z0, z1, g, conv_kernel, conv_scale, local_b):
    """Exponential-trapezoid integrator for w'' = -lam^2 w + n(t).

    n(t) = local_b * w + conv_scale * (conv_kernel * w) + g, with the
    causal convolution accumulated by trapezoid over the stored history.
    The oscillator part is advanced by its exact rotation; the nonlocal
    part by the trapezoid rule, evaluated explicitly because the newest
    displacement is known before the newest velocity is needed.
    """
    h = grid_step(grid)
    _check_guard(lam_arr, h)
    n_nodes = grid.size
    n_modes = lam_arr.size

    w = np.zeros((n_nodes, n_modes))
    v = np.zeros((n_nodes, n_modes))
    w[0] = z0
    v[0] = z1
    g = _forcing_samples(g, n_nodes, n_modes)

    theta = lam_arr * h
    cos_t = np.cos(theta)
    sin_t = np.sin(theta)
    sin_over = sin_t / lam_arr

    have_conv = conv_kernel is not None
    if have_conv:
        ker = np.asarray(conv_kernel, dtype=float)
        if ker.size < n_nodes:
            raise ValueError("convolution kernel does not cover the grid")
        ker_rev = ker[:n_nodes][::-1].copy()
        scale = np.broadcast_to(np.asarray(conv_scale, dtype=float), (n_modes,))
        half_k0 = 0.5 * h * ker[0]
    last = n_nodes - 1

    n_cur = local_b * w[0] + g[0]  # convolution over [0, 0] vanishes
    for k in range(n_nodes - 1):
        w[k + 1] = cos_t * w[k] + sin_over * v[k] + 0.5 * h * sin_over * n_cur
        n_next = local_b * w[k + 1] + g[k + 1]
        if have_conv:
            # trapezoid history sum for (kernel * w)(t_{k+1}): the i <= k
            # part uses stored history, the i = k+1 endpoint the new value
            hist = h * (np.dot(ker_rev[last - k - 1 : last], w[: k + 1])
                        - 0.5 * ker[k + 1] * w[0])
            n_next += scale * (hist + half_k0 * w[k + 1])
        v[k + 1] = -lam_arr * sin_t * w[k] + cos_t * v[k] \
            + 0.5 * h * (cos_t * n_cur + n_next)
        n_cur = n_next
    return w, v


def solve_modal_memory(lam, kernel, z0, z1, g, grid):
    """Integrate the memory form w'' = -lam^2 (w + M*w) + g.

    lam may be a scalar or an array of mode frequencies (then z0, z1 and g
    broadcast across modes).  Requires lam * h <= 0.5 for every mode.
    """
    lam_arr, scalar = _as_modes(lam)
    grid = np.asarray(grid, dtype=float)
    if kernel is None or kernel.is_zero:
        ker, scale = None, None
    else:
        ker = kernel.values_on(grid)
        scale = -lam_arr**2
    w, v = _exp_trap_solve(lam_arr, grid, z0, z1, g, ker, scale, 0.0)
    if scalar:
        return ModalTrajectory(grid, w[:, 0], v[:, 0])
    return ModalTrajectory(grid, w, v)


def solve_modal_maccamy(lam, b, k_samples, z0, z1, g1, grid):
    """Integrate the transformed form w'' = -lam^2 w + b w + K*w + g1."""
    lam_arr, scalar = _as_modes(lam)
    grid = np.asarray(grid, dtype=float)
    if k_samples is None:
        ker, scale = None, None
    else:
        ker = np.asarray(k_samples, dtype=float)
        scale = np.ones_like(lam_arr)
        if not np.any(ker):
            ker, scale = None, None
    w, v = _exp_trap_solve(lam_arr, grid, z0, z1, g1, ker, scale, float(b))
    if scalar:
        return ModalTrajectory(grid, w[:, 0], v[:, 0])
    return ModalTrajectory(grid, w, v)


def march_modal_volterra(lam, b, k_samples, z0, z1, g1, grid):
    """March the equivalent second-kind Volterra form of the transformed mode.

    Writing S(t) = sin(lam t) and H = b S + S*K, the displacement solves

        Z = U + (1/lam) H * Z,
        U(t) = z0 cos(lam t) + (z1/lam) sin(lam t) + (1/lam) (S * g1)(t),

    which is marched node by node (H(0) = 0 makes the march explicit).
    This is an independent discretization of the same dynamics as
    :func:`solve_modal_maccamy`; the two agree to O(h^2).  The derivative
    is recovered from the differentiated formula with kernel
    b cos + cos*K.
    """
    lam_arr, scalar = _as_modes(lam)
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    _check_guard(lam_arr, h)
    n_nodes = grid.size
    n_modes = lam_arr.size

    phase = grid[:, None] * lam_arr[None, :]
    sin_m = np.sin(phase)
    cos_m = np.cos(phase)
    if k_samples is None:
        k_samples = np.zeros(n_nodes)
    ker = np.asarray(k_samples, dtype=float)[:n_nodes]
    hh = b * sin_m + causal_convolve(ker, sin_m, h)

    g = _forcing_samples(g1, n_nodes, n_modes)
    z0v = np.broadcast_to(np.asarray(z0, dtype=float), (n_modes,))
    z1v = np.broadcast_to(np.asarray(z1, dtype=float), (n_modes,))
    duh = np.empty((n_nodes, n_modes))
    for n in range(n_modes):
        duh[:, n] = causal_convolve(sin_m[:, n], g[:, n], h)
    u = z0v * cos_m + (z1v / lam_arr) * sin_m + duh / lam_arr

    z = np.zeros((n_nodes, n_modes))
    z[0] = u[0]
    for j in range(1, n_nodes):
        hist = np.einsum("in,in->n", hh[j:0:-1], z[:j]) - 0.5 * hh[j] * z[0]
        z[j] = u[j] + (h / lam_arr) * hist

    # differentiated march: Z' = U' + (b cos + cos*K) * Z
    hp = b * cos_m + causal_convolve(ker, cos_m, h)
    duhp = np.empty((n_nodes, n_modes))
    conv_zp = np.empty((n_nodes, n_modes))
    for n in range(n_modes):
        duhp[:, n] = causal_convolve(cos_m[:, n], g[:, n], h)
        conv_zp[:, n] = causal_convolve(hp[:, n], z[:, n], h)
    zp = -z0v * lam_arr * sin_m + z1v * cos_m + duhp + conv_zp

    if scalar:
        return ModalTrajectory(grid, z[:, 0], zp[:, 0])
    return ModalTrajectory(grid, z, zp)


def maccamy_equivalence_residual(lam, kernel, z0, z1, grid):
    """Defect between the memory form and the rescaled transformed form.

    Solves the homogeneous memory form for w; independently resolves the
    kernel, assembles the zero-damping coefficients, the shifted initial
    velocity z1 - (a/2) z0 and the initial-data forcing

        g1(t) = exp(-a t / 2) (-R(t) z1 - R'(t) z0),

    solves the transformed form for v, and returns
    max_j |w(t_j) - exp(a t_j / 2) v(t_j)| over all modes.  Both paths
    discretize the same dynamics, so the residual shrinks like h^2.
    """
    lam_arr, _ = _as_modes(lam)
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    w = solve_modal_memory(lam_arr, kernel, z0, z1, None, grid).z

    if kernel is None or kernel.is_zero:
        a = 0.0
        b = 0.0
        k_eff = None
        g1 = None
        v1 = z1
    else:
        res = resolvent_kernel(kernel, h, float(grid[-1]))
        a, b, k = maccamy_constants(res)
        decay = np.exp(-0.5 * a * grid)
        b = b + 0.25 * a * a
        k_eff = decay * k
        z0v = np.broadcast_to(np.asarray(z0, dtype=float), lam_arr.shape)
        z1v = np.broadcast_to(np.asarray(z1, dtype=float), lam_arr.shape)
        f1 = -np.outer(res.values, z1v) - np.outer(res.rp, z0v)
        g1 = decay[:, None] * f1
        v1 = z1v - 0.5 * a * z0v

    v = solve_modal_maccamy(lam_arr, b, k_eff, z0, v1, g1, grid).z
    growth = np.exp(0.5 * a * grid)[:, None]
    return float(np.max(np.abs(w - growth * v)))


def _picard_terms(xi, eta, form, basis, n_terms):
    """Successive Picard terms of the transformed-mode series.

    Term 0 is the free evolution; term m+1 applies the discrete integral
    operator Z -> (1/lam) H * Z with H = b sin + sin*K, so the partial
    sums converge to the marched Volterra solution of the same grid.
    Yields (J+1, N) arrays.
    """
    if xi.scale not in ("H10", "L2"):
        raise ValueError("initial displacement must be H10 or L2")
    if SCALE_EXPONENT[eta.scale] != SCALE_EXPONENT[xi.scale] - 1:
        raise ValueError("initial velocity must sit one scale below")
    if len(xi) != basis.n_modes or len(eta) != basis.n_modes:
        raise ValueError("coefficient lengths must match the basis")
    if n_terms < 1:
        raise ValueError("need at least one series term")
    grid = form.grid
    h = form.h
    lam = basis.lam
    _check_guard(lam, h)

    phase = grid[:, None] * lam[None, :]
    sin_m = np.sin(phase)
    hh = form.b * sin_m + causal_convolve(form.kernel, sin_m, h)

    term = xi.coeffs[None, :] * np.cos(phase) \
        + (eta.coeffs / lam)[None, :] * sin_m
    yield term
    for _ in range(n_terms - 1):
        nxt = np.empty_like(term)
        for n in range(basis.n_modes):
            nxt[:, n] = causal_convolve(hh[:, n], term[:, n], h) / lam[n]
        term = nxt
        yield term


def picard_series(xi, eta, form, t, basis, n_terms):
    """Truncated Picard series solution of the transformed dynamics at time t.

    Evaluates the displacement coefficients at grid node t by summing
    n_terms series terms; with a zero form and one term this is exactly
    the free cosine/sine evolution.  Successive terms shrink at least
    geometrically because each application of the integral operator
    carries a 1/lam factor.
    """
    grid = form.grid
    j = int(round(t / form.h))
    if abs(grid[min(j, grid.size - 1)] - t) > 1e-9 * max(1.0, t) or j >= grid.size:
        raise ValueError("t must be a node of the form's grid")
    total = None
    for term in _picard_terms(xi, eta, form, basis, n_terms):
        total = term[j].copy() if total is None else total + term[j]
    return CoeffState(total, xi.scale)


def picard_term_norms(xi, eta, form, basis, n_terms):
    """Sup-in-time coefficient-l2 norm of each Picard term."""
    norms = []
    for term in _picard_terms(xi, eta, form, basis, n_terms):
        norms.append(float(np.max(np.linalg.norm(term, axis=1))))
    return np.array(norms)


def geometric_tail_bound(norms):
    """Majorant for the dropped tail of a truncated Picard sum.

    Successive term ratios oscillate (sine convolutions alternate in
    size), so the bound uses the worst ratio over the second half of the
    observed sequence: tail <= last * r / (1 - r).  Requires that worst
    ratio to be below 1.
    """
    norms = np.asarray(norms, dtype=float)
    if norms.size < 3:
        raise ValueError("need at least three term norms")
    ratios = norms[1:] / norms[:-1]
    r = float(np.max(ratios[ratios.size // 2:]))
    if not r < 1.0:
        raise ValueError(f"observed term ratio {r} is not contracting")
    return float(norms[-1] * r / (1.0 - r))


def _sample_responses(lam_arr, form, grid, node):
    """Response of every mode to a unit forcing sample at one grid node.

    The forcing is the discrete boundary pairing sequence e_node (per-mode
    scaling is left to the caller); dynamics are elastic when form is None
    or zero.  Solved in the rescaled variable and mapped back, so the
    returned (w, w') are memory-form responses.  Because the stepper
    recursion is time-invariant, the response to e_m for m >= 1 is the
    node-1 response shifted by m - 1 steps.
    """
    grid = np.asarray(grid, dtype=float)
    q = np.zeros(grid.size)
    q[node] = 1.0
    if form is None or form.is_zero:
        traj = solve_modal_maccamy(lam_arr, 0.0, None, 0.0, 0.0, q, grid)
        z = np.atleast_2d(traj.z.T).T
        zp = np.atleast_2d(traj.zp.T).T
        return z, zp
    if form.grid.size < grid.size or abs(form.h - grid_step(grid)) > 1e-12:
        raise ValueError("transformed-form grid does not cover the solve grid")
    decay = np.exp(-0.5 * form.a * grid)
    traj = solve_modal_maccamy(
        lam_arr, form.b, form.kernel[: grid.size], 0.0, 0.0, decay * q, grid
    )
    v = np.atleast_2d(traj.z.T).T
    vp = np.atleast_2d(traj.zp.T).T
    growth = (1.0 / decay)[:, None]
    w = growth * v
    wp = growth * (vp + 0.5 * form.a * v)
    return w, wp


def boundary_response_kernel(basis, form, profile, grid):
    """Per-mode response to a unit-integral hat impulse at the boundary.

    The impulse has width 2h, peak at the first interior node and unit
    time integral (so its samples are the discrete delta scaled by 1/h);
    its spatial shape is the given boundary profile.  Initial data are
    zero and the dynamics are elastic when form is None or zero.  The rows
    of any control-to-state map are superpositions of shifts of these
    responses.
    """
    pairing = basis.boundary_pairing(profile)
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    w, wp = _sample_responses(basis.lam, form, grid, node=1)
    return ModalTrajectory(grid, (w / h) * pairing, (wp / h) * pairing)
