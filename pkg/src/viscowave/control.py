"""Boundary control synthesis through the discrete moment problem.

A boundary control is a time series of amplitudes for a few fixed spatial
profiles on the active boundary.  Steering the terminal pair
(velocity, displacement) to a target is a moment problem: each mode n
contributes the pairing of the control with the oscillating shape
(trace_n / lambda_n) exp(i lambda_n s), one row for +lambda_n and one for
-lambda_n.  The resulting matrix maps control samples to the complex
moments

    m(+n) = u'_n(T) / lambda_n + i u_n(T),    m(-n) = conj(m(+n)),

whose l2 norm over both sign families is twice the squared H^-1 x L2 norm
of the terminal pair.  Minimum-norm steering is a truncated-SVD least
squares solve in the control's L2(0,T; L2(boundary)) geometry.

Elastic rows are assembled in closed form; rows with memory are built by
superposing shifted unit-impulse responses of the transformed-form solver,
while :func:`steer_and_verify` re-simulates the returned control through
the memory-form solver, keeping the two derivations of the same dynamics
independent.
"""

from dataclasses import dataclass

import numpy as np

from .kernels import reduced_form
from .modal import _sample_responses, solve_modal_memory
from .quadrature import causal_convolve, grid_step, trap_weights


@dataclass
class ControlSignal:
    """Boundary control: per-profile amplitude time series on [0, T].

    grid          -- uniform time nodes, grid[0] = 0
    profile_basis -- list of boundary-node vectors (spatial shapes)
    amplitudes    -- (J+1, P) real samples, column p scaling profile p
    """

    grid: np.ndarray
    profile_basis: list
    amplitudes: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.amplitudes = np.asarray(self.amplitudes, dtype=float)
        if self.amplitudes.ndim == 1:
            self.amplitudes = self.amplitudes[:, None]
        self.profile_basis = [np.asarray(p, dtype=float)
                              for p in self.profile_basis]
        if not self.profile_basis:
            raise ValueError("need at least one boundary profile")
        if self.grid[0] != 0.0 or self.grid[-1] <= 0.0:
            raise ValueError("control grid must start at 0 and end at T > 0")
        if self.amplitudes.shape != (self.grid.size, len(self.profile_basis)):
            raise ValueError(
                f"amplitudes shape {self.amplitudes.shape} does not match "
                f"{self.grid.size} nodes x {len(self.profile_basis)} profiles"
            )

    @property
    def horizon(self):
        return float(self.grid[-1])

    def l2_norm(self, basis):
        """L2(0, T; L2(boundary)) norm via the basis quadrature weights."""
        h = grid_step(self.grid)
        shapes = np.stack(self.profile_basis)  # (P, Q)
        f_nodes = self.amplitudes @ shapes     # (J+1, Q)
        space = np.sum(basis.quad_weights * f_nodes**2, axis=1)
        return float(np.sqrt(h * np.sum(trap_weights(self.grid.size) * space)))

    @classmethod
    def zero(cls, grid, profile_basis):
        grid = np.asarray(grid, dtype=float)
        return cls(grid, list(profile_basis),
                   np.zeros((grid.size, len(profile_basis))))


@dataclass
class MomentMatrix:
    """Map from control samples to terminal moments, with its quadrature.

    rows    -- (2N, (J+1)*P) complex; rows 0..N-1 carry +lambda_n, rows
               N..2N-1 the conjugate -lambda_n family.  Columns are
               ordered node-major: column j*P + p is node j, profile p.
    quad    -- per-time-node trapezoid weights h * w_j of the control
               inner product (profile geometry sits in prof_chol)
    kind    -- "elastic" or "viscoelastic"
    """

    rows: np.ndarray
    quad: np.ndarray
    lam: np.ndarray
    grid: np.ndarray
    profile_basis: list
    kind: str
    prof_chol: np.ndarray = None

    @property
    def n_modes(self):
        return self.lam.size

    @property
    def horizon(self):
        return float(self.grid[-1])

    def whitened(self):
        """Rows expressed in an orthonormal control coordinate system.

        Column scaling by quad**-1/2 (plus the profile Cholesky factor)
        turns the L2 control norm into the Euclidean norm, so singular
        values of the whitened matrix are the moment-operator singular
        values."""
        n_nodes = self.grid.size
        n_prof = len(self.profile_basis)
        b = self.rows.reshape(2 * self.n_modes, n_nodes, n_prof)
        h = grid_step(self.grid)
        tw = np.sqrt(h * trap_weights(n_nodes))
        # amplitudes -> whitened g: g = (sqrt(w_t) x L^T) amp, so the matrix
        # picks up (time weight)^-1/2 and L^-T on the right
        linv_t = np.linalg.inv(self.prof_chol).T
        b = np.einsum("rjp,pq->rjq", b, linv_t) / tw[None, :, None]
        return b.reshape(2 * self.n_modes, n_nodes * n_prof)

    def gramian(self):
        """Hermitian Gramian of the moment rows in the control L2 geometry."""
        b = self.whitened()
        g = b @ b.conj().T
        return 0.5 * (g + g.conj().T)

    def apply(self, control):
        """Moments produced by a control signal."""
        if control.grid.size != self.grid.size or \
                not np.allclose(control.grid, self.grid):
            raise ValueError("control grid does not match the moment matrix")
        return self.rows @ control.amplitudes.reshape(-1)

    def target_moments(self, xi, eta):
        """Complex moment targets for terminal (displacement, velocity).

        xi is the L2 displacement target, eta the H^-1 velocity target;
        imaginary parts must vanish since physical fields are real."""
        if xi.scale != "L2" or eta.scale != "Hm1":
            raise ValueError("targets must be tagged (L2, Hm1)")
        if len(xi) != self.n_modes or len(eta) != self.n_modes:
            raise ValueError("target length does not match the mode count")
        if np.max(np.abs(xi.coeffs.imag)) > 1e-12 or \
                np.max(np.abs(eta.coeffs.imag)) > 1e-12:
            raise ValueError("steering targets must be real-valued fields")
        plus = eta.coeffs.real / self.lam + 1j * xi.coeffs.real
        return np.concatenate([plus, plus.conj()])


def _profile_setup(basis, profiles):
    if profiles is None:
        profiles = [np.ones(basis.n_boundary_nodes)]
    profiles = [np.asarray(p, dtype=float) for p in profiles]
    shapes = np.stack(profiles)
    gram = shapes @ (basis.quad_weights[:, None] * shapes.T)
    chol = np.linalg.cholesky(gram)
    pairings = np.column_stack([basis.boundary_pairing(p) for p in profiles])
    return profiles, pairings, chol


def build_elastic_moment_matrix(basis, t_end, grid, profiles=None):
    """Closed-form moment rows of the memoryless system.

    Entry (n, (j, p)) is the trapezoid weight of node j times
    (pairing_{n,p} / lambda_n) exp(i lambda_n (T - t_j)); applying the
    matrix to control samples therefore reproduces exactly the trapezoid
    Duhamel terminal state of :func:`viscowave.cosine.elastic_solution`.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    if abs(grid[-1] - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("grid extent does not match the control horizon")
    profiles, pairings, chol = _profile_setup(basis, profiles)
    lam = basis.lam
    tw = h * trap_weights(grid.size)
    osc = np.exp(1j * np.outer(lam, t_end - grid))      # (N, J+1)
    core = osc[:, :, None] * (pairings / lam[:, None])[:, None, :]
    core *= tw[None, :, None]
    rows_plus = core.reshape(lam.size, -1)
    rows = np.vstack([rows_plus, rows_plus.conj()])
    return MomentMatrix(rows=rows, quad=tw, lam=lam, grid=grid,
                        profile_basis=profiles, kind="elastic",
                        prof_chol=chol)


def build_viscoelastic_moment_matrix(basis, kernel, t_end, grid,
                                     profiles=None):
    """Moment rows of the system with memory, by impulse superposition.

    Column (j, p) holds the terminal (velocity/lambda, displacement)
    moments of the response to the control basis element (time hat at
    node j) x (profile p), computed from two unit-sample responses of the
    transformed-form solver and the time invariance of the dynamics.  With
    a zero kernel this reproduces the elastic rows to roundoff.
    """
    grid = np.asarray(grid, dtype=float)
    h = grid_step(grid)
    if abs(grid[-1] - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("grid extent does not match the control horizon")
    profiles, pairings, chol = _profile_setup(basis, profiles)
    lam = basis.lam
    n_nodes = grid.size
    last = n_nodes - 1

    form = None
    if kernel is not None and not kernel.is_zero:
        form = reduced_form(kernel, h, float(grid[-1]))

    w0, wp0 = _sample_responses(lam, form, grid, node=0)
    w1, wp1 = _sample_responses(lam, form, grid, node=1)

    # terminal response to a unit sample at node j (shift invariance):
    # node 0 is the start-up sample, node j >= 1 reads the node-1 response
    # at index J - j + 1
    term_w = np.empty((n_nodes, lam.size))
    term_wp = np.empty((n_nodes, lam.size))
    term_w[0] = w0[last]
    term_wp[0] = wp0[last]
    idx = last - np.arange(1, n_nodes) + 1
    term_w[1:] = w1[idx]
    term_wp[1:] = wp1[idx]

    moments = (term_wp / lam + 1j * term_w)             # (J+1, N), unit pairing
    core = moments.T[:, :, None] * pairings[:, None, :]  # (N, J+1, P)
    rows_plus = core.reshape(lam.size, -1)
    rows = np.vstack([rows_plus, rows_plus.conj()])
    tw = h * trap_weights(n_nodes)
    return MomentMatrix(rows=rows, quad=tw, lam=lam, grid=grid,
                        profile_basis=profiles, kind="viscoelastic",
                        prof_chol=chol)


@dataclass
class MinNormResult:
    """Outcome of a minimum-norm steering solve."""

    control: ControlSignal
    residual: float
    gramian_min: float
    gramian_max: float
    rank: int


def min_norm_control(target_xi, target_eta, mm, reg=1e-10):
    """Least-L2-norm control hitting the terminal targets.

    Solves the whitened moment system by SVD, truncating singular values
    below reg times the largest (reg = 0 keeps everything down to machine
    precision).  The reported residual is the predicted terminal
    H^-1 x L2 error; with an incompatible or rank-deficient target it is
    simply nonzero rather than an exception.
    """
    c = mm.target_moments(target_xi, target_eta)
    b = mm.whitened()
    u, sing, vh = np.linalg.svd(b, full_matrices=False)
    if reg < 0.0:
        raise ValueError("truncation threshold must be nonnegative")
    cutoff = (reg if reg > 0.0 else max(b.shape) * np.finfo(float).eps)
    keep = sing > cutoff * sing[0]
    rank = int(np.count_nonzero(keep))
    coeff = (u[:, keep].conj().T @ c) / sing[keep]
    g = vh[keep].conj().T @ coeff
    residual = float(np.linalg.norm(b @ g - c) / np.sqrt(2.0))

    n_nodes = mm.grid.size
    n_prof = len(mm.profile_basis)
    h = grid_step(mm.grid)
    tw = np.sqrt(h * trap_weights(n_nodes))
    g = g.reshape(n_nodes, n_prof) / tw[:, None]
    amp = g @ np.linalg.inv(mm.prof_chol)
    # conjugate-paired rows force a real control; the imaginary part is
    # pure roundoff
    amp = amp.real
    control = ControlSignal(mm.grid, list(mm.profile_basis), amp)
    return MinNormResult(
        control=control, residual=residual,
        gramian_min=float(sing[-1] ** 2), gramian_max=float(sing[0] ** 2),
        rank=rank,
    )


def terminal_error(xi_sim, eta_sim, target_xi, target_eta, lam):
    """H^-1 x L2 distance between a simulated terminal pair and a target."""
    d_xi = np.asarray(xi_sim) - target_xi.coeffs
    d_eta = np.asarray(eta_sim) - target_eta.coeffs
    return float(np.sqrt(np.sum(np.abs(d_eta / lam) ** 2)
                         + np.sum(np.abs(d_xi) ** 2)))


def steer_and_verify(control, kernel, basis, targets, t_end):
    """Forward-simulate a control and measure the terminal miss.

    The simulation runs the memory-form modal solver (never the moment
    matrix): the boundary pairing q_n(t) forces mode n through
    g_n = q_n + M*q_n together with the -lam^2 M*w memory term.  Returns a
    report dict with the H^-1 x L2 terminal error and the control norm.
    """
    target_xi, target_eta = targets
    grid = control.grid
    if abs(control.horizon - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("control horizon does not match the requested time")
    h = grid_step(grid)
    shapes = np.stack(control.profile_basis)
    pairings = basis.traces @ (basis.quad_weights[:, None] * shapes.T)
    q = control.amplitudes @ pairings.T                  # (J+1, N)
    if kernel is not None and not kernel.is_zero:
        m_values = kernel.values_on(grid)
        g = q + causal_convolve(m_values, q, h)
    else:
        g = q
    traj = solve_modal_memory(basis.lam, kernel, 0.0, 0.0, g, grid)
    xi_sim, eta_sim = traj.z[-1], traj.zp[-1]
    err = terminal_error(xi_sim, eta_sim, target_xi, target_eta, basis.lam)
    return {
        "terminal_error_Hm1_L2": err,
        "control_norm": control.l2_norm(basis),
        "terminal_xi": xi_sim,
        "terminal_eta": eta_sim,
    }


def zero_damping_frame(mm, a):
    """Moment rows rewritten in the exponentially rescaled variables.

    The substitution v = exp(-a t / 2) w together with control rescaling
    f -> exp(a s / 2) f maps the memory dynamics to its zero-damping form.
    It is relative to *that* control-to-state map that the memory term
    perturbs the elastic rows compactly, with row-wise differences
    shrinking like 1/lambda_n; in the physical frame the exponential
    envelope hides the decay.  Returns a new matrix with the substitution
    applied (an identical copy when a = 0).
    """
    n = mm.n_modes
    wp = mm.rows[:n].real * mm.lam[:, None]
    w = mm.rows[:n].imag
    damp = np.exp(-0.5 * a * mm.horizon)
    vp = damp * (wp - 0.5 * a * w)
    v = damp * w
    col_w = np.repeat(np.exp(0.5 * a * mm.grid), len(mm.profile_basis))
    plus = (vp / mm.lam[:, None] + 1j * v) * col_w[None, :]
    return MomentMatrix(
        rows=np.vstack([plus, plus.conj()]), quad=mm.quad.copy(),
        lam=mm.lam, grid=mm.grid, profile_basis=list(mm.profile_basis),
        kind=mm.kind, prof_chol=mm.prof_chol,
    )


def reachability_gap(mm_e, mm_v):
    """Singular spectrum of the difference of two moment operators.

    Returns (singular values sorted descending, ratios to the largest).
    A fast decay of the spectrum is the numerical signature that the
    memory term perturbs the elastic control map compactly.
    """
    if mm_e.rows.shape != mm_v.rows.shape:
        raise ValueError("moment matrices have different shapes")
    if not np.allclose(mm_e.grid, mm_v.grid):
        raise ValueError("moment matrices use different time grids")
    diff = mm_v.whitened() - mm_e.whitened()
    sing = np.linalg.svd(diff, compute_uv=False)
    return sing, sing / sing[0] if sing[0] > 0.0 else sing
