"""Memory kernels, resolvent kernels and the constants of the transformed form.

A relaxation kernel M(t) enters the wave dynamics through the convolution
term int_0^t M(t-s) L w(s) ds.  Its resolvent kernel R(t) solves the
second-kind Volterra equation

    R(t) + int_0^t M(t-s) R(s) ds = M(t),

and the numbers a = R(0), b = R'(0) together with K(t) = R''(t) are exactly
the data needed to rewrite the dynamics so that the memory acts through
scalar convolutions only (the MacCamy substitution).  The additional
exponential rescaling v(t) = exp(-a t / 2) w(t) removes the damping term
a w'; the resulting zero-damping coefficients are provided by
:func:`reduced_form`.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GuardError
from .quadrature import causal_convolve, grid_step, uniform_grid

# Default residual tolerance for resolvents backed by an analytic form.
ANALYTIC_TOL = 1e-8


@dataclass(frozen=True)
class MemoryKernel:
    """Relaxation kernel, either a Prony exponential sum or grid samples.

    kind      -- "prony", "zero" or "sampled"
    terms     -- for Prony kernels, tuple of (weight, rate) pairs giving
                 M(t) = sum_i c_i exp(-g_i t); weights must be finite and
                 rates nonnegative
    samples   -- for sampled kernels, values M(t_j) on a uniform grid
    step      -- grid step of the samples
    horizon   -- final time covered by the kernel (None = unbounded)
    """

    kind: str
    terms: tuple = ()
    samples: Optional[np.ndarray] = None
    step: Optional[float] = None
    horizon: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("prony", "zero", "sampled"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "prony":
            if not self.terms:
                raise ValueError("prony kernel needs at least one term")
            for c, g in self.terms:
                if not (np.isfinite(c) and np.isfinite(g)):
                    raise ValueError("prony weights and rates must be finite")
                if g < 0.0:
                    raise ValueError("prony rates must be nonnegative")
        if self.kind == "sampled":
            vals = self.samples
            if vals is None or len(vals) < 3:
                raise ValueError("sampled kernel needs at least 3 samples")
            if self.step is None or self.step <= 0.0:
                raise ValueError("sampled kernel needs a positive step")
            if not np.all(np.isfinite(vals)):
                raise ValueError("sampled kernel values must be finite")

    @classmethod
    def prony(cls, terms, horizon=None):
        terms = tuple((float(c), float(g)) for c, g in terms)
        if not terms:
            return cls.zero()
        return cls(kind="prony", terms=terms, horizon=horizon)

    @classmethod
    def zero(cls):
        return cls(kind="zero")

    @classmethod
    def sampled(cls, values, step):
        values = np.asarray(values, dtype=float).copy()
        values.flags.writeable = False
        return cls(
            kind="sampled",
            samples=values,
            step=float(step),
            horizon=float(step) * (len(values) - 1),
        )

    @property
    def is_zero(self):
        return self.kind == "zero"

    def values_on(self, grid):
        """Kernel samples on a uniform grid.

        Sampled kernels must already live on this grid (same step, at least
        as long); Prony kernels are evaluated in closed form.
        """
        grid = np.asarray(grid, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(grid)
        if self.kind == "prony":
            out = np.zeros_like(grid)
            for c, g in self.terms:
                out += c * np.exp(-g * grid)
            return out
        h = grid_step(grid)
        if abs(h - self.step) > 1e-12 * max(1.0, self.step):
            raise ValueError(
                f"sampled kernel step {self.step} does not match grid step {h}"
            )
        if len(self.samples) < grid.size:
            raise ValueError("sampled kernel does not cover the requested grid")
        return np.array(self.samples[: grid.size])


@dataclass
class ResolventKernel:
    """Resolvent R of a memory kernel on a uniform grid, with derivatives.

    values holds R(t_j); rp and k hold R'(t_j) and K(t_j) = R''(t_j).  When
    the source kernel was a one-term exponential the closed-form resolvent
    is stored in analytic_form as a (weight, rate) pair, and the sampled
    arrays are evaluated from it.  residual is the identity defect measured
    at construction and tol the bound it was checked against.
    """

    grid: np.ndarray
    values: np.ndarray
    a: float
    b: float
    rp: np.ndarray
    k: np.ndarray
    analytic_form: Optional[tuple] = None
    residual: float = 0.0
    tol: float = ANALYTIC_TOL
    source: MemoryKernel = field(default_factory=MemoryKernel.zero)

    @property
    def h(self):
        return grid_step(self.grid)


def _check_resolution(kernel, h):
    if kernel.kind == "prony":
        worst = max(g for _, g in kernel.terms)
        if worst * h > 1.0:
            raise GuardError(
                f"step {h} under-resolves kernel decay rate {worst} "
                "(need max rate * h <= 1)"
            )


def march_resolvent(m_values, h):
    """Trapezoid marching solution of R + M*R = M for sampled M.

    The node t_0 gives R_0 = M_0; each later node solves the trapezoid
    discretization of the Volterra equation for R_j, which is well posed
    whenever 1 + h M_0 / 2 != 0.
    """
    m_values = np.asarray(m_values, dtype=float)
    n = m_values.size
    if n < 2:
        raise ValueError("resolvent march needs at least two nodes")
    r = np.zeros(n)
    r[0] = m_values[0]
    denom = 1.0 + 0.5 * h * m_values[0]
    if denom == 0.0:
        raise ValueError("trapezoid march is singular for this kernel/step")
    for j in range(1, n):
        # trapezoid sum over i = 0..j-1 of M[j-i] R[i], plus half weights
        acc = np.dot(m_values[j:0:-1], r[:j]) - 0.5 * m_values[j] * r[0]
        r[j] = (m_values[j] - h * acc) / denom
    return r


def _fd_first(values, h):
    """Second-order first derivative on a uniform grid (one-sided at ends)."""
    v = np.asarray(values, dtype=float)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return out


def _fd_second(values, h):
    """Second-order second derivative on a uniform grid (one-sided at ends)."""
    v = np.asarray(values, dtype=float)
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
    out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / (h * h)
    out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / (h * h)
    return out


def resolvent_kernel(kernel, h, t_max):
    """Resolvent of a memory kernel on the uniform grid covering [0, t_max].

    One-term exponential kernels c exp(-g t) get the closed-form resolvent
    c exp(-(g + c) t); everything else is marched through the trapezoid
    scheme and differentiated by second-order finite differences.
    """
    if t_max < 2.0 * h:
        raise ValueError("resolvent horizon must cover at least two steps")
    grid = uniform_grid(t_max, h)
    _check_resolution(kernel, h)

    if kernel.is_zero:
        zeros = np.zeros_like(grid)
        return ResolventKernel(
            grid=grid, values=zeros, a=0.0, b=0.0, rp=zeros.copy(),
            k=zeros.copy(), analytic_form=(), residual=0.0,
            tol=ANALYTIC_TOL, source=kernel,
        )

    if kernel.kind == "prony" and len(kernel.terms) == 1:
        c, g = kernel.terms[0]
        rate = g + c
        values = c * np.exp(-rate * grid)
        rp = -rate * values
        k = rate * rate * values
        # closed-form identity defect: M*R = M - R exactly, so the residual
        # is pure roundoff of the evaluated expressions
        residual = float(np.max(np.abs(values + (kernel.values_on(grid) - values)
                                       - kernel.values_on(grid))))
        return ResolventKernel(
            grid=grid, values=values, a=float(c), b=float(-c * rate),
            rp=rp, k=k, analytic_form=((c, rate),), residual=residual,
            tol=ANALYTIC_TOL, source=kernel,
        )

    m_values = kernel.values_on(grid)
    values = march_resolvent(m_values, h)
    if values.size < 5:
        raise ValueError("grid too short to extract resolvent derivatives")
    rp = _fd_first(values, h)
    k = _fd_second(values, h)
    res = ResolventKernel(
        grid=grid, values=values, a=float(values[0]), b=float(rp[0]),
        rp=rp, k=k, analytic_form=None, residual=0.0, tol=ANALYTIC_TOL,
        source=kernel,
    )
    res.residual = verify_resolvent_identity(kernel, res)
    scale = max(1.0, float(np.max(np.abs(m_values))))
    res.tol = max(ANALYTIC_TOL, 10.0 * scale * h * h)
    return res


def maccamy_constants(res):
    """Extract (a, b, K) = (R(0), R'(0), R'') from a resolvent kernel.

    Uses the stored analytic form when present, otherwise second-order
    finite differences; the grid must carry at least five nodes for the
    one-sided second-difference stencils.
    """
    if res.analytic_form is not None:
        a = sum(w for w, _ in res.analytic_form)
        b = -sum(w * r for w, r in res.analytic_form)
        k = np.zeros_like(res.grid)
        for w, r in res.analytic_form:
            k += w * r * r * np.exp(-r * res.grid)
        return float(a), float(b), k
    if res.values.size < 5:
        raise ValueError("sampled resolvent too short for second differences")
    h = res.h
    a = float(res.values[0])
    b = float(_fd_first(res.values, h)[0])
    return a, b, _fd_second(res.values, h)


def verify_resolvent_identity(kernel, res):
    """Max defect of both resolvent identities on the grid.

    Returns max_j over |R + M*R - M| and |M - R - R*M| with the convolutions
    evaluated by trapezoid quadrature; the two identities agree in the
    continuum, so a large value flags either a wrong or corrupted resolvent
    or an under-resolved grid.
    """
    grid = res.grid
    h = res.h
    m_values = kernel.values_on(grid)
    if m_values.shape != res.values.shape:
        raise ValueError("kernel and resolvent grids do not match")
    lhs = res.values + causal_convolve(m_values, res.values, h) - m_values
    rhs = m_values - res.values - causal_convolve(res.values, m_values, h)
    return float(max(np.max(np.abs(lhs)), np.max(np.abs(rhs))))


@dataclass(frozen=True)
class MacCamyForm:
    """Zero-damping form of the transformed dynamics.

    After the substitution that removes the differential operator from the
    memory term, the equation carries a damping a w', a zeroth-order b w and
    a scalar convolution K * w.  The further rescaling v = exp(-a t / 2) w
    trades the damping for the adjusted coefficients stored here:

        b_eff = b + a^2 / 4,   K_eff(t) = exp(-a t / 2) K(t).

    a is kept so callers can map v back to w.
    """

    a: float
    b: float
    kernel: np.ndarray
    grid: np.ndarray

    @property
    def h(self):
        return grid_step(self.grid)

    @property
    def is_zero(self):
        return self.a == 0.0 and self.b == 0.0 and not np.any(self.kernel)

    @classmethod
    def zero(cls, grid):
        grid = np.asarray(grid, dtype=float)
        return cls(a=0.0, b=0.0, kernel=np.zeros_like(grid), grid=grid)


def reduced_form(kernel, h, t_max):
    """Resolve a memory kernel and return its zero-damping MacCamy data."""
    grid = uniform_grid(t_max, h)
    if kernel is None or kernel.is_zero:
        return MacCamyForm.zero(grid)
    res = resolvent_kernel(kernel, h, t_max)
    a, b, k = maccamy_constants(res)
    return MacCamyForm(
        a=a,
        b=b + 0.25 * a * a,
        kernel=np.exp(-0.5 * a * grid) * k,
        grid=grid,
    )
