"""Eigenvalue/boundary-trace data for the spatial operator on model geometries.

Everything downstream needs only the frequencies lambda_n (the operator
eigenvalue is -lambda_n^2) and the normal-derivative traces of the
eigenfunctions on the active boundary part, sampled at quadrature nodes.
Concrete constructors cover the Dirichlet problem on an interval and on a
rectangle edge; arbitrary bases can be loaded from CSV.

Trace sign convention: traces are inner-normal derivatives, so the interval
basis has trace lambda_n * sqrt(2/length) at the left endpoint.  Only the
relative signs across boundary nodes matter; a global flip just flips the
sign of any synthesized control.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class EigenBasis:
    """Spectral data (lambda_n, boundary traces, quadrature weights).

    lam          -- (N,) positive frequencies, nondecreasing
    traces       -- (N, Q) eigenfunction traces at the boundary nodes
    quad_weights -- (Q,) positive weights; their sum is the boundary measure
    dim          -- spatial dimension, or None for an abstract basis
    labels       -- optional per-mode identifiers (e.g. (m, k) index pairs)
    """

    lam: np.ndarray
    traces: np.ndarray
    quad_weights: np.ndarray
    dim: int | None = None
    labels: tuple = field(default=())

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        traces = np.atleast_2d(np.asarray(self.traces, dtype=float))
        weights = np.asarray(self.quad_weights, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("need at least one mode")
        if np.any(lam <= 0.0):
            raise ValueError("all frequencies must be positive")
        if np.any(np.diff(lam) < 0.0):
            raise ValueError("frequencies must be nondecreasing")
        if traces.shape != (lam.size, weights.size):
            raise ValueError(
                f"traces shape {traces.shape} does not match "
                f"{lam.size} modes x {weights.size} boundary nodes"
            )
        if np.any(weights <= 0.0):
            raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "traces", traces)
        object.__setattr__(self, "quad_weights", weights)

    @property
    def n_modes(self):
        return self.lam.size

    @property
    def n_boundary_nodes(self):
        return self.quad_weights.size

    @property
    def boundary_measure(self):
        return float(np.sum(self.quad_weights))

    def normalized_traces(self):
        """Traces divided by lambda_n, the natural moment-problem shapes."""
        return self.traces / self.lam[:, None]

    def truncated(self, n_modes):
        """Sub-basis keeping the first n_modes modes."""
        if not 1 <= n_modes <= self.n_modes:
            raise ValueError("invalid truncation size")
        return EigenBasis(
            lam=self.lam[:n_modes],
            traces=self.traces[:n_modes],
            quad_weights=self.quad_weights,
            dim=self.dim,
            labels=self.labels[:n_modes] if self.labels else (),
        )

    def boundary_pairing(self, profile):
        """<trace_n, profile> over the boundary, one value per mode."""
        profile = np.asarray(profile, dtype=float)
        if profile.shape != self.quad_weights.shape:
            raise ValueError("profile length must match the boundary nodes")
        return self.traces @ (self.quad_weights * profile)


def interval_basis(n_modes, length, control_end="left"):
    """Dirichlet sine basis on (0, length), traced at one or both endpoints.

    lambda_n = n pi / length and the eigenfunctions sqrt(2/length) sin(n pi
    x / length) have endpoint trace lambda_n sqrt(2/length); each selected
    endpoint becomes one boundary node of weight 1.
    """
    if n_modes < 1:
        raise ValueError("need at least one mode")
    if length <= 0.0:
        raise ValueError("interval length must be positive")
    if control_end not in ("left", "right", "both"):
        raise ValueError("control_end must be 'left', 'right' or 'both'")
    n = np.arange(1, n_modes + 1)
    lam = n * np.pi / length
    amp = lam * np.sqrt(2.0 / length)
    left = amp
    right = amp * (-1.0) ** (n + 1)
    if control_end == "left":
        traces = left[:, None]
        weights = np.array([1.0])
    elif control_end == "right":
        traces = right[:, None]
        weights = np.array([1.0])
    else:
        traces = np.column_stack([left, right])
        weights = np.array([1.0, 1.0])
    return EigenBasis(lam=lam, traces=traces, quad_weights=weights, dim=1)


_EDGES = ("bottom", "top", "left", "right")


def rectangle_basis(nx, ny, lx, ly, edge="bottom", n_quad=33):
    """Product sine basis on (0, lx) x (0, ly), traced on one edge.

    lambda_{m,k}^2 = (m pi / lx)^2 + (k pi / ly)^2; modes are sorted by
    lambda with ties broken by the (m, k) index pair, and repeated
    eigenvalues are kept as distinct modes.  The trace is the inner-normal
    derivative of the eigenfunction sampled at composite-trapezoid nodes
    along the chosen edge.
    """
    if nx < 1 or ny < 1:
        raise ValueError("need at least one mode per axis")
    if lx <= 0.0 or ly <= 0.0:
        raise ValueError("side lengths must be positive")
    if n_quad < 2:
        raise ValueError("need at least two boundary quadrature nodes")
    if edge not in _EDGES:
        raise ValueError(f"edge must be one of {_EDGES}")

    modes = []
    for m in range(1, nx + 1):
        for k in range(1, ny + 1):
            lam2 = (m * np.pi / lx) ** 2 + (k * np.pi / ly) ** 2
            modes.append((np.sqrt(lam2), m, k))
    modes.sort(key=lambda t: (t[0], t[1], t[2]))

    edge_len = lx if edge in ("bottom", "top") else ly
    s = np.linspace(0.0, edge_len, n_quad)
    dx = edge_len / (n_quad - 1)
    weights = np.full(n_quad, dx)
    weights[0] = weights[-1] = 0.5 * dx

    norm = 2.0 / np.sqrt(lx * ly)
    traces = np.empty((len(modes), n_quad))
    for i, (_, m, k) in enumerate(modes):
        if edge == "bottom":
            traces[i] = norm * (k * np.pi / ly) * np.sin(m * np.pi * s / lx)
        elif edge == "top":
            traces[i] = norm * (k * np.pi / ly) * (-1.0) ** (k + 1) * np.sin(
                m * np.pi * s / lx)
        elif edge == "left":
            traces[i] = norm * (m * np.pi / lx) * np.sin(k * np.pi * s / ly)
        else:
            traces[i] = norm * (m * np.pi / lx) * (-1.0) ** (m + 1) * np.sin(
                k * np.pi * s / ly)

    return EigenBasis(
        lam=np.array([t[0] for t in modes]),
        traces=traces,
        quad_weights=weights,
        dim=2,
        labels=tuple((m, k) for _, m, k in modes),
    )


def check_weyl_asymptotics(basis, dim=None):
    """Extreme ratios lambda_n^2 / n^(2/d) over the available modes.

    The squared frequencies of a d-dimensional Dirichlet problem grow like
    n^(2/d), so both returned numbers must stay positive and bounded; for
    the interval basis they are exactly equal.
    """
    d = dim if dim is not None else basis.dim
    if d is None or d < 1:
        raise ValueError("need the spatial dimension to scale the spectrum")
    if basis.n_modes < 10:
        raise ValueError("too few modes for an asymptotics check (need 10)")
    n = np.arange(1, basis.n_modes + 1)
    ratios = basis.lam**2 / n ** (2.0 / d)
    return float(np.min(ratios)), float(np.max(ratios))


def basis_to_csv(basis, path):
    """Write a basis as CSV: a weights row, then one (lambda, traces) row per mode."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("weights," + ",".join(repr(float(w)) for w in basis.quad_weights))
        fh.write("\n")
        for i in range(basis.n_modes):
            row = [repr(float(basis.lam[i]))]
            row += [repr(float(v)) for v in basis.traces[i]]
            fh.write(",".join(row) + "\n")


def basis_from_csv(path):
    """Load an abstract basis written by :func:`basis_to_csv`."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("weights"):
        raise ValueError(f"{path}: first row must be the weights header")
    weights = np.array([float(v) for v in lines[0].split(",")[1:]])
    lam = []
    traces = []
    for ln in lines[1:]:
        vals = [float(v) for v in ln.split(",")]
        if len(vals) != 1 + weights.size:
            raise ValueError(f"{path}: row has {len(vals)} fields, "
                             f"expected {1 + weights.size}")
        lam.append(vals[0])
        traces.append(vals[1:])
    return EigenBasis(
        lam=np.array(lam), traces=np.array(traces),
        quad_weights=weights, dim=None,
    )
