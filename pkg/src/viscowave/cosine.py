"""Diagonal operator algebra on eigenfunction coefficient sequences.

The free wave group acts diagonally on eigencoefficients: the cosine family
multiplies mode n by cos(lambda_n t), the sine family by i sin(lambda_n t),
and integer powers of the group generator (which squares to the spatial
operator) multiply by (i lambda_n)^k.  Coefficients are complex throughout
so these factors are represented literally; physical fields are the real
part.

Each coefficient sequence carries a scale tag recording which weighted l2
norm is meant: "H10" weights mode n by lambda_n, "L2" by 1, "Hm1" by
1/lambda_n.  One generator application moves the tag down one space.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import grid_step, trap_weights

#: scale tag -> exponent p in the norm weight lambda_n**p
SCALE_EXPONENT = {"H10": 1, "L2": 0, "Hm1": -1}
_EXPONENT_SCALE = {v: k for k, v in SCALE_EXPONENT.items()}


@dataclass
class CoeffState:
    """Coefficient sequence of a field in the eigenbasis, with a norm tag."""

    coeffs: np.ndarray
    scale: str = "L2"

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coefficients must form a nonempty 1-d sequence")
        if self.scale not in SCALE_EXPONENT:
            raise ValueError(f"unknown scale tag {self.scale!r}")

    def __len__(self):
        return self.coeffs.size

    def norm(self, basis):
        """Weighted l2 norm matching the scale tag."""
        w = _weights(self, basis)
        return float(np.sqrt(np.sum(np.abs(w * self.coeffs) ** 2)))

    def copy(self):
        return CoeffState(self.coeffs.copy(), self.scale)

    @classmethod
    def unit(cls, mode, n_modes, scale="L2"):
        """The standard basis coefficient e_mode (1-based index)."""
        coeffs = np.zeros(n_modes, dtype=complex)
        coeffs[mode - 1] = 1.0
        return cls(coeffs, scale)

    @classmethod
    def zeros(cls, n_modes, scale="L2"):
        return cls(np.zeros(n_modes, dtype=complex), scale)


def coeffs_to_csv(state, path):
    """Write a coefficient state as CSV rows (n, Re, Im)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# scale={state.scale}\n")
        for n, c in enumerate(state.coeffs, start=1):
            fh.write(f"{n},{float(c.real)!r},{float(c.imag)!r}\n")


def coeffs_from_csv(path, scale=None):
    """Load a coefficient state written by :func:`coeffs_to_csv`.

    The scale tag is read from the header comment unless overridden.
    """
    coeffs = []
    file_scale = "L2"
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "scale=" in line:
                    file_scale = line.split("scale=")[1].strip()
                continue
            n, re, im = line.split(",")
            if int(n) != len(coeffs) + 1:
                raise ValueError(f"{path}: rows must be numbered 1..N")
            coeffs.append(float(re) + 1j * float(im))
    return CoeffState(np.array(coeffs), scale or file_scale)


def _weights(state, basis):
    if len(state) != basis.n_modes:
        raise ValueError(
            f"state has {len(state)} coefficients but the basis has "
            f"{basis.n_modes} modes"
        )
    return basis.lam ** SCALE_EXPONENT[state.scale]


def apply_cosine(state, t, basis):
    """Cosine propagator: mode n scales by cos(lambda_n t)."""
    _weights(state, basis)
    return CoeffState(state.coeffs * np.cos(basis.lam * t), state.scale)


def apply_sine(state, t, basis):
    """Sine propagator: mode n scales by i sin(lambda_n t)."""
    _weights(state, basis)
    return CoeffState(state.coeffs * (1j * np.sin(basis.lam * t)), state.scale)


def apply_generator_power(state, k, basis):
    """Integer power of the group generator: mode n scales by (i lambda_n)^k.

    k = 2 realizes the spatial operator (factor -lambda_n^2); negative k is
    allowed since every lambda_n is positive.  The scale tag moves down by
    k spaces and must stay within the three tracked spaces.
    """
    _weights(state, basis)
    k = int(k)
    new_exp = SCALE_EXPONENT[state.scale] - k
    if new_exp not in _EXPONENT_SCALE:
        raise ValueError(
            f"generator power {k} leaves the tracked scales "
            f"(from {state.scale})"
        )
    return CoeffState(state.coeffs * (1j * basis.lam) ** k,
                      _EXPONENT_SCALE[new_exp])


def cosine_product_residual(s, r, state, basis):
    """Max-norm defect of sine(s) cosine(r) = (sine(s+r) + sine(s-r)) / 2.

    The identity holds exactly mode by mode, so the returned value is pure
    roundoff for any state.
    """
    lhs = apply_sine(apply_cosine(state, r, basis), s, basis)
    half_sum = 0.5 * (
        apply_sine(state, s + r, basis).coeffs
        + apply_sine(state, s - r, basis).coeffs
    )
    return float(np.max(np.abs(lhs.coeffs - half_sum)))


def _control_forcing(control, basis):
    """Per-mode boundary forcing samples <trace_n, f(t_j)> from a control.

    Works with any object exposing grid, profile_basis and amplitudes
    (see :class:`viscowave.control.ControlSignal`).
    """
    pair = np.column_stack(
        [basis.boundary_pairing(p) for p in control.profile_basis]
    )
    return control.amplitudes @ pair.T  # (J+1, N)


def elastic_solution(u0, u1, forcing, control, t, basis, grid=None):
    """Terminal state of the memoryless wave system at time t.

    Mode n evolves by

        u_n(t) = u0_n cos(lambda_n t) + (u1_n / lambda_n) sin(lambda_n t)
                 + (1 / lambda_n) int_0^t sin(lambda_n (t-s)) g_n(s) ds

    with g_n collecting the distributed forcing coefficient and the
    boundary pairing <trace_n, f(s)>; the velocity uses the cosine kernel.
    Duhamel integrals are trapezoid sums on the supplied grid, and t must
    be one of its nodes when any input is time-sampled.

    u0 must be tagged H10 or L2 and u1 one scale lower.  forcing is an
    optional (J+1, N) array of per-mode coefficients; control is an
    optional boundary signal.  Returns (displacement, velocity) states.
    """
    if u0.scale not in ("H10", "L2"):
        raise ValueError("initial displacement must be H10 or L2")
    expected = _EXPONENT_SCALE[SCALE_EXPONENT[u0.scale] - 1]
    if u1.scale != expected:
        raise ValueError(
            f"initial velocity scale {u1.scale!r} is not one below "
            f"{u0.scale!r}"
        )
    _weights(u0, basis)
    _weights(u1, basis)
    lam = basis.lam

    u = u0.coeffs * np.cos(lam * t) + u1.coeffs * np.sin(lam * t) / lam
    up = -u0.coeffs * lam * np.sin(lam * t) + u1.coeffs * np.cos(lam * t)

    if forcing is not None or control is not None:
        if control is not None:
            if grid is None:
                grid = control.grid
            elif not np.array_equal(grid, control.grid):
                raise ValueError("control grid does not match the given grid")
            if control.grid[-1] > t + 1e-9 * max(1.0, t):
                raise ValueError(
                    "control extends past the evaluation time t"
                )
        if grid is None:
            raise ValueError("time-sampled inputs need a grid")
        grid = np.asarray(grid, dtype=float)
        h = grid_step(grid)
        j_end = int(round(t / h))
        if abs(j_end * h - t) > 1e-9 * max(1.0, t) or j_end >= grid.size:
            raise ValueError("t must be a node of the sampling grid")
        g = np.zeros((j_end + 1, basis.n_modes), dtype=complex)
        if forcing is not None:
            forcing = np.asarray(forcing)
            if forcing.shape[0] < j_end + 1 or forcing.shape[1] != basis.n_modes:
                raise ValueError("forcing samples do not cover grid x modes")
            g += forcing[: j_end + 1]
        if control is not None:
            q = _control_forcing(control, basis)
            if q.shape[0] < j_end + 1:
                raise ValueError("control is shorter than the requested time")
            g += q[: j_end + 1]
        lag = t - grid[: j_end + 1, None]
        w = trap_weights(j_end + 1)[:, None]
        u += h * np.sum(w * np.sin(lam * lag) * g, axis=0) / lam
        up += h * np.sum(w * np.cos(lam * lag) * g, axis=0)

    return CoeffState(u, u0.scale), CoeffState(up, u1.scale)
