"""Eigenbases and boundary trace data.

Everything downstream consumes only (lambda_n, boundary traces, quadrature
weights).  The interval basis is fully explicit; the rectangle basis shows
repeated eigenvalues and a genuinely sampled edge trace.
"""

import numpy as np

from viscowave import check_weyl_asymptotics, interval_basis, rectangle_basis

b = interval_basis(5, np.pi, "left")
print("interval (0, pi), trace at the left endpoint:")
print(f"{'n':>3} {'lambda_n':>10} {'trace_n':>10} {'trace/lambda':>13}")
for n in range(5):
    print(f"{n + 1:>3} {b.lam[n]:>10.4f} {b.traces[n, 0]:>10.4f} "
          f"{b.traces[n, 0] / b.lam[n]:>13.6f}")
print("trace/lambda is constant: the one-endpoint steering problem is a "
      "classical exponential moment problem.\n")

r = rectangle_basis(3, 3, np.pi, np.pi, "bottom", 41)
print("rectangle (0,pi)^2, bottom edge, first 6 modes:")
print(f"{'(m,k)':>7} {'lambda':>9} {'edge-integral of trace^2':>26}")
for i in range(6):
    quad = np.sum(r.quad_weights * r.traces[i] ** 2)
    m, k = r.labels[i]
    exact = 2 * k**2 / np.pi
    print(f"{str((m, k)):>7} {r.lam[i]:>9.4f} {quad:>16.8f}"
          f"  (exact {exact:.8f})")
print("the sqrt(5) pair shows a repeated eigenvalue kept as two modes.\n")

m1, M1 = check_weyl_asymptotics(interval_basis(50, np.pi, "left"), 1)
m2, M2 = check_weyl_asymptotics(rectangle_basis(10, 10, np.pi, np.pi,
                                                "bottom", 21), 2)
print("eigenvalue growth lambda_n^2 / n^(2/d) stays pinched:")
print(f"  interval  (d=1): min = {m1:.4f}, max = {M1:.4f}  (exactly 1)")
print(f"  rectangle (d=2): min = {m2:.4f}, max = {M2:.4f}")
