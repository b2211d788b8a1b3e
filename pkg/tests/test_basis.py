import numpy as np
import numpy.testing as npt
import pytest

from viscowave import (EigenBasis, basis_from_csv, basis_to_csv,
                       check_weyl_asymptotics, interval_basis,
                       rectangle_basis)


def test_interval_basis_closed_form():
    b = interval_basis(3, np.pi, "left")
    npt.assert_allclose(b.lam, [1.0, 2.0, 3.0])
    npt.assert_allclose(b.traces[:, 0],
                        np.array([1, 2, 3]) * np.sqrt(2 / np.pi))
    npt.assert_allclose(b.quad_weights, [1.0])


def test_interval_unit_length():
    b = interval_basis(1, 1.0, "left")
    assert b.lam[0] == pytest.approx(np.pi)
    assert b.traces[0, 0] == pytest.approx(np.pi * np.sqrt(2.0))


def test_normalized_traces_constant():
    # trace_n / lambda_n is the same for every mode: the one-endpoint
    # moment problem reduces to a classical exponential-family problem
    b = interval_basis(12, np.pi, "left")
    npt.assert_allclose(b.normalized_traces(),
                        np.sqrt(2 / np.pi) * np.ones((12, 1)), rtol=1e-14)


def test_interval_trace_relation_exact():
    for length in (1.0, np.pi, 2.5):
        b = interval_basis(9, length, "left")
        npt.assert_allclose(b.traces[:, 0], b.lam * np.sqrt(2 / length),
                            rtol=1e-14)


def test_interval_both_ends():
    b = interval_basis(4, np.pi, "both")
    assert b.n_boundary_nodes == 2
    assert b.boundary_measure == pytest.approx(2.0)
    # right-end traces alternate sign relative to the left end
    signs = b.traces[:, 1] / b.traces[:, 0]
    npt.assert_allclose(signs, [1.0, -1.0, 1.0, -1.0], rtol=1e-14)


def test_rectangle_lowest_mode():
    b = rectangle_basis(1, 1, np.pi, np.pi, "bottom", 25)
    assert b.lam[0] == pytest.approx(np.sqrt(2.0))
    s = np.linspace(0.0, np.pi, 25)
    npt.assert_allclose(b.traces[0], (2 / np.pi) * np.sin(s), atol=1e-14)


def test_rectangle_eigenvalue_multiset():
    b = rectangle_basis(2, 2, np.pi, np.pi, "bottom", 9)
    npt.assert_allclose(b.lam,
                        np.sqrt([2.0, 5.0, 5.0, 8.0]), rtol=1e-14)
    # the repeated sqrt(5) pair stays as two distinct modes
    assert b.labels[1] == (1, 2) and b.labels[2] == (2, 1)


def test_rectangle_edge_integral_oracle():
    # sum_q w_q trace(x_q)^2 against the exact edge integral
    # int_0^pi (2k/pi)^2 sin^2(m x) dx = 2 k^2 / pi; the composite
    # trapezoid rule is exact for these trigonometric integrands
    b = rectangle_basis(2, 2, np.pi, np.pi, "bottom", 41)
    got = np.sum(b.quad_weights * b.traces**2, axis=1)
    want = np.array([2 * k**2 / np.pi for _, k in b.labels])
    npt.assert_allclose(got, want, rtol=1e-12)


def test_rectangle_edges_consistent():
    for edge in ("bottom", "top", "left", "right"):
        b = rectangle_basis(2, 3, 1.5, 2.0, edge, 21)
        assert b.n_modes == 6
        assert np.all(np.diff(b.lam) >= 0)
        assert b.boundary_measure == pytest.approx(
            1.5 if edge in ("bottom", "top") else 2.0)


def test_weyl_interval_exact():
    b = interval_basis(50, np.pi, "left")
    m_hat, big_m = check_weyl_asymptotics(b, 1)
    assert m_hat == pytest.approx(1.0, rel=1e-14)
    assert big_m == pytest.approx(1.0, rel=1e-14)


def test_weyl_rectangle_bounded():
    b = rectangle_basis(10, 10, np.pi, np.pi, "bottom", 21)
    m_hat, big_m = check_weyl_asymptotics(b, 2)
    assert 0.5 < m_hat <= big_m < 13.0
    # regression values recorded at first build
    assert m_hat == pytest.approx(1.4062, abs=2e-4)
    assert big_m == pytest.approx(2.5, abs=1e-12)


def test_weyl_needs_enough_modes():
    with pytest.raises(ValueError):
        check_weyl_asymptotics(interval_basis(5, np.pi, "left"), 1)


def test_reversed_order_rejected():
    with pytest.raises(ValueError):
        EigenBasis(lam=np.array([3.0, 2.0, 1.0]),
                   traces=np.ones((3, 1)), quad_weights=np.array([1.0]))


def test_invalid_bases_rejected():
    with pytest.raises(ValueError):
        EigenBasis(lam=np.array([0.0, 1.0]), traces=np.ones((2, 1)),
                   quad_weights=np.array([1.0]))
    with pytest.raises(ValueError):
        EigenBasis(lam=np.array([1.0, 2.0]), traces=np.ones((2, 2)),
                   quad_weights=np.array([1.0]))
    with pytest.raises(ValueError):
        EigenBasis(lam=np.array([1.0]), traces=np.ones((1, 1)),
                   quad_weights=np.array([-1.0]))


def test_truncated_subbasis():
    b = rectangle_basis(3, 3, np.pi, np.pi, "bottom", 15)
    sub = b.truncated(4)
    npt.assert_allclose(sub.lam, b.lam[:4])
    assert sub.labels == b.labels[:4]
    with pytest.raises(ValueError):
        b.truncated(0)


def test_csv_round_trip(tmp_path):
    b = rectangle_basis(2, 2, 1.0, 2.0, "left", 7)
    path = tmp_path / "basis.csv"
    basis_to_csv(b, path)
    loaded = basis_from_csv(path)
    npt.assert_allclose(loaded.lam, b.lam, rtol=1e-15)
    npt.assert_allclose(loaded.traces, b.traces, rtol=1e-15)
    npt.assert_allclose(loaded.quad_weights, b.quad_weights, rtol=1e-15)
    assert loaded.dim is None


def test_csv_rejects_missing_weights_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,0.5\n2.0,0.7\n")
    with pytest.raises(ValueError):
        basis_from_csv(path)


def test_boundary_pairing():
    b = interval_basis(3, np.pi, "both")
    pair = b.boundary_pairing(np.array([1.0, 0.0]))
    npt.assert_allclose(pair, b.traces[:, 0])
    with pytest.raises(ValueError):
        b.boundary_pairing(np.array([1.0]))


def test_rectangle_needs_two_quad_nodes():
    with pytest.raises(ValueError):
        rectangle_basis(2, 2, 1.0, 1.0, "bottom", 1)
