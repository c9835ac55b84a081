import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cylq.core import AliasingError, AngleGrid, FourierState, PhasePoint, symmetric_angle
from cylq.fiducials import make_fiducial
from cylq.gabor import (coherent_state, gabor_reconstruct, gabor_transform, isometry_defect,
                        kernel_numeric, kernel_row, reproduce, weyl_apply, weyl_matrix)


def _dense_U(p, n):
    # [U]_{kl} = e^{-imθ_s/2} e^{-ilθ} δ_{k,l+m}, written out entry by entry
    side = 2 * n + 1
    u = np.zeros((side, side), dtype=complex)
    for l in range(-n, n + 1):
        k = l + p.m
        if -n <= k <= n:
            u[k + n, l + n] = np.exp(-0.5j * p.m * symmetric_angle(p.theta) - 1j * l * p.theta)
    return u


def test_weyl_matrix_entries(rng):
    for _ in range(5):
        p = PhasePoint(int(rng.integers(-4, 5)), rng.uniform(0, 7))
        assert np.allclose(weyl_matrix(p, 6).entries, _dense_U(p, 6), atol=1e-15)


def test_weyl_apply_is_unitary_and_matches_matrix(rng):
    psi = FourierState.random(5, rng)
    p = PhasePoint(3, 2.2)
    out = weyl_apply(p, psi)
    assert out.n_max == 8
    assert out.norm() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(out.coeffs, weyl_matrix(p, 8).entries @ psi.padded(8).coeffs)


def test_weyl_identity_and_rotation():
    psi = FourierState.basis(2, 3)
    assert np.allclose(weyl_apply(PhasePoint(0, 0.0), psi).coeffs, psi.coeffs)
    # pure rotation multiplies e_n by e^{-inθ}
    assert weyl_apply(PhasePoint(0, 0.4), psi)[2] == pytest.approx(np.exp(-0.8j))


@settings(max_examples=30, deadline=None)
@given(st.integers(-3, 3), st.floats(0, 6.28), st.integers(-3, 3), st.floats(0, 6.28))
def test_weyl_composition(m1, t1, m2, t2):
    n = 10
    p, q = PhasePoint(m1, t1), PhasePoint(m2, t2)
    pq = p + q
    lhs = (weyl_matrix(p, n) @ weyl_matrix(q, n)).block(n // 2)
    s1, s2 = symmetric_angle(p.theta), symmetric_angle(q.theta)
    wrap = s1 + s2 - symmetric_angle(pq.theta)
    ph = np.exp(0.5j * (m1 * s2 - m2 * s1) - 0.5j * (m1 + m2) * wrap)
    assert np.max(np.abs(lhs - ph * weyl_matrix(pq, n).block(n // 2))) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(-3, 3), st.floats(0, 6.28), st.integers(-3, 3), st.floats(0, 6.28))
def test_weyl_conjugation(m1, t1, m2, t2):
    n = 10
    U, V = weyl_matrix(PhasePoint(m1, t1), n), weyl_matrix(PhasePoint(m2, t2), n)
    lhs = (V @ U @ V.dagger()).block(n // 2)
    rhs = np.exp(1j * (m2 * t1 - m1 * t2)) * U.block(n // 2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_transform_matches_inner_products(phi, grid, rng):
    psi = FourierState.random(8, rng)
    t = gabor_transform(phi, psi, 6, grid)
    for m in (-6, -1, 0, 4):
        for k in (0, 50, 129, 255):
            ref = coherent_state(phi, PhasePoint(m, grid.points[k])).inner(psi)
            assert abs(t.row(m)[k] - ref) < 1e-13


def test_transform_refuses_coarse_grid(phi):
    with pytest.raises(AliasingError, match="need K >= 65"):
        gabor_transform(phi, phi, 4, AngleGrid(64))


def test_isometry_and_reconstruction(phi, grid, rng):
    for _ in range(3):
        psi = FourierState.random(16, rng)
        t = gabor_transform(phi, psi, 48, grid)
        assert isometry_defect(phi, psi, t) < 1e-12
        rec = gabor_reconstruct(phi, t)
        assert (rec - psi).norm() < 1e-12


def test_isometry_defect_shrinks_with_momentum_window(rng):
    phi = make_fiducial("gaussian:0.8", 12)
    psi = FourierState.random(8, rng)
    grid = AngleGrid(128)
    d = [isometry_defect(phi, psi, gabor_transform(phi, psi, M, grid)) for M in (2, 8, 16, 24)]
    assert all(a >= b for a, b in zip(d, d[1:]))
    assert d[0] > 1e-3 and d[-1] < 1e-12


def test_kernel_row_and_reproducing_formula(phi, grid, rng):
    psi = FourierState.random(16, rng)
    t = gabor_transform(phi, psi, 48, grid)
    p = PhasePoint(2, grid.points[40])
    row = kernel_row(phi, p, 48, grid)
    assert abs(row.row(-1)[7] - kernel_numeric(phi, p, PhasePoint(-1, grid.points[7]))) < 1e-13
    assert abs(reproduce(phi, t, p) - t.row(2)[40]) < 1e-12


def test_kernel_is_translation_covariant(phi):
    # |K(p+r, q+r)| = |K(p, q)|
    p, q, r = PhasePoint(1, 0.3), PhasePoint(-2, 4.0), PhasePoint(3, 1.7)
    assert abs(abs(kernel_numeric(phi, p + r, q + r)) - abs(kernel_numeric(phi, p, q))) < 1e-13
