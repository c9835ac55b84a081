import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cylq.core import (AliasingError, AngleGrid, CircleSamples, ClassicalObservable, CylqError,
                       DivergenceError, DomainError, FourierState, NotAvailableError,
                       OperatorMatrix, PhasePoint, PreconditionError, TailMassError,
                       TruncationError, Weight, half_phase, interior_distance, reduce_angle,
                       symmetric_angle)

angles = st.floats(-1e4, 1e4, allow_nan=False)


@given(angles)
def test_reduce_angle_range_and_idempotence(x):
    r = reduce_angle(x)
    assert 0.0 <= r < 2 * math.pi
    assert reduce_angle(r) == r


@given(angles)
def test_symmetric_angle_congruent(x):
    s = symmetric_angle(x)
    assert -math.pi <= s < math.pi
    assert abs(np.exp(1j * s) - np.exp(1j * x)) < 1e-9


def test_half_phase_branch():
    # e^{-imθ/2} on the symmetric branch: θ = 3π/2 is treated as -π/2
    assert abs(half_phase(1, 1.5 * math.pi) - np.exp(0.25j * math.pi)) < 1e-15
    assert abs(half_phase(2, 0.3) - np.exp(-0.3j)) < 1e-15


@given(st.integers(-20, 20), angles, st.integers(-20, 20), angles)
def test_phase_point_group(m1, t1, m2, t2):
    p, q = PhasePoint(m1, t1), PhasePoint(m2, t2)
    r = (p + q) - q
    assert r.m == p.m
    assert abs(np.exp(1j * r.theta) - np.exp(1j * p.theta)) < 1e-9
    assert (-p).m == -m1


def test_exception_hierarchy():
    for exc in (DomainError, AliasingError, TruncationError, PreconditionError, DivergenceError):
        assert issubclass(exc, CylqError) and issubclass(exc, ValueError)
    assert issubclass(TailMassError, TruncationError)
    assert issubclass(NotAvailableError, LookupError)


def test_fourier_state_basics():
    e2 = FourierState.basis(2, 4)
    assert e2[2] == 1 and e2[-2] == 0 and e2[9] == 0
    assert e2.norm() == 1.0
    assert e2.moments() == (2.0, 4.0)
    psi = FourierState.from_dict({-1: 1.0, 3: 1j})
    assert psi.n_max == 3
    assert psi.inner(psi * 2j) == pytest.approx(4j)
    assert (2j * psi).inner(psi) == pytest.approx(-4j)
    assert psi.padded(6).truncated(3).coeffs.tolist() == psi.coeffs.tolist()
    with pytest.raises(DomainError):
        FourierState(2, np.zeros(4))
    with pytest.raises(DomainError):
        FourierState.normalized(1, np.zeros(3))
    with pytest.raises(DomainError):
        psi.padded(1)


def test_random_state_is_normalized(rng):
    assert FourierState.random(10, rng).norm() == pytest.approx(1.0, abs=1e-14)


def test_fourier_state_is_read_only():
    psi = FourierState.basis(0, 1)
    with pytest.raises(ValueError):
        psi.coeffs[0] = 1.0


def test_operator_matrix_algebra(rng):
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = OperatorMatrix(2, a)
    I = OperatorMatrix.identity(2)
    assert np.allclose((A @ I).entries, a)
    assert np.allclose(A.dagger().entries, a.conj().T)
    assert A[-2, 1] == a[0, 3]
    assert A[5, 0] == 0
    assert A.trace() == pytest.approx(np.trace(a))
    assert np.allclose((A + A - A * 2).entries, 0)
    assert (A + A.dagger()).hermitian_defect() < 1e-15
    assert A.resized(1).entries.shape == (3, 3)
    assert np.allclose(A.resized(4).block(2), a)
    with pytest.raises(DomainError):
        OperatorMatrix(2, a, hermitian=True)
    with pytest.raises(DomainError):
        A @ OperatorMatrix.identity(3)


def test_interior_distance_ignores_edges():
    a = np.zeros((9, 9))
    a[0, 0] = 5.0
    A = OperatorMatrix(4, a)
    Z = OperatorMatrix(4, np.zeros((9, 9)))
    assert interior_distance(A, Z) == 0.0
    assert interior_distance(A, Z, radius=4) == 5.0


def test_weight_flags_are_validated():
    with pytest.raises(DomainError):
        Weight(lambda m, t: np.full(np.shape(t), 2.0), 3, normalized=True)
    with pytest.raises(DomainError):
        Weight(lambda m, t: np.full(np.shape(t), 1j), 3, symmetric=True)
    w = Weight(lambda m, t: np.ones(np.shape(t)), 2)
    assert np.all(w(3, np.zeros(4)) == 0)


def test_observable_tabulate_and_translate():
    grid = AngleGrid(16)
    f = ClassicalObservable.separable(lambda m: m, CircleSamples(grid, np.cos(grid.points)), 2)
    tab = f.tabulate(3, grid)
    assert tab.shape == (7, 16)
    assert np.allclose(tab[0], 0) and np.allclose(tab[4], np.cos(grid.points))
    g = f.translate(PhasePoint(1, grid.points[2]))
    # (Vf)(n, φ) = f(n - 1, φ - θ_2)
    assert np.allclose(g.tabulate(3, grid)[5], np.roll(tab[4], 2))
    h = ClassicalObservable.momentum_only(lambda m: m * m, 2) + f
    assert h.kind == "general"
    assert np.allclose(h.tabulate(2, grid)[3], 1 + np.cos(grid.points))
    with pytest.raises(DomainError):
        ClassicalObservable.general(np.ones((4, 16)), grid)
