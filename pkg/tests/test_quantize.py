import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint

from cylq.core import (AngleGrid, CircleSamples, ClassicalObservable, FourierState,
                       OperatorMatrix, PhasePoint, PreconditionError, TruncationError, Weight,
                       interior_distance)
from cylq.fiducials import make_fiducial
from cylq.gabor import weyl_apply, weyl_matrix
from cylq.quantize import (QuantizationContext, build_M, covariance_defect, parity_M_closed,
                           quantize, quantize_angle_only, quantize_general,
                           quantize_momentum_only, quantize_separable, resolution_defect,
                           transport_M, weight_from_operator, weight_from_state,
                           weight_from_table)

N_SMALL = 6


def _ctx(w, n=16, m=48, K=256):
    return QuantizationContext.create(w, n, m, AngleGrid(K))


def _random_separable(rng, grid, m_max=3, band=4):
    g = rng.standard_normal(2 * m_max + 1)
    a, b = rng.standard_normal(band + 1), rng.standard_normal(band + 1)
    h = sum(a[j] * np.cos(j * grid.points) + b[j] * np.sin(j * grid.points) for j in range(band + 1))
    return ClassicalObservable.separable(lambda m, g=g: g[m + m_max], CircleSamples(grid, h), m_max)


def _general(f, m, grid):
    return ClassicalObservable.general(f.tabulate(m, grid), grid)


# ---------------------------------------------------------------- M

def test_build_M_entries_against_adaptive_quadrature(cs):
    M = build_M(cs, 16)
    for k, l in [(0, 0), (1, 0), (3, -2), (-4, 1), (5, 5)]:
        def f(t, part):
            v = cs(k - l, np.array([t]))[0] * np.exp(-0.5j * (k + l) * t)
            return v.real if part == 0 else v.imag
        re = sint.quad(f, -math.pi, math.pi, args=(0,), limit=200)[0]
        im = sint.quad(f, -math.pi, math.pi, args=(1,), limit=200)[0]
        assert abs(M[k, l] - (re + 1j * im) / (2 * math.pi)) < 1e-10


def test_build_M_node_doubling_is_stable(cs, parity):
    for w in (cs, parity):
        a = build_M(w, 12)
        b = build_M(w, 12, n_nodes=2 * 200)
        assert np.max(np.abs(a.entries - b.entries)) < 1e-12


def test_cs_M_is_the_fiducial_projector(phi, cs):
    M = build_M(cs, 16)
    assert np.max(np.abs(M.entries - np.outer(phi.coeffs, phi.coeffs.conj()))) < 1e-12
    assert M.trace() == pytest.approx(1.0, abs=1e-12)


def test_parity_M_closed_form(parity):
    P = build_M(parity, 12)
    assert np.max(np.abs(P.entries - parity_M_closed(12).entries)) < 1e-12
    # even part is the reflection e_k -> e_{-k}
    assert abs(P[3, -3] - 1.0) < 1e-12 and abs(P[3, -1]) < 1e-12
    assert abs(P[2, -1] - 2 / math.pi) < 1e-12


def test_truncated_weight_is_refused():
    w = Weight(lambda m, t: np.ones(np.shape(t), dtype=complex), 2, name="box")
    with pytest.raises(TruncationError, match="n_max <= 1"):
        build_M(w, 4)


def test_weight_from_state_requires_unit_norm():
    with pytest.raises(PreconditionError):
        weight_from_state(FourierState(1, [0.0, 2.0, 0.0]))


def test_cs_weight_is_the_overlap(phi, cs, rng):
    for _ in range(5):
        p = PhasePoint(int(rng.integers(-5, 6)), rng.uniform(0, 6.3))
        assert abs(cs(p.m, np.array([p.theta]))[0] - weyl_apply(p, phi).inner(phi)) < 1e-13


def test_transport_matches_explicit_conjugation(cs, rng):
    M = build_M(cs, 10)
    for _ in range(4):
        p = PhasePoint(int(rng.integers(-4, 5)), rng.uniform(0, 6.3))
        U = weyl_matrix(p, 10)
        assert np.max(np.abs(transport_M(M, p).entries - (U @ M @ U.dagger()).entries)) < 1e-14


def test_transport_preserves_interior_trace(cs):
    M = build_M(cs, 16)
    assert transport_M(M, PhasePoint(3, 1.0)).trace() == pytest.approx(1.0, abs=1e-10)


def test_weight_round_trip(cs, parity, rng):
    Mc, Mp = build_M(cs, 16), build_M(parity, 16)
    for _ in range(10):
        p = PhasePoint(int(rng.integers(-8, 9)), rng.uniform(0, 6.3))
        assert abs(weight_from_operator(Mc, p) - cs(p.m, np.array([p.theta]))[0]) < 1e-12
        q = PhasePoint(2 * int(rng.integers(-4, 5)), p.theta)
        assert abs(weight_from_operator(Mp, q) - 1.0) < 1e-12


def test_parity_round_trip_odd_m_is_gibbs_limited(parity):
    for theta in (0.0, math.pi / 2):
        errs = [abs(weight_from_operator(build_M(parity, n), PhasePoint(1, theta)) - 1.0)
                for n in (8, 16, 32, 64)]
        assert errs[-1] > 1e-3
        for a, b in zip(errs, errs[1:]):
            assert a / b == pytest.approx(2.0, rel=0.1)


def test_table_weight_round_trip(cs):
    grid = AngleGrid(64)
    tab = np.array([cs(m, grid.points) for m in range(-32, 33)])
    wt = weight_from_table(tab, grid)
    assert wt.normalized
    assert np.max(np.abs(build_M(wt, 16).entries - build_M(cs, 16).entries)) < 1e-10


# ---------------------------------------------------------------- quantizers

def test_general_path_against_brute_force_integral(rng):
    # A_f = (1/2π) Σ_m ∫ f(m,θ) U(m,θ) M U(m,θ)† dθ with explicit matrices
    n, mf, K = 3, 2, 64
    phi = make_fiducial("gaussian:0.9", 10)
    w = weight_from_state(phi)
    grid = AngleGrid(K)
    ctx = QuantizationContext.create(w, n, mf, grid)
    tab = np.zeros((2 * mf + 1, K), dtype=complex)
    for i in range(2 * mf + 1):
        c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        tab[i] = c[0] + c[1] * np.exp(1j * grid.points) + c[2] * np.exp(-2j * grid.points)
    A = quantize_general(ClassicalObservable.general(tab, grid), ctx)
    big = n + mf + 2 * phi.n_max
    Mbig = OperatorMatrix(big, np.outer(phi.padded(big).coeffs, phi.padded(big).coeffs.conj()))
    ref = np.zeros((2 * big + 1,) * 2, dtype=complex)
    for i, m in enumerate(range(-mf, mf + 1)):
        for k, th in enumerate(grid.points):
            U = weyl_matrix(PhasePoint(m, th), big)
            ref += tab[i, k] * (U @ Mbig @ U.dagger()).entries / K
    lo = big - n
    assert np.max(np.abs(A.entries - ref[lo:lo + 2 * n + 1, lo:lo + 2 * n + 1])) < 1e-13


def test_fast_paths_match_general(cs, grid, rng):
    ctx = _ctx(cs)
    for _ in range(3):
        f = _random_separable(rng, grid, 4)
        gen = quantize_general(_general(f, 4, grid), ctx)
        assert np.max(np.abs(quantize_separable(f, ctx).entries - gen.entries)) < 1e-10
        fa = ClassicalObservable.angle_only(f.h, 48)
        assert np.max(np.abs(quantize_angle_only(fa, ctx).entries
                             - quantize_general(_general(fa, 48, grid), ctx).entries)) < 1e-10
        c = rng.standard_normal(11)
        fm = ClassicalObservable.momentum_only(lambda m, c=c: c[m + 5], 5)
        assert np.max(np.abs(quantize_momentum_only(fm, ctx).entries
                             - quantize_general(_general(fm, 5, grid), ctx).entries)) < 1e-10


def test_parity_angle_only_general_path_converges_slowly(parity):
    n = 8
    gaps = []
    for M in (24, 48, 96):
        grid = AngleGrid(2 * (2 * n + M) + 65)
        ctx = QuantizationContext.create(parity, n, M, grid)
        f = ClassicalObservable.angle_only(CircleSamples(grid, np.cos(grid.points)), M)
        gaps.append(np.max(np.abs(quantize(f, ctx).entries
                                  - quantize_general(_general(f, M, grid), ctx).entries)))
    assert gaps[-1] > 1e-5
    for a, b in zip(gaps, gaps[1:]):
        assert a / b == pytest.approx(4.0, rel=0.25)


def test_bare_momentum_function_needs_m_max(cs):
    from cylq.core import DomainError
    with pytest.raises(DomainError):
        quantize_momentum_only(lambda m: m, _ctx(cs))
    A = quantize_momentum_only(lambda m: m, _ctx(cs), m_max=48)
    assert A.entries.shape == (33, 33)


def test_parity_closed_forms(parity, grid):
    ctx = _ctx(parity)
    L = np.arange(-16, 17)
    am = quantize(ClassicalObservable.momentum_only(lambda m: m, 48), ctx).entries
    am2 = quantize(ClassicalObservable.momentum_only(lambda m: m * m, 48), ctx).entries
    assert np.max(np.abs(am - np.diag(L))) < 1e-10
    assert np.max(np.abs(am2 - np.diag(L * L))) < 1e-10
    # A_h is multiplication by h: a Toeplitz matrix of its Fourier coefficients
    h = np.exp(np.sin(grid.points))
    A = quantize(ClassicalObservable.angle_only(CircleSamples(grid, h)), ctx).entries
    for d in (0, 1, -3, 7):
        ref = np.mean(h * np.exp(-1j * d * grid.points))
        assert np.allclose(np.diag(A, -d), ref, atol=1e-13)


def test_cs_momentum_closed_forms_on_asymmetric_state(grid):
    psi = FourierState.normalized(2, [0.1, 0.2, 0.3, 0.8, 0.45])
    mu, mu2 = psi.moments()
    assert abs(mu) > 0.5
    ctx = QuantizationContext.create(weight_from_state(psi), 16, 48, grid)
    L = np.arange(-16, 17)
    am = quantize(ClassicalObservable.momentum_only(lambda m: m, 48), ctx).entries
    am2 = quantize(ClassicalObservable.momentum_only(lambda m: m * m, 48), ctx).entries
    assert np.max(np.abs(am - np.diag(L - mu))) < 1e-8
    assert np.max(np.abs(am2 - np.diag(L * L - 2 * mu * L + mu2))) < 1e-8


def test_cs_basis_fiducial_shifts_momentum(grid):
    # the CS family built on e_1 sits at momentum m + 1, so A_m = L - 1
    ctx = QuantizationContext.create(weight_from_state(FourierState.basis(1, 1)), 8, 24, AngleGrid(128))
    am = quantize(ClassicalObservable.momentum_only(lambda m: m, 24), ctx).entries
    assert np.allclose(np.diag(am), np.arange(-8, 9) - 1, atol=1e-12)


def test_cs_angle_damping(cs, grid):
    ctx = _ctx(cs)
    A = quantize(ClassicalObservable.angle_only(CircleSamples(grid, np.cos(grid.points))), ctx).entries
    assert np.allclose(np.diag(A, -1), 0.5 * cs(1, np.array([0.0]))[0], atol=1e-13)
    assert abs(cs(1, np.array([0.0]))[0]) < 1


@pytest.mark.parametrize("which", ["cs", "parity"])
def test_unit_quantizes_to_identity(which, cs, parity, grid):
    ctx = _ctx(cs if which == "cs" else parity)
    one = ClassicalObservable.general(np.ones((97, 256)), grid)
    assert interior_distance(quantize(one, ctx), OperatorMatrix.identity(16)) < 1e-8


@pytest.mark.parametrize("which", ["cs", "parity"])
def test_real_f_gives_hermitian_operator(which, cs, parity, grid, rng):
    ctx = _ctx(cs if which == "cs" else parity)
    f = _random_separable(rng, grid)
    assert quantize(f, ctx).hermitian_defect() < 1e-10
    assert quantize_general(_general(f, 3, grid), ctx).hermitian_defect() < 1e-10


@pytest.mark.parametrize("which", ["cs", "parity"])
def test_covariance(which, cs, parity, grid, rng):
    ctx = _ctx(cs if which == "cs" else parity)
    for _ in range(3):
        f = _random_separable(rng, grid)
        p = PhasePoint(int(rng.integers(-3, 4)), rng.uniform(0, 6.3))
        assert covariance_defect(f, ctx, p) < 1e-8


def test_resolution_of_identity(cs, parity):
    for w in (cs, parity):
        assert resolution_defect(_ctx(w), 32) < 1e-10


def test_context_is_thread_safe(cs, grid, rng):
    ctx = _ctx(cs)
    fs = [_random_separable(rng, grid) for _ in range(6)]
    serial = [quantize_general(_general(f, 3, grid), _ctx(cs)).entries for f in fs]
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(lambda f: quantize_general(_general(f, 3, grid), ctx).entries, fs))
    assert all(np.array_equal(a, b) for a, b in zip(serial, par))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    grid = AngleGrid(64)
    phi = make_fiducial("gaussian:1", 8)
    ctx = QuantizationContext.create(weight_from_state(phi), N_SMALL, 3, grid)
    f, g = _random_separable(rng, grid), _random_separable(rng, grid)
    lhs = quantize_general(ClassicalObservable.general(
        a * f.tabulate(3, grid) + b * g.tabulate(3, grid), grid), ctx)
    rhs = quantize(f, ctx) * a + quantize(g, ctx) * b
    assert np.max(np.abs(lhs.entries - rhs.entries)) < 1e-10 * (1 + abs(a) + abs(b))
