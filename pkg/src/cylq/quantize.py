"""Weight-function quantization on the cylinder.

    M^ϖ = (1/2π) Σ_m ∫ dθ ϖ(m,θ) U(m,θ)
    A_f = (1/2π) Σ_m ∫ dθ f(m,θ) U(m,θ) M^ϖ U(m,θ)†

Matrix elements used below (θ_s the symmetric angle, all sums finite):

    [M]_{k,l}        = (1/2π) ∫_{-π}^{π} ϖ(k-l, θ) e^{-i(k+l)θ/2} dθ
    [U M U†]_{k,k'}  = e^{-i(k-k')θ} M_{k-m, k'-m}
    Tr[U(m,θ)† X]    = e^{imθ_s/2} Σ_l e^{ilθ} X_{l+m, l}

The general quantizer does the θ-integral first, which turns the transport sum
into ``A[k,k'] = Σ_m f̂(m, k-k') M[k-m, k'-m]`` with exact M entries.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (TOL_EXACT, AngleGrid, CircleSamples, ClassicalObservable,
                   DomainError, FourierState, OperatorMatrix, PhasePoint,
                   PreconditionError, TruncationError, Weight, half_phase,
                   interior_distance)
from .fourier import check_grid, coefficients, min_grid_size

PARITY_M_MAX = 1 << 20


# ---------------------------------------------------------------- weights

def parity_weight(m_max: int = PARITY_M_MAX) -> Weight:
    """``ϖ ≡ 1``; ``M^ϖ`` is then the angular parity operator."""
    return Weight(lambda m, th: np.ones(np.shape(th), dtype=complex), m_max,
                  normalized=True, symmetric=True, name="parity")


def weight_from_state(psi: FourierState) -> Weight:
    """Coherent-state weight ``ϖ_ψ(m,θ) = <U(m,θ)ψ | ψ>``.

    Raises
    ------
    PreconditionError
        If ``ψ`` is not unit-norm within ``1e-12``.
    """
    if abs(psi.norm() - 1.0) > TOL_EXACT:
        raise PreconditionError(f"weight_from_state needs a unit vector, norm is {psi.norm()!r}")
    n = psi.n_max
    c = psi.coeffs
    l = np.arange(-n, n + 1)

    def ev(m, th):
        m = int(m)
        th = np.asarray(th, dtype=float)
        if abs(m) > 2 * n:
            return np.zeros(th.shape, dtype=complex)
        lo, hi = max(-n, -n - m), min(n, n - m)
        ll = l[lo + n: hi + n + 1]
        prod = np.conj(c[lo + n: hi + n + 1]) * c[lo + m + n: hi + m + n + 1]
        s = np.exp(1j * np.multiply.outer(th, ll)) @ prod
        return np.conj(half_phase(m, th)) * s

    return Weight(ev, 2 * n, normalized=True, symmetric=True, name="coherent", state=psi)


def weight_from_table(table: np.ndarray, grid: AngleGrid, name: str = "table") -> Weight:
    """Weight given as samples ``ϖ(m, θ_k)`` on ``m = -M..M``.

    Every weight of a trace-class ``M`` has the form ``e^{imθ_s/2}`` times a
    trigonometric polynomial, so the half-angle phase is stripped before
    trigonometric interpolation in θ and restored afterwards.
    """
    t = np.asarray(table, dtype=complex)
    M = (t.shape[0] - 1) // 2
    ms = np.arange(-M, M + 1)
    spec = np.fft.fft(t * half_phase(ms[:, None], grid.points[None, :]), axis=1) / grid.size
    j = np.fft.fftfreq(grid.size, d=1.0 / grid.size)

    def ev(m, th):
        th = np.asarray(th, dtype=float)
        if abs(m) > M:
            return np.zeros(th.shape, dtype=complex)
        return np.conj(half_phase(m, th)) * (np.exp(1j * np.multiply.outer(th, j)) @ spec[m + M])

    normalized = abs(complex(t[M, 0]) - 1.0) <= TOL_EXACT
    return Weight(ev, M, normalized=normalized, name=name)


# ---------------------------------------------------------------- M^ϖ

def _gl_nodes(n_nodes: int):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    return math.pi * x, math.pi * w


def default_nodes(n_max: int, m_max: int) -> int:
    return int(1.5 * (2 * n_max + min(m_max, 4 * n_max))) + 32


def build_M(w: Weight, n_max: int, n_nodes: Optional[int] = None) -> OperatorMatrix:
    """Matrix of ``M^ϖ`` on ``[-N, N]`` by Gauss-Legendre on ``[-π, π]``.

    The integrand carries half-integer frequencies for odd ``k+l`` and so
    is not periodic; Gauss-Legendre keeps spectral accuracy where the
    trapezoid rule would not.

    Raises
    ------
    TruncationError
        If ``w.m_max < 2N`` but the weight does not vanish past ``m_max``.
    """
    if n_nodes is None:
        n_nodes = default_nodes(n_max, w.m_max)
    x, qw = _gl_nodes(n_nodes)
    jmax = 2 * n_max
    if w.m_max < jmax:
        for m in (w.m_max + 1, -w.m_max - 1):
            tail = np.max(np.abs(np.asarray(w.eval(m, x))))
            if tail > TOL_EXACT:
                raise TruncationError(
                    f"weight {w.name} truncated at m_max={w.m_max} but |ϖ({m},·)| reaches "
                    f"{tail:.2e}; build at n_max <= {w.m_max // 2} or raise m_max")
    js = np.arange(-jmax, jmax + 1)
    W = np.stack([w(int(j), x) for j in js]) * qw[None, :]
    # s = k + l ranges over the same interval as j = k - l
    E = np.exp(-0.5j * np.outer(x, js))
    G = (W @ E) / (2 * math.pi)  # G[j, s]
    k = np.arange(-n_max, n_max + 1)
    jj = k[:, None] - k[None, :]
    ss = k[:, None] + k[None, :]
    entries = G[jj + jmax, ss + jmax]
    return OperatorMatrix(n_max, entries, hermitian=w.symmetric)


def parity_M_closed(n_max: int) -> OperatorMatrix:
    """Closed form of ``M`` for ``ϖ ≡ 1``: ``δ_{k+l,0}`` for even ``k+l`` and
    ``2(-1)^{(j-1)/2}/(πj)`` for odd ``j = k+l``."""
    k = np.arange(-n_max, n_max + 1)
    j = k[:, None] + k[None, :]
    out = np.where(j == 0, 1.0, 0.0)
    odd = (j % 2) != 0
    jo = j[odd]
    out[odd] = 2.0 * np.where(((jo - 1) // 2) % 2 == 0, 1.0, -1.0) / (math.pi * jo)
    return OperatorMatrix(n_max, out.astype(complex), hermitian=True)


def transport_M(M: OperatorMatrix, p: PhasePoint) -> OperatorMatrix:
    """``U(p) M U(p)†``, entries ``e^{-i(k-k')θ} M_{k-m, k'-m}`` (zero outside)."""
    n = M.n_max
    k = np.arange(-n, n + 1)
    shifted = np.zeros_like(M.entries)
    m = p.m
    if abs(m) <= 2 * n:
        src = slice(max(0, -m), min(2 * n + 1, 2 * n + 1 - m))
        dst = slice(max(0, m), min(2 * n + 1, 2 * n + 1 + m))
        shifted[dst, dst] = M.entries[src, src]
    ph = np.exp(-1j * np.subtract.outer(k, k) * p.theta)
    return OperatorMatrix(n, shifted * ph)


def weight_from_operator(M: OperatorMatrix, p: PhasePoint) -> complex:
    """``Tr[U(p)† M]`` over the truncated basis."""
    n = M.n_max
    m = p.m
    if abs(m) > 2 * n:
        return 0j
    l = np.arange(max(-n, -n - m), min(n, n - m) + 1)
    diag = M.entries[l + m + n, l + n]
    return complex(np.conj(half_phase(m, p.theta)) * np.sum(np.exp(1j * l * p.theta) * diag))


# ---------------------------------------------------------------- context

@dataclass(eq=False)
class QuantizationContext:
    """Weight, truncation and grid, plus a cache of ``M`` at larger sizes.

    The cache is filled lazily under a lock; otherwise the context is
    read-only and safe to share.
    """

    weight: Weight
    n_max: int
    grid: AngleGrid
    n_nodes: Optional[int] = None
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    @classmethod
    def create(cls, weight: Weight, n_max: int, m_max: int,
               grid: Optional[AngleGrid] = None, **kw) -> "QuantizationContext":
        if grid is None:
            grid = AngleGrid(min_grid_size(n_max, m_max))
        check_grid(grid, n_max, m_max)
        return cls(weight, n_max, grid, **kw)

    @property
    def M(self) -> OperatorMatrix:
        return self.M_at(self.n_max)

    def M_at(self, n_ext: int) -> OperatorMatrix:
        """``M^ϖ`` on ``[-n_ext, n_ext]``; entries do not depend on the size."""
        with self._lock:
            for size, mat in self._cache.items():
                if size >= n_ext:
                    return mat if size == n_ext else mat.resized(n_ext)
            mat = build_M(self.weight, n_ext, self.n_nodes)
            self._cache[n_ext] = mat
            return mat


# ---------------------------------------------------------------- quantizers

def _toeplitz(vals: np.ndarray, n: int) -> np.ndarray:
    """``T[k,k'] = vals[k - k' + 2n]`` for ``k, k'`` in ``[-n, n]``."""
    k = np.arange(-n, n + 1)
    return vals[k[:, None] - k[None, :] + 2 * n]


def _shifted_blocks(Mx: np.ndarray, n_ext: int, n: int, m: int) -> np.ndarray:
    """``M[k-m, k'-m]`` for ``k, k'`` in ``[-n, n]``."""
    lo = -n - m + n_ext
    return Mx[lo: lo + 2 * n + 1, lo: lo + 2 * n + 1]


def quantize_general(f: ClassicalObservable, ctx: QuantizationContext) -> OperatorMatrix:
    """Direct transcription of the weight quantization for a tabulated ``f``."""
    n = ctx.n_max
    K = ctx.grid.size
    if K < 4 * n + 1:
        raise TruncationError(f"grid of size {K} cannot resolve k - k' up to {2 * n}")
    m_top = max(abs(f.m_lo), abs(f.m_hi))
    table = f.tabulate(m_top, ctx.grid)
    n_ext = n + m_top
    Mx = ctx.M_at(n_ext).entries
    A = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    for i, m in enumerate(range(-m_top, m_top + 1)):
        row = table[i]
        if not np.any(row):
            continue
        fh = coefficients(CircleSamples(ctx.grid, row), 2 * n)
        A += _toeplitz(fh, n) * _shifted_blocks(Mx, n_ext, n, m)
    return OperatorMatrix(n, A)


def omega_coefficients(w: Weight, n: int, grid: Optional[AngleGrid] = None) -> np.ndarray:
    """``Ω̂(a) = (1/2π)∫ ϖ(0,γ) e^{-iaγ} dγ`` for ``|a| <= n``, by trapezoid."""
    if grid is None:
        grid = AngleGrid(max(8 * n + 1, 257))
    vals = w(0, grid.points)
    return coefficients(CircleSamples(grid, vals), n)


def quantize_momentum_only(g: Callable[[int], complex] | ClassicalObservable,
                           ctx: QuantizationContext, m_max: Optional[int] = None) -> OperatorMatrix:
    """``A_g = diag_k Σ_m g(m) Ω̂(k - m)`` with ``Ω = ϖ(0, ·)``."""
    if isinstance(g, ClassicalObservable):
        f = g
    else:
        if m_max is None:
            raise DomainError("m_max is required for a bare momentum function")
        f = ClassicalObservable.momentum_only(g, m_max)
    n = ctx.n_max
    ms = np.arange(f.m_lo, f.m_hi + 1)
    gv = f.momentum_values(ms)
    reach = n + max(abs(f.m_lo), abs(f.m_hi))
    om = omega_coefficients(ctx.weight, reach)
    k = np.arange(-n, n + 1)
    d = np.array([np.dot(gv, om[kk - ms + reach]) for kk in k])
    return OperatorMatrix(n, np.diag(d))


def quantize_angle_only(h: CircleSamples | ClassicalObservable,
                        ctx: QuantizationContext) -> OperatorMatrix:
    """Toeplitz matrix ``ĥ(k-k') ϖ(k-k', 0)``; for ``ϖ ≡ 1`` this is plain
    multiplication by ``h``."""
    if isinstance(h, ClassicalObservable):
        h = h.h
    n = ctx.n_max
    hh = coefficients(h, 2 * n)
    wj = np.array([complex(ctx.weight(int(j), np.array([0.0]))[0])
                   for j in range(-2 * n, 2 * n + 1)])
    return OperatorMatrix(n, _toeplitz(hh * wj, n))


def quantize_separable(f: ClassicalObservable, ctx: QuantizationContext) -> OperatorMatrix:
    """``ĥ(k-k') Σ_m g(m) M[k-m, k'-m]``."""
    n = ctx.n_max
    hh = coefficients(f.h, 2 * n)
    ms = np.arange(f.m_lo, f.m_hi + 1)
    gv = f.momentum_values(ms)
    n_ext = n + max(abs(f.m_lo), abs(f.m_hi))
    Mx = ctx.M_at(n_ext).entries
    S = np.zeros((2 * n + 1, 2 * n + 1), dtype=complex)
    for m, gm in zip(ms, gv):
        if gm != 0:
            S += gm * _shifted_blocks(Mx, n_ext, n, int(m))
    return OperatorMatrix(n, _toeplitz(hh, n) * S)


def quantize(f: ClassicalObservable, ctx: QuantizationContext) -> OperatorMatrix:
    """``A_f``; momentum-only, angle-only and separable inputs take closed paths."""
    if f.kind == "momentum":
        return quantize_momentum_only(f, ctx)
    if f.kind == "angle":
        return quantize_angle_only(f, ctx)
    if f.kind == "separable":
        return quantize_separable(f, ctx)
    return quantize_general(f, ctx)


# ---------------------------------------------------------------- checks

def covariance_defect(f: ClassicalObservable, ctx: QuantizationContext, p: PhasePoint,
                      radius: Optional[int] = None) -> float:
    """Interior distance between ``U A_f U†`` and ``A_{f(· - p)}``."""
    from .gabor import weyl_matrix

    A = quantize(f, ctx)
    U = weyl_matrix(p, ctx.n_max)
    lhs = U @ A @ U.dagger()
    rhs = quantize(f.translate(p), ctx)
    return interior_distance(lhs, rhs, radius)


def resolution_sum(ctx: QuantizationContext, m_max: int) -> OperatorMatrix:
    """``(1/2π) Σ_{|m| <= m_max} ∫ U M U† dθ = diag_k Σ_m M[k-m, k-m]``."""
    n = ctx.n_max
    n_ext = n + m_max
    Mx = ctx.M_at(n_ext).entries
    d = np.diag(Mx)
    k = np.arange(-n, n + 1)
    diag = np.array([np.sum(d[kk - np.arange(-m_max, m_max + 1) + n_ext]) for kk in k])
    return OperatorMatrix(n, np.diag(diag))


def resolution_defect(ctx: QuantizationContext, m_max: int, radius: Optional[int] = None) -> float:
    n = ctx.n_max
    return interior_distance(resolution_sum(ctx, m_max), OperatorMatrix.identity(n),
                             n // 3 if radius is None else radius)

