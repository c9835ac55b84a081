"""Grid samples <-> Fourier coefficients, periodic quadrature, periodization."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import (TWO_PI, AliasingError, AngleGrid, CircleSamples, DomainError,
                   FourierState)

__all__ = [
    "CircleSamples", "synthesize", "analyze", "integrate", "periodize",
    "min_grid_size", "check_grid", "coefficients", "rotate", "resample",
]

_SQRT_2PI = math.sqrt(TWO_PI)


def min_grid_size(n_max: int, m_max: int = 0) -> int:
    """Smallest alias-free K for band-limit ``n_max`` and momentum budget ``m_max``."""
    return 2 * (2 * n_max + m_max) + 1


def check_grid(grid: AngleGrid, n_max: int, m_max: int = 0) -> None:
    k_min = min_grid_size(n_max, m_max)
    if grid.size < k_min:
        raise AliasingError(
            f"grid of size {grid.size} aliases at N={n_max}, M={m_max}; need K >= {k_min}")


def _bins(n: np.ndarray, size: int) -> np.ndarray:
    return np.mod(n, size)


def synthesize(psi: FourierState, grid: AngleGrid) -> CircleSamples:
    """Samples ``ψ(θ_k) = Σ_n ψ̂(n) e^{inθ_k} / √(2π)``."""
    if grid.size < 2 * psi.n_max + 1:
        raise AliasingError(
            f"grid of size {grid.size} cannot carry band-limit {psi.n_max}; "
            f"need K >= {2 * psi.n_max + 1}")
    spec = np.zeros(grid.size, dtype=complex)
    spec[_bins(psi.indices, grid.size)] = psi.coeffs
    return CircleSamples(grid, np.fft.ifft(spec) * (grid.size / _SQRT_2PI))


def analyze(s: CircleSamples, n_max: int) -> FourierState:
    """Coefficients ``ψ̂(n) = (2π/K) Σ_k conj(e_n(θ_k)) ψ(θ_k)`` for ``|n| <= n_max``."""
    K = s.grid.size
    if K < 2 * n_max + 1:
        raise AliasingError(
            f"grid of size {K} cannot resolve band-limit {n_max}; need K >= {2 * n_max + 1}")
    spec = np.fft.fft(s.values) * (_SQRT_2PI / K)
    return FourierState(n_max, spec[_bins(np.arange(-n_max, n_max + 1), K)])


def coefficients(s: CircleSamples, j_max: int) -> np.ndarray:
    """``ĥ_j = (1/K) Σ_k h(θ_k) e^{-ijθ_k}`` for ``j = -j_max..j_max``.

    This is the trapezoid value of ``(1/2π)∫ h e^{-ijθ} dθ``. Frequencies
    beyond the grid's Nyquist limit come back as zeros rather than aliases.
    """
    K = s.grid.size
    spec = np.fft.fft(s.values) / K
    j = np.arange(-j_max, j_max + 1)
    out = spec[_bins(j, K)]
    # keep the lowest K frequencies only; the Nyquist bin is split evenly
    out[np.abs(j) > K // 2] = 0.0
    if K % 2 == 0:
        out[np.abs(j) == K // 2] *= 0.5
    return out


def integrate(s: CircleSamples) -> complex:
    """Trapezoid value of ``∫_0^{2π} s(θ) dθ``."""
    return complex(np.sum(s.values) * s.grid.weight)


def periodize(phi_line: Callable[[np.ndarray], np.ndarray], x: float, n_terms: int) -> complex:
    """Partial periodization ``2π Σ_{|n| <= n_terms} φ(x + 2πn)``."""
    if n_terms < 1:
        raise DomainError("n_terms must be >= 1")
    n = np.arange(-n_terms, n_terms + 1)
    vals = np.asarray(phi_line(x + TWO_PI * n), dtype=complex)
    # add from the tails inward so the small terms are not swamped
    order = np.argsort(-np.abs(n), kind="stable")
    return complex(TWO_PI * np.sum(vals[order]))


def _signed_freq(K: int) -> np.ndarray:
    return np.fft.fftfreq(K, d=1.0 / K)


def rotate(s: CircleSamples, theta0: float) -> CircleSamples:
    """Samples of ``h(θ - θ0)`` obtained by a spectral phase shift."""
    K = s.grid.size
    spec = np.fft.fft(s.values)
    j = _signed_freq(K)
    shift = np.exp(-1j * j * theta0)
    if K % 2 == 0:
        # Nyquist bin: the real interpolant carries cos(K/2 θ)
        shift[K // 2] = math.cos(K // 2 * theta0)
    return CircleSamples(s.grid, np.fft.ifft(spec * shift))


def resample(s: CircleSamples, grid: AngleGrid) -> CircleSamples:
    """Trigonometric interpolation of ``s`` onto another uniform grid."""
    if grid.size == s.grid.size:
        return s
    j_max = min(s.grid.size, grid.size) // 2
    c = coefficients(s, j_max)
    j = np.arange(-j_max, j_max + 1)
    spec = np.zeros(grid.size, dtype=complex)
    np.add.at(spec, _bins(j, grid.size), c)
    return CircleSamples(grid, np.fft.ifft(spec) * grid.size)
