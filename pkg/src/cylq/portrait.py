"""Semi-classical portraits (lower symbols).

The autocorrelation of a weight,

    D(m, θ) = Tr(M(m,θ) M) = (1/2π) Σ_a ∫ dα |ϖ(a, α)|² e^{i(mα - aθ)},

is a probability distribution on the cylinder when ``M`` is a density
operator. The portrait of ``A_f`` is the lattice convolution of ``f`` with D.
"""

from __future__ import annotations

import threading
import warnings
import weakref
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (AngleGrid, ClassicalObservable, DomainError, OperatorMatrix,
                   PhasePoint, Weight)
from .quantize import build_M, transport_M

DENSITY_TOL = 1e-10


class NonDensityWarning(UserWarning):
    """``M^ϖ`` is not positive, so portraits lose their probabilistic reading."""


@dataclass(frozen=True, eq=False)
class PortraitTable:
    """``values[m + m_max, k] = f̌(m, θ_k)``."""

    m_max: int
    grid: AngleGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (2 * self.m_max + 1, self.grid.size):
            raise DomainError(f"table must be (2M+1) x K, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def momenta(self) -> np.ndarray:
        return np.arange(-self.m_max, self.m_max + 1)

    def imag_residue(self) -> float:
        return float(np.max(np.abs(self.values.imag)))


_density_cache: "weakref.WeakKeyDictionary[Weight, float]" = weakref.WeakKeyDictionary()
_density_lock = threading.Lock()


def _probe_size(w: Weight) -> int:
    return max(1, min(w.m_max // 2, 24))


def min_eigenvalue(w: Weight) -> float:
    """Smallest eigenvalue of ``M^ϖ`` on a probe truncation (cached per weight)."""
    with _density_lock:
        if w in _density_cache:
            return _density_cache[w]
        M = build_M(w, _probe_size(w))
        ev = np.linalg.eigvalsh(0.5 * (M.entries + M.entries.conj().T))
        lo = float(ev[0])
        _density_cache[w] = lo
        return lo


def is_density(w: Weight) -> bool:
    return min_eigenvalue(w) >= -DENSITY_TOL


def _warn_if_not_density(w: Weight) -> bool:
    ok = is_density(w)
    if not ok:
        warnings.warn(f"weight {w.name!r} does not give a density operator "
                      f"(min eigenvalue {min_eigenvalue(w):.3e}); positivity not guaranteed",
                      NonDensityWarning, stacklevel=3)
    return ok


def default_budget(w: Weight, grid: AngleGrid) -> int:
    return min(w.m_max, (grid.size - 1) // 2)


def autocorrelation_table(w: Weight, m_max: int, grid: AngleGrid,
                          m_budget: Optional[int] = None) -> PortraitTable:
    """``D(m, θ_k)`` for ``|m| <= m_max`` with the weight summed over ``|a| <= m_budget``."""
    a_max = default_budget(w, grid) if m_budget is None else m_budget
    th = grid.points
    a = np.arange(-a_max, a_max + 1)
    sq = np.stack([np.abs(w(int(ai), th)) ** 2 for ai in a])
    ms = np.arange(-m_max, m_max + 1)
    # c[a, m] = (1/2π) ∫ |ϖ(a, α)|² e^{imα} dα
    c = sq @ np.exp(1j * np.outer(th, ms)) / grid.size
    D = np.exp(-1j * np.outer(th, a)) @ c  # D[k, m]
    return PortraitTable(m_max, grid, D.T)


def autocorrelation_distribution(w: Weight, p: PhasePoint, grid: Optional[AngleGrid] = None,
                                 m_budget: Optional[int] = None):
    """``D(p)``; real for density weights, the raw complex value otherwise
    (with a :class:`NonDensityWarning`)."""
    if grid is None:
        a = w.m_max if m_budget is None else m_budget
        grid = AngleGrid(max(4 * min(a, 4096) + 1, 64))
    ok = _warn_if_not_density(w)
    a_max = default_budget(w, grid) if m_budget is None else m_budget
    a = np.arange(-a_max, a_max + 1)
    th = grid.points
    sq = np.stack([np.abs(w(int(ai), th)) ** 2 for ai in a])
    c = sq @ np.exp(1j * p.m * th) / grid.size
    val = complex(np.sum(np.exp(-1j * a * p.theta) * c))
    return val.real if ok else val


def _convolve(f_tab: np.ndarray, f_m: int, D: np.ndarray, d_m: int, m_max: int) -> np.ndarray:
    """``(1/K) Σ_{m'} Σ_{k'} f(m-m', θ-θ_{k'}) D(m', θ_{k'})`` on ``|m| <= m_max``."""
    K = f_tab.shape[1]
    Ff = np.fft.fft(f_tab, axis=1)
    FD = np.fft.fft(D, axis=1)
    out = np.zeros((2 * m_max + 1, K), dtype=complex)
    for i, m in enumerate(range(-m_max, m_max + 1)):
        acc = np.zeros(K, dtype=complex)
        for mp in range(-d_m, d_m + 1):
            r = m - mp
            if -f_m <= r <= f_m:
                acc += Ff[r + f_m] * FD[mp + d_m]
        out[i] = np.fft.ifft(acc) / K
    return out


def portrait(f: ClassicalObservable, w: Weight, m_max: int, grid: AngleGrid,
             m_budget: Optional[int] = None) -> PortraitTable:
    """``f̌ = f * D`` on the lattice ``|m| <= m_max`` by FFT in θ.

    ``f`` is tabulated over the rows that can reach the output window.
    """
    _warn_if_not_density(w)
    a_max = default_budget(w, grid) if m_budget is None else m_budget
    D = autocorrelation_table(w, a_max, grid, a_max).values
    f_m = m_max + a_max
    f_tab = f.tabulate(f_m, grid)
    return PortraitTable(m_max, grid, _convolve(f_tab, f_m, D, a_max, m_max))


def portrait_of_operator(A: OperatorMatrix, w: Weight, p: PhasePoint,
                         M: Optional[OperatorMatrix] = None) -> complex:
    """``Tr(A · U(p) M U(p)†)`` on the truncation of ``A``."""
    if M is None:
        M = build_M(w, A.n_max)
    if M.n_max != A.n_max:
        raise DomainError("operator and M^ϖ truncations differ")
    T = transport_M(M, p)
    return complex(np.sum(A.entries * T.entries.T))
