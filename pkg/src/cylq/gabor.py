"""Weyl operator, coherent states and the Gabor transform on the circle.

    [U(m,θ)ψ]^(k) = e^{-imθ_s/2} e^{-i(k-m)θ} ψ̂(k-m)

with ``θ_s`` the symmetric representative of θ. The frame measure on the
cylinder is ``(1/2π) Σ_m ∫ dθ``; with it the coherent states resolve the
identity and the transform is an isometry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (AliasingError, AngleGrid, DomainError, FourierState, OperatorMatrix,
                   PhasePoint, half_phase)


@dataclass(frozen=True, eq=False)
class GaborTable:
    """``values[m + m_max, k] = <φ_{(m, θ_k)} | ψ>``."""

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

    def row(self, m: int) -> np.ndarray:
        if abs(m) > self.m_max:
            return np.zeros(self.grid.size, dtype=complex)
        return self.values[m + self.m_max]

    def norm2(self) -> float:
        """``(1/2π) Σ_m (2π/K) Σ_k |Ψ|²``."""
        return float(np.sum(np.abs(self.values) ** 2) / self.grid.size)


def weyl_apply(p: PhasePoint, psi: FourierState) -> FourierState:
    """``U(p)ψ``; the band grows to ``n_max + |m|`` so nothing is lost."""
    m, th = p.m, p.theta
    n_out = psi.n_max + abs(m)
    src = psi.padded(n_out).coeffs
    k = np.arange(-n_out, n_out + 1)
    shifted = np.roll(src, m)  # shifted[k] = src[k - m]; wrapped entries are zero padding
    out = half_phase(m, th) * np.exp(-1j * (k - m) * th) * shifted
    return FourierState(n_out, out)


def weyl_matrix(p: PhasePoint, n_max: int) -> OperatorMatrix:
    """Matrix ``[U]_{k,l} = e^{-imθ_s/2} e^{-ilθ} δ_{k,l+m}`` on ``[-N, N]``."""
    side = 2 * n_max + 1
    l = np.arange(-n_max, n_max + 1)
    diag = half_phase(p.m, p.theta) * np.exp(-1j * l * p.theta)
    u = np.zeros((side, side), dtype=complex)
    if abs(p.m) < side:
        cols = np.arange(side)
        rows = cols + p.m
        keep = (rows >= 0) & (rows < side)
        u[rows[keep], cols[keep]] = diag[keep]
    return OperatorMatrix(n_max, u)


def coherent_state(phi: FourierState, p: PhasePoint) -> FourierState:
    return weyl_apply(p, phi)


def _check_grid(phi: FourierState, grid: AngleGrid) -> None:
    need = 4 * phi.n_max + 1
    if grid.size < need:
        raise AliasingError(f"grid of size {grid.size} too coarse for fiducial band "
                            f"{phi.n_max}; need K >= {need}")


def gabor_transform(phi: FourierState, psi: FourierState, m_max: int,
                    grid: AngleGrid) -> GaborTable:
    """Tabulate ``Ψ(m, θ_k) = <U(m,θ_k)φ | ψ>`` for ``|m| <= m_max``.

    Row ``m`` is ``e^{imθ_s/2} Σ_l e^{ilθ} conj(φ̂_l) ψ̂_{l+m}``, a finite sum.
    Momentum truncation is not an error here; see :func:`isometry_defect`.
    """
    _check_grid(phi, grid)
    nf = phi.n_max
    l = np.arange(-nf, nf + 1)
    ms = np.arange(-m_max, m_max + 1)
    big = psi.n_max + m_max + nf
    ps = psi.padded(big).coeffs
    # C[m, l] = conj(φ_l) ψ_{l+m}
    C = np.conj(phi.coeffs)[None, :] * ps[(ms[:, None] + l[None, :]) + big]
    E = np.exp(1j * np.outer(l, grid.points))
    vals = (C @ E) * np.conj(half_phase(ms[:, None], grid.points[None, :]))
    return GaborTable(m_max, grid, vals)


def gabor_reconstruct(phi: FourierState, t: GaborTable) -> FourierState:
    """Synthesis ``(1/2π) Σ_m Σ_k (2π/K) Ψ(m,θ_k) U(m,θ_k)φ``.

    The result lives at band-limit ``phi.n_max + t.m_max``.
    """
    _check_grid(phi, t.grid)
    nf, M = phi.n_max, t.m_max
    ms = t.momenta
    l = np.arange(-nf, nf + 1)
    # the half-angle phases of Ψ and of U(m,θ)φ cancel
    tilde = t.values * half_phase(ms[:, None], t.grid.points[None, :])
    B = tilde @ np.exp(-1j * np.outer(t.grid.points, l)) / t.grid.size
    B *= phi.coeffs[None, :]
    n_out = nf + M
    out = np.zeros(2 * n_out + 1, dtype=complex)
    for i, m in enumerate(ms):
        out[m - nf + n_out: m + nf + n_out + 1] += B[i]
    return FourierState(n_out, out)


def kernel_numeric(phi: FourierState, p: PhasePoint, q: PhasePoint) -> complex:
    """``<φ_p | φ_q>`` by a finite coefficient sum."""
    return weyl_apply(p, phi).inner(weyl_apply(q, phi))


def kernel_row(phi: FourierState, p: PhasePoint, m_max: int, grid: AngleGrid) -> GaborTable:
    """``K(p, (m', θ'_k))`` over a lattice, via the transform of ``φ_p``."""
    t = gabor_transform(phi, weyl_apply(p, phi), m_max, grid)
    return GaborTable(m_max, grid, np.conj(t.values))


def reproduce(phi: FourierState, t: GaborTable, p: PhasePoint) -> complex:
    """``(1/2π) Σ_{m'} ∫ K(p, p') Ψ(p') dθ'`` evaluated on the table's lattice."""
    k = kernel_row(phi, p, t.m_max, t.grid)
    return complex(np.sum(k.values * t.values) / t.grid.size)


def isometry_defect(phi: FourierState, psi: FourierState, t: GaborTable) -> float:
    """``| ||Ψ||²_Γ - ||ψ||² ||φ||² |``."""
    return abs(t.norm2() - psi.norm() ** 2 * phi.norm() ** 2)
