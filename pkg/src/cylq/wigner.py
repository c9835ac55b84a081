"""Wigner distribution on the discrete cylinder.

For integer ``m`` the distribution is the diagonal coefficient sum

    W(m, θ) = (1/2π) Σ_{n+n'=2m} conj(ψ̂_n) ψ̂_{n'} e^{i(n'-n)θ}

normalized so that ``Σ_m ∫ W dθ = 1``. Pairs with ``n + n'`` odd are
dropped by this definition; :func:`wigner_half_integer` collects them on
the lattice ``μ ∈ Z + 1/2`` and together the two tables give the exact angle
marginal ``|ψ(θ)|²``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TWO_PI, AngleGrid, DomainError, FourierState, PhasePoint, symmetric_angle
from .gabor import gabor_transform

IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WignerTable:
    """Real table ``values[i, k] = W(momenta[i], θ_k)``.

    Integer tables have rows ``m = -m_max..m_max``; half-integer tables
    (``half=True``) have rows ``μ = -m_max-1/2 .. m_max+1/2``.
    """

    m_max: int
    grid: AngleGrid
    values: np.ndarray
    half: bool = False

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        rows = 2 * self.m_max + (2 if self.half else 1)
        if v.shape != (rows, self.grid.size):
            raise DomainError(f"expected table of shape ({rows}, {self.grid.size}), got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def momenta(self) -> np.ndarray:
        if self.half:
            return np.arange(-self.m_max, self.m_max + 2) - 0.5
        return np.arange(-self.m_max, self.m_max + 1).astype(float)

    def row(self, m: float) -> np.ndarray:
        i = int(round(m + self.m_max + (0.5 if self.half else 0.0)))
        if not 0 <= i < self.values.shape[0]:
            return np.zeros(self.grid.size)
        return self.values[i]

    def marginals(self) -> np.ndarray:
        """``∫ W(m, θ) dθ`` per row."""
        return self.values.sum(axis=1) * self.grid.weight

    def normalization(self) -> float:
        """``Σ_m ∫ W dθ``."""
        return float(self.values.sum() * self.grid.weight)


def _as_real(z: np.ndarray, what: str) -> np.ndarray:
    resid = float(np.max(np.abs(np.imag(z)))) if np.size(z) else 0.0
    scale = max(1.0, float(np.max(np.abs(z)))) if np.size(z) else 1.0
    if resid > IMAG_TOL * scale:
        raise ArithmeticError(f"{what}: imaginary residue {resid:.2e} exceeds {IMAG_TOL:g}")
    return np.real(z)


def _diag_sum(psi: FourierState, two_mu: int, theta: np.ndarray) -> np.ndarray:
    """``(1/2π) Σ_{n+n'=two_mu} conj(ψ̂_n) ψ̂_{n'} e^{i(n'-n)θ}`` (complex)."""
    N = psi.n_max
    n = np.arange(max(-N, two_mu - N), min(N, two_mu + N) + 1)
    if n.size == 0:
        return np.zeros(np.shape(theta), dtype=complex)
    npr = two_mu - n
    c = np.conj(psi.coeffs[n + N]) * psi.coeffs[npr + N]
    return np.exp(1j * np.multiply.outer(theta, npr - n)) @ c / TWO_PI


def wigner(psi: FourierState, p: PhasePoint) -> float:
    """``W_ψ(m, θ)`` at one lattice point."""
    z = _diag_sum(psi, 2 * p.m, np.array([p.theta]))
    return float(_as_real(z, "wigner")[0])


def wigner_table(psi: FourierState, m_max: int, grid: AngleGrid) -> WignerTable:
    if m_max < psi.n_max:
        raise DomainError(f"m_max={m_max} must cover the band-limit {psi.n_max}")
    rows = [_diag_sum(psi, 2 * m, grid.points) for m in range(-m_max, m_max + 1)]
    return WignerTable(m_max, grid, _as_real(np.array(rows), "wigner_table"))


def imaginary_residue(psi: FourierState, m_max: int, grid: AngleGrid) -> float:
    """Largest ``|Im|`` of the integer-lattice diagonal sums before they are made real."""
    rows = [_diag_sum(psi, 2 * m, grid.points) for m in range(-m_max, m_max + 1)]
    return float(np.max(np.abs(np.imag(rows))))


def wigner_half_integer(psi: FourierState, m_max: int, grid: AngleGrid) -> WignerTable:
    """Interference terms ``n + n' = 2μ`` odd, on ``μ ∈ Z + 1/2``.

    Not part of the integer-lattice distribution; adding its rows to those of
    :func:`wigner_table` recovers ``|ψ(θ)|²`` exactly.
    """
    rows = [_diag_sum(psi, 2 * m - 1, grid.points) for m in range(-m_max, m_max + 2)]
    return WignerTable(m_max, grid, _as_real(np.array(rows), "wigner_half_integer"), half=True)


def parity_expectation(psi: FourierState, p: PhasePoint) -> complex:
    """``<ψ| U(p) P U(p)† |ψ>`` with ``(Pψ)^(n) = ψ̂(-n)``, via explicit matrices."""
    from .gabor import weyl_matrix

    N = psi.n_max
    n_op = N + abs(p.m)
    P = np.fliplr(np.eye(2 * n_op + 1))
    U = weyl_matrix(p, n_op).entries
    x = psi.padded(n_op).coeffs
    return complex(np.vdot(x, U @ P @ U.conj().T @ x))


def wigner_as_parity_expectation(psi: FourierState, p: PhasePoint) -> float:
    """``(1/2π) <ψ| P(p) ψ>`` with the Weyl-transported parity ``P(p)``."""
    z = parity_expectation(psi, p) / TWO_PI
    return float(_as_real(np.array([z]), "parity route")[0])


def wigner_from_gabor(psi: FourierState, m_max: int, grid: AngleGrid) -> WignerTable:
    """Symplectic Fourier transform of the self-Gabor table ``<ψ_{(m',θ')}|ψ>``.

    The transform integrates θ' over the double cover ``[0, 4π)`` of the
    circle, on which ``e^{im'θ'/2}`` is single valued; odd ``m'`` then
    average out and only ``m' = 2(m - n)`` survive.
    """
    N = psi.n_max
    t = gabor_transform(psi, psi, 2 * N, grid)
    mp = t.momenta
    th = grid.points
    # undo the branch reduction: continuation with e^{im'θ'/2} for θ' in [0, 2π)
    lift = np.exp(0.5j * mp[:, None] * (th[None, :] - symmetric_angle(th)[None, :]))
    tilde = t.values * lift
    even = (mp % 2) == 0
    ms = np.arange(-m_max, m_max + 1)
    # G[m', m] = (1/K) Σ_k e^{-imθ_k} Ψ̃(m', θ_k)
    G = tilde[even] @ np.exp(-1j * np.outer(th, ms)) / grid.size
    # W = (1/2π) Σ_{m' even} e^{im'θ} G[m', m]
    W = np.exp(1j * np.outer(mp[even], th)).T @ G / TWO_PI
    return WignerTable(m_max, grid, _as_real(W.T, "wigner_from_gabor"))


def translate_table(t: WignerTable, p: PhasePoint) -> np.ndarray:
    """Values of ``W(q - p)`` on the same lattice; ``θ`` must be a grid multiple."""
    shift = p.theta / t.grid.weight
    ks = int(round(shift))
    if abs(shift - ks) > 1e-9:
        raise DomainError("translation angle must be a multiple of the grid spacing")
    v = np.roll(t.values, (p.m, ks % t.grid.size), axis=(0, 1))
    if p.m > 0:
        v[:p.m] = 0.0
    elif p.m < 0:
        v[p.m:] = 0.0
    return v
