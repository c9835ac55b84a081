"""Domain types shared by every module: phase points, truncated Fourier
states, angle grids, operator matrices, weights and classical observables.

Signed indexing is used throughout. A state of band-limit ``N`` stores the
coefficients for ``n = -N..N`` and ``state[n]`` addresses coefficient ``n``
directly; array offsets never leak out of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

TWO_PI = 2.0 * math.pi

# default tolerances: exact algebra, single quadrature, double quadrature
TOL_EXACT = 1e-12
TOL_QUAD = 1e-10
TOL_QUAD2 = 1e-8


class CylqError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(CylqError, ValueError):
    pass


class AliasingError(CylqError, ValueError):
    """Grid too coarse for the band-limit it has to carry."""


class TruncationError(CylqError, ValueError):
    """A truncation budget is violated (tail mass, momentum budget)."""


class TailMassError(TruncationError):
    """Discarded coefficients of a fiducial are not negligible."""


class PreconditionError(CylqError, ValueError):
    pass


class DivergenceError(CylqError, ValueError):
    pass


class NotAvailableError(CylqError, LookupError):
    """No closed form is known for the requested case."""


def reduce_angle(x: float) -> float:
    """Canonical representative of ``x`` in ``[0, 2π)``."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"angle must be finite, got {x!r}")
    if 0.0 <= x < TWO_PI:
        return x
    r = math.fmod(x, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:  # -tiny + 2π rounds up to 2π
        r = 0.0
    return r


def symmetric_angle(theta):
    """Representative of ``theta`` in ``[-π, π)``.

    This is the branch on which the projective phase ``exp(-i m θ / 2)``
    of the Weyl operator is evaluated. Works on scalars and arrays.
    """
    t = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    if t.ndim == 0:
        return float(t)
    return t


def half_phase(m, theta):
    """``exp(-i m θ/2)`` with θ taken on the symmetric branch."""
    return np.exp(-0.5j * np.asarray(m) * symmetric_angle(theta))


@dataclass(frozen=True)
class PhasePoint:
    """A point ``(m, θ)`` of the discrete cylinder ``Z × S¹``."""

    m: int
    theta: float

    def __post_init__(self):
        if isinstance(self.m, float) and not float(self.m).is_integer():
            raise DomainError(f"momentum must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "theta", reduce_angle(self.theta))

    def __add__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.m + other.m, self.theta + other.theta)

    def __sub__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.m - other.m, self.theta - other.theta)

    def __neg__(self) -> "PhasePoint":
        return PhasePoint(-self.m, -self.theta)


@dataclass(frozen=True, eq=False)
class FourierState:
    """Circle function given by its coefficients on ``e_n = e^{inγ}/√(2π)``.

    ``coeffs[i]`` holds the coefficient of ``n = i - n_max``.
    """

    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n_max < 0:
            raise DomainError("n_max must be non-negative")
        c = np.array(self.coeffs, dtype=complex)
        if c.shape != (2 * self.n_max + 1,):
            raise DomainError(
                f"expected {2 * self.n_max + 1} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, n_max: int) -> "FourierState":
        return cls(n_max, np.zeros(2 * n_max + 1, dtype=complex))

    @classmethod
    def basis(cls, n: int, n_max: Optional[int] = None) -> "FourierState":
        n_max = abs(n) if n_max is None else n_max
        if abs(n) > n_max:
            raise DomainError(f"basis index {n} outside band-limit {n_max}")
        c = np.zeros(2 * n_max + 1, dtype=complex)
        c[n + n_max] = 1.0
        return cls(n_max, c)

    @classmethod
    def from_dict(cls, coeffs: dict[int, complex], n_max: Optional[int] = None) -> "FourierState":
        n_max = max((abs(n) for n in coeffs), default=0) if n_max is None else n_max
        c = np.zeros(2 * n_max + 1, dtype=complex)
        for n, v in coeffs.items():
            c[n + n_max] = v
        return cls(n_max, c)

    @classmethod
    def normalized(cls, n_max: int, coeffs) -> "FourierState":
        c = np.asarray(coeffs, dtype=complex)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:
            raise DomainError("cannot normalize the zero state")
        state = cls(n_max, c / nrm)
        if abs(state.norm() - 1.0) > TOL_EXACT:
            raise DomainError("normalization failed")
        return state

    @classmethod
    def random(cls, n_max: int, rng: np.random.Generator) -> "FourierState":
        """Unit-norm state with i.i.d. complex Gaussian coefficients."""
        c = rng.standard_normal(2 * n_max + 1) + 1j * rng.standard_normal(2 * n_max + 1)
        return cls.normalized(n_max, c)

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0j
        return complex(self.coeffs[n + self.n_max])

    def norm(self) -> float:
        return state_norm(self)

    def padded(self, n_max: int) -> "FourierState":
        """Same function at a band-limit ``>= self.n_max``, zero-padded."""
        if n_max < self.n_max:
            raise DomainError("use truncated() to lower the band-limit")
        pad = n_max - self.n_max
        return FourierState(n_max, np.pad(self.coeffs, (pad, pad)))

    def truncated(self, n_max: int) -> "FourierState":
        if n_max >= self.n_max:
            return self.padded(n_max)
        cut = self.n_max - n_max
        return FourierState(n_max, self.coeffs[cut:-cut])

    def inner(self, other: "FourierState") -> complex:
        """``<self|other>``, antilinear in ``self``."""
        n = max(self.n_max, other.n_max)
        return complex(np.vdot(self.padded(n).coeffs, other.padded(n).coeffs))

    def __add__(self, other: "FourierState") -> "FourierState":
        n = max(self.n_max, other.n_max)
        return FourierState(n, self.padded(n).coeffs + other.padded(n).coeffs)

    def __sub__(self, other: "FourierState") -> "FourierState":
        n = max(self.n_max, other.n_max)
        return FourierState(n, self.padded(n).coeffs - other.padded(n).coeffs)

    def __mul__(self, scalar: complex) -> "FourierState":
        return FourierState(self.n_max, self.coeffs * scalar)

    __rmul__ = __mul__

    def moments(self) -> tuple[float, float]:
        """Mean and second moment of ``n`` under ``|ψ̂(n)|²``."""
        p = np.abs(self.coeffs) ** 2
        n = self.indices
        return float(np.dot(n, p)), float(np.dot(n * n, p))


def state_norm(psi: FourierState) -> float:
    """L² norm ``sqrt(Σ_n |ψ̂(n)|²)``."""
    return float(np.linalg.norm(psi.coeffs))


@dataclass(frozen=True)
class AngleGrid:
    """Uniform grid ``θ_k = 2πk/K`` with trapezoid weight ``2π/K``."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise DomainError("grid size must be positive")

    @cached_property
    def points(self) -> np.ndarray:
        return TWO_PI * np.arange(self.size) / self.size

    @property
    def weight(self) -> float:
        return TWO_PI / self.size


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense matrix ``A[k, l] = <e_k|A e_l>`` for ``k, l`` in ``[-N, N]``."""

    n_max: int
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        side = 2 * self.n_max + 1
        if a.shape != (side, side):
            raise DomainError(f"expected a {side}x{side} matrix, got {a.shape}")
        if self.hermitian:
            defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
            if defect > TOL_QUAD:
                raise DomainError(f"matrix flagged hermitian but defect is {defect:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def identity(cls, n_max: int) -> "OperatorMatrix":
        return cls(n_max, np.eye(2 * n_max + 1), hermitian=True)

    @classmethod
    def diagonal(cls, n_max: int, values) -> "OperatorMatrix":
        return cls(n_max, np.diag(np.asarray(values, dtype=complex)))

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def __getitem__(self, kl: tuple[int, int]) -> complex:
        k, l = kl
        if abs(k) > self.n_max or abs(l) > self.n_max:
            return 0j
        return complex(self.entries[k + self.n_max, l + self.n_max])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.n_max, self.entries.conj().T, self.hermitian)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.n_max != self.n_max:
            raise DomainError("operator truncations differ")
        return OperatorMatrix(self.n_max, self.entries @ other.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.n_max != self.n_max:
            raise DomainError("operator truncations differ")
        return OperatorMatrix(self.n_max, self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.n_max != self.n_max:
            raise DomainError("operator truncations differ")
        return OperatorMatrix(self.n_max, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.n_max, self.entries * scalar)

    __rmul__ = __mul__

    def apply(self, psi: FourierState) -> FourierState:
        return FourierState(self.n_max, self.entries @ psi.truncated(self.n_max).coeffs)

    def block(self, radius: int) -> np.ndarray:
        """Entries with ``|k|, |l| <= radius``."""
        lo, hi = self.n_max - radius, self.n_max + radius + 1
        return self.entries[lo:hi, lo:hi]

    def resized(self, n_max: int) -> "OperatorMatrix":
        """Central block (shrinking) or zero padding (growing)."""
        if n_max <= self.n_max:
            return OperatorMatrix(n_max, self.block(n_max))
        pad = n_max - self.n_max
        return OperatorMatrix(n_max, np.pad(self.entries, pad))

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


def interior_distance(a: OperatorMatrix, b: OperatorMatrix, radius: Optional[int] = None) -> float:
    """Spectral-norm distance of the ``|k| <= radius`` blocks (default N/2)."""
    if radius is None:
        radius = min(a.n_max, b.n_max) // 2
    diff = a.block(radius) - b.block(radius)
    if diff.size == 0:
        return 0.0
    return float(np.linalg.norm(diff, 2))


WeightFn = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Weight:
    """A weight ``ϖ(m, θ)`` on the cylinder.

    ``eval(m, theta)`` must accept an array of angles. Values for
    ``|m| > m_max`` are treated as zero by every consumer.
    """

    eval: WeightFn
    m_max: int
    normalized: bool = False
    symmetric: bool = False
    name: str = "custom"
    state: Optional[FourierState] = field(default=None, repr=False)

    def __post_init__(self):
        if self.m_max < 0:
            raise DomainError("m_max must be non-negative")
        if self.normalized:
            v = complex(np.asarray(self.eval(0, np.array([0.0])))[0])
            if abs(v - 1.0) > TOL_EXACT:
                raise DomainError(f"weight flagged normalized but ϖ(0,0) = {v}")
        if self.symmetric:
            defect = self.symmetry_defect()
            if defect > TOL_QUAD:
                raise DomainError(f"weight flagged symmetric but defect is {defect:.3e}")

    def __call__(self, m: int, theta) -> np.ndarray:
        if abs(m) > self.m_max:
            return np.zeros(np.shape(theta), dtype=complex)
        return np.asarray(self.eval(m, np.asarray(theta, dtype=float)), dtype=complex)

    def symmetry_defect(self, n_angles: int = 7, m_probe: int = 64) -> float:
        """``max |conj ϖ(-m, γ) - ϖ(m, -γ)|`` on a sample avoiding γ = π,
        over ``|m| <= min(m_max, m_probe)``."""
        gam = np.linspace(-3.0, 3.0, n_angles)
        worst = 0.0
        mp = min(self.m_max, m_probe)
        for m in range(-mp, mp + 1):
            lhs = np.conj(self(-m, gam))
            rhs = self(m, -gam)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst


@dataclass(frozen=True, eq=False)
class CircleSamples:
    """Samples ``ψ(θ_k)`` of a circle function on an :class:`AngleGrid`."""

    grid: AngleGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.size,):
            raise DomainError(f"expected {self.grid.size} samples, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], grid: AngleGrid) -> "CircleSamples":
        return cls(grid, fn(grid.points))


MomentumFn = Callable[[int], complex]


@dataclass(frozen=True, eq=False)
class ClassicalObservable:
    """A function ``f(m, θ)`` on the cylinder.

    Build one with :meth:`general`, :meth:`separable`, :meth:`momentum_only`
    or :meth:`angle_only`. ``g`` is evaluated for ``|m| <= m_max`` and is
    zero beyond. Angle-only observables do not depend on ``m`` at all, and
    ``m_max`` is then only the row count used by :meth:`tabulate`.
    """

    kind: str
    m_max: int
    table: Optional[np.ndarray] = None
    grid: Optional[AngleGrid] = None
    g: Optional[MomentumFn] = None
    h: Optional[CircleSamples] = None
    m_offset: int = 0

    def __post_init__(self):
        if self.kind not in ("general", "separable", "momentum", "angle"):
            raise DomainError(f"unknown observable kind {self.kind!r}")
        if self.kind == "general":
            t = np.array(self.table, dtype=complex)
            if self.grid is None or t.shape != (2 * self.m_max + 1, self.grid.size):
                raise DomainError("general table must have shape (2M+1, K)")
            t.setflags(write=False)
            object.__setattr__(self, "table", t)

    @classmethod
    def general(cls, table, grid: AngleGrid) -> "ClassicalObservable":
        t = np.asarray(table)
        if t.ndim != 2 or t.shape[0] % 2 != 1:
            raise DomainError("general table needs an odd number of momentum rows")
        return cls("general", (t.shape[0] - 1) // 2, table=t, grid=grid)

    @classmethod
    def separable(cls, g: MomentumFn, h: CircleSamples, m_max: int) -> "ClassicalObservable":
        return cls("separable", m_max, g=g, h=h, grid=h.grid)

    @classmethod
    def momentum_only(cls, g: MomentumFn, m_max: int) -> "ClassicalObservable":
        return cls("momentum", m_max, g=g)

    @classmethod
    def angle_only(cls, h: CircleSamples, m_max: int = 0) -> "ClassicalObservable":
        return cls("angle", m_max, h=h, grid=h.grid)

    @property
    def m_lo(self) -> int:
        return -self.m_max + self.m_offset

    @property
    def m_hi(self) -> int:
        return self.m_max + self.m_offset

    def momentum_values(self, ms: np.ndarray) -> np.ndarray:
        """``g(m)`` with the support window applied (momentum/separable)."""
        out = np.zeros(len(ms), dtype=complex)
        for i, m in enumerate(ms):
            if self.m_lo <= m <= self.m_hi:
                out[i] = self.g(int(m) - self.m_offset)
        return out

    def tabulate(self, m_max: int, grid: AngleGrid) -> np.ndarray:
        """Samples ``f(m, θ_k)`` for ``m = -m_max..m_max`` as a General table."""
        from .fourier import resample

        ms = np.arange(-m_max, m_max + 1)
        if self.kind == "general":
            out = np.zeros((len(ms), grid.size), dtype=complex)
            for i, m in enumerate(ms):
                j = m - self.m_lo
                if 0 <= j < self.table.shape[0]:
                    out[i] = resample(CircleSamples(self.grid, self.table[j]), grid).values
            return out
        if self.kind == "momentum":
            return np.repeat(self.momentum_values(ms)[:, None], grid.size, axis=1)
        hv = resample(self.h, grid).values
        if self.kind == "angle":
            return np.repeat(hv[None, :], len(ms), axis=0)
        return self.momentum_values(ms)[:, None] * hv[None, :]

    def translate(self, p: PhasePoint) -> "ClassicalObservable":
        """``(𝒱f)(n, φ) = f(n - m, φ - θ)``."""
        from .fourier import rotate

        if self.kind == "momentum":
            return ClassicalObservable("momentum", self.m_max, g=self.g,
                                       m_offset=self.m_offset + p.m)
        if self.kind == "angle":
            return ClassicalObservable("angle", self.m_max, h=rotate(self.h, p.theta),
                                       grid=self.grid)
        if self.kind == "separable":
            h = rotate(self.h, p.theta)
            return ClassicalObservable("separable", self.m_max, g=self.g, h=h,
                                       grid=h.grid, m_offset=self.m_offset + p.m)
        rows = np.array([rotate(CircleSamples(self.grid, r), p.theta).values
                         for r in self.table])
        return ClassicalObservable("general", self.m_max, table=rows, grid=self.grid,
                                   m_offset=self.m_offset + p.m)

    def __add__(self, other: "ClassicalObservable") -> "ClassicalObservable":
        return _linear_combination(self, other, 1.0, 1.0)

    def scaled(self, alpha: complex) -> "ClassicalObservable":
        m = max(abs(self.m_lo), abs(self.m_hi))
        grid = self.grid or AngleGrid(1)
        return ClassicalObservable.general(alpha * self.tabulate(m, grid), grid)


def _linear_combination(f, g, a, b):
    m = max(abs(f.m_lo), abs(f.m_hi), abs(g.m_lo), abs(g.m_hi))
    grid = f.grid or g.grid or AngleGrid(1)
    return ClassicalObservable.general(a * f.tabulate(m, grid) + b * g.tabulate(m, grid), grid)
