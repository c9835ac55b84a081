"""Fiducial vectors on the circle, their special functions and reproducing kernels.

Every fiducial is normalized numerically; printed normalization constants are
never trusted. Closed kernels are written as ``K = A · Φ`` with

    A(p, p') = e^{imθ_s/2} e^{-im'θ'_s/2} e^{-i(m-m')θ'}
    Φ(Δm, Δθ) = Σ_q e^{iqΔθ} conj(φ̂_q) φ̂_{q+Δm}

where ``θ_s`` is the symmetric representative used by the Weyl operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import (DivergenceError, DomainError, FourierState, NotAvailableError,
                   PhasePoint, TailMassError, symmetric_angle)

TAIL_TOL = 1e-12

KINDS = ("constant", "basis", "gaussian", "dirichlet", "fejer", "vonmises", "poisson")


@dataclass(frozen=True)
class FiducialKind:
    """Tag plus its single parameter (``None`` for the constant fiducial).

    ``basis``/``dirichlet``/``fejer`` take an integer ``n``, ``gaussian`` a
    width ``σ > 0``, ``vonmises`` a concentration ``λ > 0`` and ``poisson`` a
    radius ``r`` in ``(0, 1)``.
    """

    tag: str
    param: float | int | None = None

    def __post_init__(self):
        tag = self.tag.lower()
        object.__setattr__(self, "tag", tag)
        p = self.param
        if tag not in KINDS:
            raise DomainError(f"unknown fiducial kind {self.tag!r}")
        if tag == "constant":
            object.__setattr__(self, "param", None)
        elif tag in ("basis", "dirichlet", "fejer"):
            if p is None or float(p) != int(p):
                raise DomainError(f"{tag} needs an integer parameter")
            if tag != "basis" and int(p) < 0:
                raise DomainError(f"{tag} order must be non-negative")
            object.__setattr__(self, "param", int(p))
        elif tag in ("gaussian", "vonmises"):
            if p is None or not float(p) > 0:
                raise DomainError(f"{tag} parameter must be positive")
            object.__setattr__(self, "param", float(p))
        elif tag == "poisson":
            if p is None or not 0.0 < float(p) < 1.0:
                raise DomainError("poisson radius must lie in (0, 1)")
            object.__setattr__(self, "param", float(p))

    @classmethod
    def parse(cls, text: str) -> "FiducialKind":
        """``"vonmises:2"``, ``"basis:-1"``, ``"constant"`` ..."""
        tag, _, arg = text.partition(":")
        if not arg:
            return cls(tag)
        val = float(arg)
        return cls(tag, int(val) if val.is_integer() and tag.lower() in ("basis", "dirichlet", "fejer") else val)

    def __str__(self):
        return self.tag if self.param is None else f"{self.tag}:{self.param}"


def theta3(x: float, q: float) -> float:
    """Jacobi theta ``Σ_n q^{n²} e^{2πinx}`` for real ``x`` and ``0 <= q < 1``."""
    if not q < 1.0:
        raise DivergenceError(f"theta3 diverges for q = {q}")
    if q < 0.0:
        raise DomainError("q must be non-negative")
    if q == 0.0:
        return 1.0
    # q^{n²} < 1e-17 beyond this n
    n_top = int(math.ceil(math.sqrt(40.0 / -math.log(q)))) + 1
    n = np.arange(n_top, 0, -1, dtype=float)
    terms = np.exp(n * n * math.log(q)) * np.cos(2 * math.pi * n * x)
    return float(1.0 + 2.0 * np.sum(terms))


def bessel_i(n: int, x):
    """Modified Bessel function ``I_n(x)`` of integer order (arrays broadcast)."""
    return special.iv(np.abs(np.asarray(n, dtype=int)), x)


def _raw_coeffs(kind: FiducialKind, n_max: int) -> np.ndarray:
    n = np.arange(-n_max, n_max + 1)
    p = kind.param
    if kind.tag == "constant":
        return (n == 0).astype(float)
    if kind.tag == "basis":
        return (n == p).astype(float)
    if kind.tag == "gaussian":
        return np.exp(-0.5 * p * p * n * n)
    if kind.tag == "dirichlet":
        return (np.abs(n) <= p).astype(float)
    if kind.tag == "fejer":
        return np.clip(1.0 - np.abs(n) / (p + 1.0), 0.0, None)
    if kind.tag == "vonmises":
        # exponentially scaled to keep large λ finite
        return special.ive(np.abs(n), p)
    if kind.tag == "poisson":
        return p ** np.abs(n).astype(float)
    raise DomainError(kind.tag)


def support_radius(kind: FiducialKind) -> int | None:
    """Largest ``|n|`` carrying a nonzero coefficient, if finite."""
    if kind.tag == "constant":
        return 0
    if kind.tag == "basis":
        return abs(kind.param)
    if kind.tag in ("dirichlet", "fejer"):
        return kind.param
    return None


def recommended_n_max(kind: FiducialKind) -> int:
    """Smallest band-limit at which ``make_fiducial`` passes its tail check."""
    r = support_radius(kind)
    if r is not None:
        return r
    n = 1
    while True:
        c = _raw_coeffs(kind, n)
        c = c / np.linalg.norm(c)
        if abs(c[-1]) <= TAIL_TOL and abs(c[0]) <= TAIL_TOL:
            return n
        n += 1
        if n > 100000:
            raise TailMassError(f"{kind} does not decay to {TAIL_TOL}")


def make_fiducial(kind: FiducialKind | str, n_max: int | None = None) -> FourierState:
    """Unit-norm fiducial vector of the given kind.

    Raises
    ------
    TailMassError
        If the coefficient at ``|n| = n_max`` exceeds ``1e-12`` or a
        finitely supported fiducial does not fit in the band.
    """
    if isinstance(kind, str):
        kind = FiducialKind.parse(kind)
    if n_max is None:
        n_max = recommended_n_max(kind)
    r = support_radius(kind)
    if r is not None and r > n_max:
        raise TailMassError(f"{kind} has support |n| <= {r}, band-limit {n_max} too small")
    c = _raw_coeffs(kind, n_max)
    c = c / np.linalg.norm(c)
    if r is None and max(abs(c[0]), abs(c[-1])) > TAIL_TOL:
        raise TailMassError(
            f"{kind}: coefficient at |n|={n_max} is {abs(c[-1]):.2e} > {TAIL_TOL:g}; "
            f"need n_max >= {recommended_n_max(kind)}")
    return FourierState.normalized(n_max, c)


def kernel_prefactor(p: PhasePoint, q: PhasePoint) -> complex:
    """Unimodular factor ``A`` in front of ``Φ(m - m', θ - θ')``."""
    ts, tq = symmetric_angle(p.theta), symmetric_angle(q.theta)
    return complex(np.exp(0.5j * p.m * ts - 0.5j * q.m * tq - 1j * (p.m - q.m) * q.theta))


def _geometric(lo: int, hi: int, x: float) -> complex:
    """``Σ_{q=lo}^{hi} e^{iqx}`` with the removable singularity handled."""
    count = hi - lo + 1
    if count <= 0:
        return 0j
    s = math.sin(0.5 * x)
    if abs(s) < 1e-8:
        # near x = 2πk fall back to the direct sum
        return complex(np.sum(np.exp(1j * np.arange(lo, hi + 1) * x)))
    return complex(np.exp(0.5j * (lo + hi) * x) * math.sin(0.5 * count * x) / s)


def _phi_closed(kind: FiducialKind, dm: int, dth: float) -> complex:
    p = kind.param
    if kind.tag == "constant":
        return 1.0 + 0j if dm == 0 else 0j
    if kind.tag == "basis":
        return complex(np.exp(1j * p * dth)) if dm == 0 else 0j
    if kind.tag == "dirichlet":
        lo, hi = max(-p, -p - dm), min(p, p - dm)
        return _geometric(lo, hi, dth) / (2 * p + 1)
    if kind.tag == "fejer":
        norm2 = 1.0 + p * (2 * p + 1) / (3.0 * (p + 1))
        q = np.arange(-p, p + 1)
        w = (1 - np.abs(q) / (p + 1)) * np.clip(1 - np.abs(q + dm) / (p + 1), 0, None)
        return complex(np.sum(w * np.exp(1j * q * dth)) / norm2)
    if kind.tag == "gaussian":
        s2 = p * p
        # Σ_q e^{-σ²(q+Δm/2)²} e^{iqΔθ}, centered near q = -Δm/2
        width = int(math.ceil(math.sqrt(40.0 / s2))) + 2
        c = -dm // 2
        q = np.arange(c - width, c + width + 1)
        num = np.sum(np.exp(-s2 * (q + 0.5 * dm) ** 2 + 1j * q * dth))
        return complex(math.exp(-0.25 * s2 * dm * dm) * num / theta3(0.0, math.exp(-s2)))
    if kind.tag == "vonmises":
        lam = p
        arg = 2.0 * lam * math.cos(0.5 * dth)
        # I_k(-x) = (-1)^k I_k(x); scaled by e^{-2λ} on both sides
        val = special.ive(abs(dm), abs(arg)) * math.exp(abs(arg) - 2 * lam)
        if arg < 0 and dm % 2:
            val = -val
        return complex(np.exp(-0.5j * dm * dth) * val / special.ive(0, 2 * lam))
    raise NotAvailableError(f"no closed reproducing kernel for {kind}")


def closed_kernel(kind: FiducialKind | str, p: PhasePoint, q: PhasePoint) -> complex:
    """Closed-form ``<φ_p | φ_q>`` for the unit-norm fiducial of ``kind``.

    Raises
    ------
    NotAvailableError
        For kinds without a closed form (``poisson``); use
        :func:`cylq.gabor.kernel_numeric` instead.
    """
    if isinstance(kind, str):
        kind = FiducialKind.parse(kind)
    return kernel_prefactor(p, q) * _phi_closed(kind, p.m - q.m, p.theta - q.theta)


# Tabulated rows as stated, kept as candidates so that
# the verification report can show how far each one is from the numeric
# kernel after fitting one global constant. The printed prefactor A is
# evaluated on our half-angle branch so that only the Φ part is compared.

def printed_kernel(kind: FiducialKind, p: PhasePoint, q: PhasePoint, variant: str = "table") -> complex:
    dm, dth = p.m - q.m, p.theta - q.theta
    A = kernel_prefactor(p, q)
    k = kind.param
    if kind.tag == "constant":
        return complex(np.exp(1j * p.m * dth)) if dm == 0 else 0j
    if kind.tag == "basis":
        return A if dm == 0 else 0j
    if kind.tag == "dirichlet":
        s = math.sin(0.5 * dth)
        ratio = (2 * k + 1) if abs(s) < 1e-12 else math.sin((k + 0.5) * dth) / s
        return A * ratio / (2 * math.pi * (k + 1))
    if kind.tag == "fejer":
        j = np.arange(-k, k + 1)
        w = (1 - np.abs(j) / (k + 1)) * (1 - np.abs(j - dm) / (k + 1))
        return A * complex(np.sum(w * np.exp(1j * j * dth)))
    if kind.tag == "gaussian":
        n = np.arange(-40, 41)
        s = np.sum(np.exp(-n * n) * np.exp(1j * n * (1j * dm + dth)))
        return 4 * math.pi ** 2 * A * math.exp(-0.5 * dm * dm) * complex(s)
    if kind.tag == "vonmises":
        lam = k
        if variant == "table":
            arg = 2 * lam * math.cos(0.5 * dth)
            return A * complex(special.iv(abs(dm), arg)) / (2 * math.pi * special.iv(0, 2 * lam))
        ph = np.exp(0.5j * (dm * p.theta - p.m * dth))
        return complex(ph * special.iv(abs(dm), 2 * lam) * math.cos(0.5 * dth)
                       / (2 * math.pi * special.iv(0, 2 * lam)))
    raise NotAvailableError(f"no printed kernel for {kind}")


def fit_constant(reference: np.ndarray, candidate: np.ndarray) -> tuple[complex, float]:
    """Least-squares ``c`` with ``reference ≈ c·candidate`` and the max residual."""
    reference = np.asarray(reference, dtype=complex).ravel()
    candidate = np.asarray(candidate, dtype=complex).ravel()
    denom = np.vdot(candidate, candidate)
    c = complex(np.vdot(candidate, reference) / denom) if denom != 0 else 0j
    return c, float(np.max(np.abs(reference - c * candidate)))


def sample_points(n: int = 5, rng: np.random.Generator | None = None,
                  m_range: int = 3) -> list[PhasePoint]:
    """A reproducible list of ``n`` phase points (used for kernel checks)."""
    rng = np.random.default_rng(7) if rng is None else rng
    ms = rng.integers(-m_range, m_range + 1, size=n)
    ts = rng.uniform(0.0, 2 * math.pi, size=n)
    return [PhasePoint(int(m), float(t)) for m, t in zip(ms, ts)]

