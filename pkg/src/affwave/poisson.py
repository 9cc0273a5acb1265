"""Poisson summation checks: the classical formula and its wavelet form.

Classical (angular convention, f^(w) = integral f e^{-iwt} dt)::

    sum_k f(t + kT) = (1/T) sum_k f^(2 pi k / T) e^{2 pi i k t / T}

Wavelet form, at fixed scale a and shift b, with V(nu, b) = integral f(t)
a^(-1/2) conj(psi((t-b)/a)) K_M(t, nu) dt and nu_k = 2 pi B k / T::

    a^(-1/2) sum_k f(t+kT) conj(psi)((t+kT-b)/a) e^{(i/2B)(A k^2 T^2 + 2AkTt + 2pkT)}
      = (sqrt(2 pi i B)/T) e^{-(i/2B)(A t^2 + 2tp + D p^2)}
        sum_k e^{-(iD/2B) nu_k^2 + i(2 pi k/T)(Dp - Bq) + 2 pi i k t/T} V(nu_k, b)

``convention="ordinary"`` drops the 2 pi from the sample frequencies and phases
(e^{ikt/T}, f^(k/T), nu_k = Bk/T) for side-by-side comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import RealGrid, SaftMatrix, Signal, Wavelet, validate_matrix
from .errors import ConfigError, SlowDecay
from .sawt import _Guard, _check_scales, cell_values

CONVENTIONS = ("angular", "ordinary")
TAIL_LIMIT = 1e-3
MIN_TERMS = 8


@dataclass(frozen=True)
class AnalyticSignal:
    """A function with a closed-form Fourier transform f^(w) = integral f e^{-iwt} dt."""

    fn: Callable[[np.ndarray], np.ndarray]
    ft: Callable[[np.ndarray], np.ndarray]
    label: str = "analytic"

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def sample(self, grid: RealGrid) -> Signal:
        return Signal(self(grid.values), grid.start, grid.step)


def gaussian_pulse(center: float = 0.0, width: float = 1.0, omega0: float = 0.0,
                   amplitude: complex = 1.0) -> AnalyticSignal:
    """amplitude * exp(-(t-center)^2/(2 width^2)) e^{i omega0 t}."""
    if not width > 0:
        raise ConfigError("pulse width must be positive")

    def fn(t):
        return amplitude * np.exp(-((t - center) ** 2) / (2 * width**2) + 1j * omega0 * t)

    def ft(w):
        w = np.asarray(w, dtype=float)
        v = w - omega0
        return (amplitude * width * math.sqrt(2 * math.pi)
                * np.exp(-(width**2) * v * v / 2 - 1j * v * center))

    return AnalyticSignal(fn, ft, f"gaussian(center={center}, width={width}, omega0={omega0})")


def zero_signal() -> AnalyticSignal:
    return AnalyticSignal(lambda t: np.zeros(np.shape(t), dtype=complex),
                          lambda w: np.zeros(np.shape(w), dtype=complex), "zero")


@dataclass(frozen=True, eq=False)
class PoissonReport:
    lhs: np.ndarray
    rhs: np.ndarray
    times: np.ndarray
    abs_residual: float
    rel_residual: float
    terms_used: int
    T: float
    convention: str = "angular"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.abs_residual < 0 or self.rel_residual < 0:
            raise ValueError("residuals must be nonnegative")
        if self.terms_used < 1:
            raise ValueError("terms_used must be at least 1")

    def as_dict(self) -> dict:
        pair = lambda z: [[float(v.real), float(v.imag)] for v in np.asarray(z)]
        return {"lhs": pair(self.lhs), "rhs": pair(self.rhs), "t": [float(x) for x in self.times],
                "abs_residual": self.abs_residual, "rel_residual": self.rel_residual,
                "terms_used": self.terms_used, "T": self.T, "convention": self.convention,
                **self.meta}


def _check_args(T: float, k_max: int, convention: str) -> None:
    if not T > 0:
        raise ConfigError(f"period T must be positive, got {T}")
    if int(k_max) < MIN_TERMS:
        raise ConfigError(f"k_max must be at least {MIN_TERMS}, got {k_max}")
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}")


def _tail_check(terms: np.ndarray, ks: np.ndarray, partial: np.ndarray, side: str) -> None:
    """terms[k_index, t_index]; the |k| = k_max terms must be small against the sum."""
    scale = float(np.max(np.abs(partial), initial=0.0))
    if scale == 0.0:
        return
    edge = np.abs(ks) == np.max(np.abs(ks))
    tail = float(np.max(np.abs(terms[edge])))
    if tail > TAIL_LIMIT * scale:
        raise SlowDecay(f"{side}: edge term {tail:.3e} exceeds {TAIL_LIMIT:g} of the partial sum {scale:.3e}")


def _report(lhs, rhs, t, k_max, T, convention, meta) -> PoissonReport:
    diff = float(np.max(np.abs(lhs - rhs), initial=0.0))
    scale = float(np.max(np.abs(lhs), initial=0.0))
    rel = diff / scale if scale > 0 else (0.0 if diff == 0 else math.inf)
    return PoissonReport(lhs, rhs, np.asarray(t, dtype=float), diff, rel, 2 * int(k_max) + 1, float(T),
                         convention, meta)


def classical_poisson_check(f: AnalyticSignal, T: float, t_grid: RealGrid, k_max: int,
                            convention: str = "angular") -> PoissonReport:
    """Both sides of the classical formula summed over |k| <= k_max."""
    _check_args(T, k_max, convention)
    t = t_grid.values
    ks = np.arange(-int(k_max), int(k_max) + 1)
    left = f(t[None, :] + ks[:, None] * T)
    scale = 2 * math.pi if convention == "angular" else 1.0
    w = scale * ks / T
    right = f.ft(w)[:, None] * np.exp(1j * w[:, None] * t[None, :]) / T
    lhs, rhs = left.sum(axis=0), right.sum(axis=0)
    _tail_check(left, ks, lhs, "left side")
    _tail_check(right, ks, rhs, "right side")
    return _report(lhs, rhs, t, k_max, T, convention, {"signal": f.label})


def sawt_poisson_lhs(f: Signal, psi: Wavelet, m: SaftMatrix, a: float, b: float, T: float,
                     t: np.ndarray, ks: np.ndarray) -> np.ndarray:
    """Terms of the periodized left side, shape (k, t); f between samples by interpolation."""
    A, B, p = m.A, m.B, m.p
    x = t[None, :] + ks[:, None] * T
    kT = ks[:, None] * T
    ph = np.exp(1j / (2 * B) * (A * kT**2 + 2 * A * kT * t[None, :] + 2 * p * kT))
    return f.interp(x, "cubic") * np.conj(psi((x - b) / a)) * ph / math.sqrt(a)


def sawt_poisson_check(f: Signal, psi: Wavelet, m: SaftMatrix, a: float, b: float, T: float,
                       t_grid: RealGrid, k_max: int, convention: str = "angular",
                       check: bool = True) -> PoissonReport:
    """Both sides of the wavelet Poisson identity on ``t_grid``."""
    m = validate_matrix(m)
    _check_args(T, k_max, convention)
    _check_scales([a])
    A, B, C, D, p, q = m.as_tuple()
    t = t_grid.values
    ks = np.arange(-int(k_max), int(k_max) + 1)
    left = sawt_poisson_lhs(f, psi, m, a, b, T, t, ks)

    scale = 2 * math.pi if convention == "angular" else 1.0
    nu = scale * B * ks / T
    guard = _Guard(f, m) if check else None
    V = np.empty(ks.size, dtype=complex)
    for i, n in enumerate(nu):
        if guard is not None:
            guard.check(n, n, f"Poisson sample nu_{ks[i]} = {n:.6g}")
        V[i] = cell_values(f, psi, m, a, n, [b])[0]
    pre = m.sqrt_2piB / T * np.exp(-1j / (2 * B) * (A * t * t + 2 * t * p + D * p * p))
    ph = np.exp(-1j * D * nu**2 / (2 * B) + 1j * (nu / B) * (D * p - B * q))
    right = pre[None, :] * (ph * V)[:, None] * np.exp(1j * (nu / B)[:, None] * t[None, :])
    lhs, rhs = left.sum(axis=0), right.sum(axis=0)
    _tail_check(left, ks, lhs, "left side")
    _tail_check(right, ks, rhs, "right side")
    meta = {"a": a, "b": b, "samples": "W(nu_k, b) at fixed scale a, nu_k in the first slot",
            "index_order": {"module": "(a, b) = (scale, translation)", "samples": "(nu_k, b)"},
            "nu": [float(x) for x in nu]}
    return _report(lhs, rhs, t, k_max, T, convention, meta)
