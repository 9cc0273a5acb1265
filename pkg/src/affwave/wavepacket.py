"""Special affine wave-packet system, its transform and the windowed SAFT.

The family is::

    psi_{a,b,N}(t) = (2 pi i a B)^(-1/2) conj(psi)((t - b)/a)
                     exp{(-i/2B)[A t^2 + 2t(p - N) - 2N(Dp - Bq) + D(N^2 + p^2)]}

and WP(a, b, N) = <f, psi_{a,b,N}>. Because the family already carries
conj(psi), the transform pairs f with psi itself against the chirp:
WP = c * integral f(t) a^(-1/2) psi((t-b)/a) K_M(t, N) dt with the unimodular
constant c = conj((2 pi i B)^(-1/2)) / (2 pi i B)^(-1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import RealGrid, SaftMatrix, Signal, Wavelet, _frozen_array, relative_l2, validate_matrix
from .errors import GridMismatch
from .saft import (CHIRPFFT, QUADRATURE, kernel, omega_step, pre_chirp, prefactor, saft_forward,
                   suggest_omega_grid, support_extent)
from .sawt import _Guard, _check_scales, _map, cell_values, shift_signal

DIRECT = "direct"


def packet_constant(m: SaftMatrix) -> complex:
    """conj(k) / k with k = (2 pi i B)^(-1/2); i for B > 0 and -i for B < 0."""
    k = prefactor(m)
    return complex(np.conj(k) / k)


@dataclass(frozen=True, eq=False)
class WavePacketCube:
    """values[i, j, l] = WP(a_i, b_j, N_l)."""

    values: np.ndarray
    a_grid: object
    b_grid: RealGrid
    n_grid: RealGrid
    matrix: SaftMatrix
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = _frozen_array(self.values)
        shape = (self.a_grid.count, self.b_grid.count, self.n_grid.count)
        if v.shape != shape:
            raise GridMismatch(f"cube {v.shape} does not match grids {shape}")
        _check_scales(self.a_grid.values)
        object.__setattr__(self, "values", v)

    def slice_n(self, l: int) -> np.ndarray:
        return self.values[:, :, l]


def wp_family(m: SaftMatrix, psi: Wavelet, a: float, b: float, N: float, times: RealGrid) -> Signal:
    """psi_{a,b,N} sampled on ``times``."""
    m = validate_matrix(m)
    _check_scales([a])
    t = times.values
    amp = 1.0 / (m.sqrt_2piB * math.sqrt(a))
    vals = amp * np.conj(psi((t - b) / a)) * np.conj(kernel(m, t, N) / prefactor(m))
    return Signal(vals, times.start, times.step)


def _windowed(f: Signal, psi: Wavelet, a: float, b: float) -> Signal:
    return f.with_samples(f.samples * psi((f.times - b) / a) / math.sqrt(a))


def wp_analyze(f: Signal, psi: Wavelet, m: SaftMatrix, a_grid, b_grid: RealGrid,
               n_grid: Optional[RealGrid] = None, check: bool = True, method: str = DIRECT,
               workers: int = 1) -> WavePacketCube:
    """Cube of inner products against the wave-packet family.

    ``direct`` runs the cell engine per (a, N) (breakpoint splitting for
    piecewise windows); ``chirpfft`` transforms each windowed product with the
    fast SAFT, the same trapezoid sums for smooth windows.
    """
    m = validate_matrix(m)
    n_grid = n_grid if n_grid is not None else suggest_omega_grid(f, m)
    a_vals = _check_scales(a_grid.values)
    b_vals = b_grid.values
    n_vals = n_grid.values
    c = packet_constant(m)
    guard = _Guard(f, m) if check else None
    if guard is not None:
        guard.check(float(n_vals.min()), float(n_vals.max()), "wave-packet N grid")
    if method == DIRECT:
        window = psi.conjugate()

        def plane(a):
            return np.stack([cell_values(f, window, m, a, N, b_vals) for N in n_vals], axis=1)
    elif method == CHIRPFFT:
        def plane(a):
            return np.stack([saft_forward(_windowed(f, psi, a, b), m, n_grid, CHIRPFFT, check=False).values
                             for b in b_vals], axis=0)
    else:
        raise ValueError(f"unknown method {method!r}")
    vals = c * np.array(_map(plane, a_vals, workers))
    vals = vals.reshape(a_vals.size, b_vals.size, n_vals.size)
    return WavePacketCube(vals, a_grid, b_grid, n_grid, m, {"wavelet": psi.describe(), "method": method})


def windowed_saft(f: Signal, psi: Wavelet, m: SaftMatrix, b_grid: RealGrid, n_grid: RealGrid,
                  check: bool = True) -> np.ndarray:
    """(b, N) matrix of the windowed SAFT, c * O^M[f psi(. - b)](N)."""
    m = validate_matrix(m)
    n_vals = n_grid.values
    if check:
        _Guard(f, m).check(float(n_vals.min()), float(n_vals.max()), "windowed SAFT N grid")
    method = CHIRPFFT if isinstance(n_grid, RealGrid) else QUADRATURE
    c = packet_constant(m)
    rows = [saft_forward(_windowed(f, psi, 1.0, b), m, n_grid, method, check=False).values
            for b in b_grid.values]
    return c * np.array(rows).reshape(b_grid.count, n_grid.count)


# ---------------------------------------------------------------------------
# property checks

def modulate_signal(f: Signal, alpha: float) -> Signal:
    """e^{i alpha t} f(t)."""
    return f.with_samples(f.samples * np.exp(1j * alpha * f.times))


def time_shift_factor(m: SaftMatrix, k: float, N, literal: bool = False) -> np.ndarray:
    """WP[f(. - k)](a,b,N) = factor * WP[f](a, b - k, N - A k)."""
    A, B, C, D, p, q = m.as_tuple()
    N = np.asarray(N, dtype=float)
    s = p if literal else -p
    return np.exp(1j * (-A * C * k * k / 2 + C * k * (N + s) + A * k * q))


def phase_shift_factor(m: SaftMatrix, alpha: float, N, literal: bool = False) -> np.ndarray:
    """WP[e^{i alpha t} f](a,b,N) = factor * WP[f](a, b, N - alpha B)."""
    A, B, C, D, p, q = m.as_tuple()
    N = np.asarray(N, dtype=float)
    c0 = D * p - B * q
    if literal:
        return np.exp(-alpha * c0 - 0.5j * B * D * alpha**2 + 1j * N * alpha * B)
    return np.exp(1j * (-alpha * c0 + alpha * D * N - 0.5 * B * D * alpha**2))


def _cells(f, psi, m, a_vals, b_vals, n_vals, check) -> np.ndarray:
    """WP on scattered (a, b, N) points; b_vals and n_vals may depend on a through broadcasting."""
    c = packet_constant(m)
    guard = _Guard(f, m) if check else None
    window = psi.conjugate()
    out = np.zeros((a_vals.size, len(b_vals), len(n_vals)), dtype=complex)
    for i, a in enumerate(a_vals):
        for l, N in enumerate(n_vals):
            if guard is not None:
                guard.check(N, N, f"cell (a, N) = ({a:.6g}, {N:.6g})")
            out[i, :, l] = c * cell_values(f, window, m, a, N, b_vals)
    return out


def _residuals(lhs, rhs, rhs_literal) -> dict:
    def rel(x, y):
        nx = np.linalg.norm(np.ravel(x))
        if nx == 0:
            return float(np.linalg.norm(np.ravel(y)))
        return relative_l2(np.ravel(x), np.ravel(y))

    return {"derived": rel(lhs, rhs), "literal": rel(lhs, rhs_literal),
            "modulus": rel(np.abs(lhs), np.abs(rhs))}


@dataclass(frozen=True)
class WavePacketReport:
    linearity: float
    window_conjugate_linearity: float
    window_linearity: float
    time_shift: dict
    phase_shift: dict
    joint_shift: dict
    cells: dict

    def as_dict(self) -> dict:
        return {"linearity": self.linearity,
                "window_conjugate_linearity": self.window_conjugate_linearity,
                "window_linearity": self.window_linearity,
                "time_shift": dict(self.time_shift), "phase_shift": dict(self.phase_shift),
                "joint_shift": dict(self.joint_shift), "cells": dict(self.cells)}


def wp_verify_properties(f: Signal, g: Signal, psi: Wavelet, phi: Wavelet, m: SaftMatrix,
                         k: float, alpha: float, coeffs: Sequence[complex] = (0.7 - 0.4j, -1.1 + 0.3j),
                         window_coeffs: Sequence[float] = (0.8, -1.3),
                         a_values=(0.75, 1.0, 1.5), b_values=(-1.0, 0.0, 0.5, 1.0),
                         n_values=(-1.0, 0.5, 2.0), check: bool = True) -> WavePacketReport:
    """Residuals of the wave-packet identities on a set of cells.

    * linearity in f with complex ``coeffs``
    * conjugate-linearity in the window with real ``window_coeffs``
    * linearity in the window with the complex ``coeffs``
    * time shift by ``k``, phase shift by ``alpha`` and both together, each
      with the derived factor, the literal factor and a modulus-only check
    """
    m = validate_matrix(m)
    A, B = m.A, m.B
    a_vals = _check_scales(a_values)
    b_vals = np.asarray(b_values, dtype=float)
    n_vals = np.asarray(n_values, dtype=float)
    cells = lambda sig, ps=psi, bb=b_vals, nn=n_vals: _cells(sig, ps, m, a_vals, bb, nn, check)

    base = cells(f)
    c1, c2 = (complex(c) for c in coeffs)
    lhs = cells(f * c1 + g * c2)
    rhs = c1 * base + c2 * cells(g)
    lin = relative_l2(np.ravel(rhs), np.ravel(lhs)) if np.any(rhs) else float(np.linalg.norm(lhs))

    r1, r2 = (float(c) for c in window_coeffs)
    mixed = _mix_wavelets(psi, phi, r1, r2, f)
    lhs = cells(f, mixed)
    wphi = cells(f, phi)
    rhs = np.conj(r1) * base + np.conj(r2) * wphi
    anti = relative_l2(np.ravel(rhs), np.ravel(lhs)) if np.any(rhs) else float(np.linalg.norm(lhs))
    mixed_c = _mix_wavelets(psi, phi, c1, c2, f)
    lhs = cells(f, mixed_c)
    rhs = c1 * base + c2 * wphi
    wlin = relative_l2(np.ravel(rhs), np.ravel(lhs)) if np.any(rhs) else float(np.linalg.norm(lhs))

    # time shift: compare per a since N - A k is a-independent but b - k is shared
    lhs = cells(shift_signal(f, k))
    moved = cells(f, psi, b_vals - k, n_vals - A * k)
    ts = _residuals(lhs, time_shift_factor(m, k, n_vals) * moved,
                    time_shift_factor(m, k, n_vals, literal=True) * moved)

    lhs = cells(modulate_signal(f, alpha))
    moved = cells(f, psi, b_vals, n_vals - alpha * B)
    ps = _residuals(lhs, phase_shift_factor(m, alpha, n_vals) * moved,
                    phase_shift_factor(m, alpha, n_vals, literal=True) * moved)

    lhs = cells(modulate_signal(shift_signal(f, k), alpha))
    n1 = n_vals - alpha * B
    moved = cells(f, psi, b_vals - k, n1 - A * k)
    fac = phase_shift_factor(m, alpha, n_vals) * time_shift_factor(m, k, n1)
    fac_pr = phase_shift_factor(m, alpha, n_vals, True) * time_shift_factor(m, k, n1, True)
    js = _residuals(lhs, fac * moved, fac_pr * moved)

    info = {"a": a_vals.tolist(), "b": b_vals.tolist(), "N": n_vals.tolist(), "k": k, "alpha": alpha}
    return WavePacketReport(lin, anti, wlin, ts, ps, js, info)


class _Combination:
    """c1 psi + c2 phi for smooth windows, exposing what the cell engine uses."""

    is_smooth = True

    def __init__(self, psi, phi, c1, c2):
        self.psi, self.phi, self.c1, self.c2 = psi, phi, c1, c2

    def __call__(self, t):
        return self.c1 * self.psi(t) + self.c2 * self.phi(t)

    def support(self):
        (a0, a1), (b0, b1) = self.psi.support(), self.phi.support()
        return (min(a0, b0), max(a1, b1))

    def conjugate(self):
        return _Combination(self.psi.conjugate(), self.phi.conjugate(), np.conj(self.c1), np.conj(self.c2))


def _mix_wavelets(psi: Wavelet, phi: Wavelet, c1: complex, c2: complex, like: Signal):
    """c1 psi + c2 phi: exact for smooth windows, sampled finely otherwise."""
    if psi.is_smooth and phi.is_smooth:
        return _Combination(psi, phi, c1, c2)
    lo = min(psi.support()[0], phi.support()[0])
    hi = max(psi.support()[1], phi.support()[1])
    n = int(math.ceil((hi - lo) / (like.dt / 4))) + 1
    grid = RealGrid.between(lo, hi, n)
    t = grid.values
    return Wavelet.sampled(Signal(c1 * psi(t) + c2 * phi(t), grid.start, grid.step))


# ---------------------------------------------------------------------------
# energy

def packet_n_grid(signals: Sequence[Signal], psi: Wavelet, m: SaftMatrix, a_values,
                  probes: int = 33, tail: float = 1e-11) -> RealGrid:
    """Uniform N grid covering the SAFT of every windowed product f psi_{a,b}.

    The frequency range keeps every bin above ``tail`` times the largest
    spectral magnitude over all probed products; the spacing follows the
    inverse guard for that range.
    """
    lo, hi = math.inf, -math.inf
    peak = 0.0
    spectra = []
    for f in signals:
        n = 1 << int(math.ceil(math.log2(4 * f.count)))
        nu = 2 * math.pi * np.fft.fftfreq(n, f.dt)
        chirp = pre_chirp(m, f.times)
        for a in a_values:
            for b in np.linspace(f.t0, f.t_end, probes):
                H = np.abs(np.fft.fft(_windowed(f, psi, a, b).samples * chirp, n))
                peak = max(peak, float(H.max()))
                spectra.append((nu, H))
    if peak == 0.0:
        return RealGrid(0.0, 1.0, 2)
    for nu, H in spectra:
        keep = H > tail * peak
        if np.any(keep):
            lo, hi = min(lo, float(nu[keep].min())), max(hi, float(nu[keep].max()))
    pad = 0.05 * (hi - lo) + 1.0
    w1, w2 = sorted((m.B * (lo - pad), m.B * (hi + pad)))
    t_lo = min(support_extent(f.samples, f.t0, f.dt)[0] for f in signals)
    t_hi = max(support_extent(f.samples, f.t0, f.dt)[1] for f in signals)
    step = omega_step(m, max(abs(w1), abs(w2)), t_lo, t_hi)
    count = int(math.ceil((w2 - w1) / step)) + 1
    return RealGrid.between(w1, w2, count)


def wp_inner(c1: WavePacketCube, c2: WavePacketCube) -> np.ndarray:
    """Per-scale trapezoid of WP1 conj(WP2) over b and N."""
    wb = c1.b_grid.weights()
    wn = c1.n_grid.weights()
    return np.einsum("j,ijl,l->i", wb, c1.values * np.conj(c2.values), wn)


def wp_moyal(pairs: Sequence[tuple], psi: Wavelet, m: SaftMatrix, a_values=(0.75, 1.0, 1.5),
             b_grid: Optional[RealGrid] = None, n_grid: Optional[RealGrid] = None,
             check: bool = True) -> dict:
    """Measured kappa_wp = <WP f1, WP f2> / (||psi||^2 <f1, f2>) per pair and per scale."""
    m = validate_matrix(m)
    a_vals = _check_scales(a_values)
    signals = [s for pair in pairs for s in pair]
    b_grid = b_grid if b_grid is not None else signals[0].grid
    n_grid = n_grid if n_grid is not None else packet_n_grid(signals, psi, m, a_vals)
    agrid = _ScaleList(a_vals)
    cache = {}

    def cube(sig):
        key = id(sig)
        if key not in cache:
            cache[key] = wp_analyze(sig, psi, m, agrid, b_grid, n_grid, check=check, method=CHIRPFFT)
        return cache[key]

    ratios = []
    for f1, f2 in pairs:
        ip = f1.inner(f2)
        per_a = wp_inner(cube(f1), cube(f2)) / (psi.norm() ** 2 * ip)
        ratios.append(per_a)
    ratios = np.array(ratios)
    kappa = complex(np.mean(ratios))
    spread = float(np.max(np.abs(ratios - kappa)) / abs(kappa)) if kappa != 0 else math.inf
    return {"kappa_wp": kappa, "ratios": ratios, "spread": spread, "n_grid": n_grid.describe(),
            "a": a_vals.tolist()}


class _ScaleList:
    """Minimal grid over explicit scales, enough for WavePacketCube."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)
        self.count = self.values.size

    def describe(self) -> dict:
        return {"kind": "list", "values": self.values.tolist()}
