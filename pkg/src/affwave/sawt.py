"""Continuous special affine wavelet transform.

Daughters are psi^M_{a,b}(t) = a^(-1/2) psi((t - b)/a) conj(K_M(t, a)) and
W(a, b) = <f, psi^M_{a,b}> = integral f(t) a^(-1/2) conj(psi((t-b)/a)) K_M(t, a) dt.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    GeoGrid,
    RealGrid,
    SaftMatrix,
    Scalogram,
    Signal,
    Wavelet,
    relative_l2,
    trapezoid_weights,
    validate_matrix,
)
from .errors import DivergentMoment, NonpositiveScale, NotNormalized
from .saft import (
    CHIRPFFT,
    chirp_sum,
    energy_bandwidth,
    guard_limit,
    kernel,
    post_phase,
    pre_chirp,
    saft_forward,
    support_extent,
)
from .errors import NyquistViolation

NORMALIZED_TOL = 1e-9


# ---------------------------------------------------------------------------
# cell engine

class _Guard:
    """Signal-dependent part of the sampling guard, computed once."""

    def __init__(self, f: Signal, m: SaftMatrix):
        lo, hi = support_extent(f.samples, f.t0, f.dt)
        self.t_max = max(abs(lo), abs(hi))
        self.sigma = energy_bandwidth(f.samples, f.dt)
        self.f = f
        self.m = m

    def check(self, nu_lo: float, nu_hi: float, where: str) -> None:
        m = self.m
        offset = max(abs(m.p - nu_lo), abs(m.p - nu_hi))
        limit = guard_limit(m, self.t_max, offset, self.sigma)
        if self.f.dt > limit * (1 + 1e-12):
            raise NyquistViolation(
                f"sampling guard failed at {where}: dt = {self.f.dt:.6g} exceeds {limit:.6g}"
            )


def cell_values(f: Signal, psi: Wavelet, m: SaftMatrix, sigma: float, nu: float,
                shifts) -> np.ndarray:
    """integral f(t) |sigma|^(-1/2) conj(psi((t - s)/sigma)) K_M(t, nu) dt for each shift s.

    Trapezoid on f's own grid. Smooth wavelets use the full-grid weights;
    piecewise wavelets split the cells at their breakpoints and take f at the
    cut points by linear interpolation.
    """
    shifts = np.atleast_1d(np.asarray(shifts, dtype=float))
    if sigma == 0:
        raise NonpositiveScale("scale must be nonzero")
    if psi.is_smooth:
        return _smooth_cells(f, psi, m, sigma, nu, shifts)
    return _split_cells(f, psi, m, sigma, nu, shifts)


def _smooth_cells(f, psi, m, sigma, nu, shifts):
    t = f.times
    g = f.weights() * f.samples * kernel(m, t, nu)
    lo, hi = psi.support()
    half = max(abs(lo), abs(hi)) * abs(sigma)
    width = min(f.count, int(math.ceil(2 * half / f.dt)) + 3)
    out = np.zeros(shifts.size, dtype=complex)
    block = max(1, 2_000_000 // max(width, 1))
    for s0 in range(0, shifts.size, block):
        s = shifts[s0:s0 + block]
        start = np.floor((s - half - f.t0) / f.dt).astype(int) - 1
        start = np.clip(start, 0, max(f.count - width, 0))
        idx = start[:, None] + np.arange(width)[None, :]
        u = (t[idx] - s[:, None]) / sigma
        out[s0:s0 + block] = np.sum(np.conj(psi(u)) * g[idx], axis=1)
    return out / math.sqrt(abs(sigma))


def _split_cells(f, psi, m, sigma, nu, shifts):
    t = f.times
    t0, t1, dt = f.t0, f.t_end, f.dt
    samples = f.samples
    out = np.zeros(shifts.size, dtype=complex)
    pieces = psi.pieces()
    eps = 1e-9 * dt
    for j, s in enumerate(shifts):
        total = 0j
        for k, (u0, u1) in enumerate(pieces):
            x0, x1 = sorted((s + sigma * u0, s + sigma * u1))
            x0, x1 = max(x0, t0), min(x1, t1)
            if x1 - x0 <= eps:
                continue
            i0 = int(math.floor((x0 - t0 + eps) / dt)) + 1
            i1 = int(math.ceil((x1 - t0 - eps) / dt)) - 1
            inner = slice(max(i0, 0), min(i1, f.count - 1) + 1)
            nodes = np.concatenate(([x0], t[inner], [x1]))
            fv = np.concatenate((f.interp([x0]), samples[inner], f.interp([x1])))
            pv = psi.piece_values((nodes - s) / sigma, k)
            y = fv * np.conj(pv) * kernel(m, nodes, nu)
            d = np.diff(nodes)
            total += np.sum(d * (y[:-1] + y[1:])) / 2
        out[j] = total
    return out / math.sqrt(abs(sigma))


def _check_scales(a_values) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a_values, dtype=float))
    bad = a[~(a > 0)]
    if bad.size:
        raise NonpositiveScale(f"scales must be positive, got {bad[0]}")
    return a


def _map(fn, items, workers: int):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


# ---------------------------------------------------------------------------
# family and analysis

def daughter(m: SaftMatrix, psi: Wavelet, a: float, b: float, times: RealGrid) -> Signal:
    """psi^M_{a,b} sampled on ``times``."""
    m = validate_matrix(m)
    _check_scales([a])
    t = times.values
    vals = psi((t - b) / a) * np.conj(kernel(m, t, a)) / math.sqrt(a)
    return Signal(vals, times.start, times.step)


def default_a_grid(f: Signal) -> GeoGrid:
    """Geometric scales with ratio 2^(1/8) from 4 dt to a quarter of the duration."""
    lo = 4 * f.dt
    hi = max((f.t_end - f.t0) / 4, 2 * lo)
    count = int(math.floor(8 * math.log2(hi / lo))) + 1
    return GeoGrid(lo, 2 ** 0.125, count)


def analyze(f: Signal, psi: Wavelet, m: SaftMatrix, a_grid=None, b_grid: Optional[RealGrid] = None,
            check: bool = True, workers: int = 1) -> Scalogram:
    """Scalogram W(a_i, b_j) = <f, psi^M_{a_i, b_j}> by trapezoid."""
    m = validate_matrix(m)
    a_grid = a_grid if a_grid is not None else default_a_grid(f)
    b_grid = b_grid if b_grid is not None else f.grid
    a_vals = _check_scales(a_grid.values)
    b_vals = b_grid.values
    guard = _Guard(f, m) if check else None

    def row(a):
        if guard is not None:
            guard.check(a, a, f"scale a = {a:.6g}")
        return cell_values(f, psi, m, a, a, b_vals)

    values = np.array(_map(row, a_vals, workers)).reshape(a_vals.size, b_vals.size)
    meta = {"wavelet": psi.describe(), "signal_grid": f.grid.describe()}
    return Scalogram(values, a_grid, b_grid, m, meta)


def analyze_cells(f: Signal, psi: Wavelet, m: SaftMatrix, a_values, b_values,
                  check: bool = True) -> np.ndarray:
    """W on arbitrary (a, b) points, a matrix over a_values x b_values."""
    m = validate_matrix(m)
    a_vals = _check_scales(a_values)
    guard = _Guard(f, m) if check else None
    rows = []
    for a in a_vals:
        if guard is not None:
            guard.check(a, a, f"scale a = {a:.6g}")
        rows.append(cell_values(f, psi, m, a, a, b_values))
    return np.array(rows)


# ---------------------------------------------------------------------------
# SAFT-domain path

def wavelet_spectrum(psi: Wavelet, m: SaftMatrix, eta: RealGrid, samples_per_piece: int = 4097) -> np.ndarray:
    """psi^(eta/B) = integral psi(y) exp(-i y eta / B) dy, evaluated through the SAFT.

    The chirp-modulated mother g = psi exp{-i(Ay^2 + 2yp)/2B} has
    O^M[g](eta) = (2 pi i B)^(-1/2) e^{i theta(eta)} psi^(eta/B), so
    psi^(eta/B) = sqrt(2 pi i B) e^{-i theta(eta)} O^M[g](eta). Each smooth
    piece of psi is transformed separately.
    """
    total = np.zeros(eta.count, dtype=complex)
    e = eta.values
    f_max = max(abs(e[0]), abs(e[-1])) / abs(m.B) + abs(psi.alpha) + 1.0
    for k, (u0, u1) in enumerate(psi.pieces()):
        n = max(samples_per_piece, int(math.ceil((u1 - u0) * f_max * 4 / math.pi)) + 1)
        y = np.linspace(u0, u1, n)
        g = psi.piece_values(y, k) * np.conj(pre_chirp(m, y))
        piece = Signal(g, u0, y[1] - y[0])
        total += saft_forward(piece, m, eta, CHIRPFFT, check=False).values
    return m.sqrt_2piB * np.exp(-1j * post_phase(m, e)) * total


def default_xi_grid(f: Signal, psi: Wavelet, m: SaftMatrix, a: float, b_values) -> RealGrid:
    """xi grid covering O^M f with spacing fine enough for the daughter's extent."""
    h = f.samples * pre_chirp(m, f.times)
    n = 1 << int(math.ceil(math.log2(4 * f.count)))
    H = np.abs(np.fft.fft(h, n))
    nu = 2 * math.pi * np.fft.fftfreq(n, f.dt)
    keep = H > 1e-13 * H.max() if H.max() > 0 else np.ones(n, bool)
    lo, hi = float(nu[keep].min()), float(nu[keep].max())
    pad = 0.05 * (hi - lo) + 1.0
    x1, x2 = sorted((m.B * (lo - pad), m.B * (hi + pad)))
    u0, u1 = psi.support()
    b_values = np.asarray(b_values, dtype=float)
    t_all = max(abs(f.t0), abs(f.t_end), float(np.max(np.abs(b_values))) + a * max(abs(u0), abs(u1)))
    c = abs(m.D * m.p - m.B * m.q)
    dxi = math.pi * abs(m.B) / (2.0 * (t_all + c) + 1.0)
    count = int(math.ceil((x2 - x1) / dxi)) + 1
    return RealGrid.between(x1, x2, count)


def analyze_via_saft(f: Signal, psi: Wavelet, m: SaftMatrix, a: float, b_grid: RealGrid,
                     xi_grid: Optional[RealGrid] = None, check: bool = True) -> np.ndarray:
    """W(a, b) computed as integral O^M[f](xi) conj(D_{a,b}(xi)) dxi.

    D_{a,b} = O^M[psi^M_{a,b}] = (2 pi |B|)^(-1) sqrt(a) e^{(i/2B)[-2(xi-a)(Dp-Bq) + D(xi^2-a^2)]}
    e^{-ib(xi-a)/B} psi^(a(xi-a)/B).
    """
    m = validate_matrix(m)
    _check_scales([a])
    b_vals = b_grid.values
    if xi_grid is None:
        xi_grid = default_xi_grid(f, psi, m, a, b_vals)
    F = saft_forward(f, m, xi_grid, CHIRPFFT, check=check)
    xi = xi_grid.values
    eta = RealGrid(a * (xi_grid.start - a), a * xi_grid.step, xi_grid.count)
    psi_hat = wavelet_spectrum(psi, m, eta)
    ph = (-2 * (xi - a) * (m.D * m.p - m.B * m.q) + m.D * (xi * xi - a * a)) / (2 * m.B)
    d0 = math.sqrt(a) / (2 * math.pi * abs(m.B)) * np.exp(1j * ph) * psi_hat
    x = xi_grid.weights() * F.values * np.conj(d0)
    # conj(e^{-ib(xi-a)/B}) = e^{ib xi/B} e^{-iab/B}
    s = chirp_sum(x, xi_grid.start, xi_grid.step, b_grid, +1, m.B)
    return s * np.exp(-1j * a * b_vals / m.B)


# ---------------------------------------------------------------------------
# synthesis and energy functionals

def _require_normalized(psi: Wavelet) -> None:
    n = psi.norm()
    if abs(n - 1.0) > NORMALIZED_TOL:
        raise NotNormalized(f"wavelet norm is {n!r}; normalize it first")


def synthesize(W: Scalogram, psi: Wavelet, m: SaftMatrix, times: RealGrid,
               form: str = "adjoint") -> Signal:
    """Reconstruction sum over the scalogram grid.

    ``adjoint``: f(t) = integral W(a,b) psi^M_{a,b}(t) da db, the adjoint of
    analyze in the plain da db measure. ``literal`` additionally multiplies each
    term by conj(K_M(t, a)), a diagnostic of the uncorrected formula.
    """
    m = validate_matrix(m)
    _require_normalized(psi)
    if form not in ("adjoint", "literal"):
        raise ValueError(f"unknown form {form!r}")
    t = times.values
    a_vals = W.a_grid.values
    wa = W.a_grid.weights()
    wb = W.b_grid.weights()
    b_vals = W.b_grid.values
    out = np.zeros(t.size, dtype=complex)
    for i, a in enumerate(a_vals):
        coeff = wa[i] * wb * W.values[i]
        if not np.any(coeff):
            continue
        ck = np.conj(kernel(m, t, a))
        acc = np.zeros(t.size, dtype=complex)
        for s0 in range(0, b_vals.size, 64):
            u = (t[:, None] - b_vals[None, s0:s0 + 64]) / a
            acc += psi(u) @ coeff[s0:s0 + 64]
        term = acc * ck / math.sqrt(a)
        if form == "literal":
            term = term * ck
        out += term
    return Signal(out, times.start, times.step)


def calibrate(f: Signal, g: Signal) -> complex:
    """Least-squares constant c minimizing ||g - c f|| (weights of f's grid)."""
    w = f.weights()
    den = np.sum(w * np.abs(f.samples) ** 2)
    if den == 0:
        return 0j
    return complex(np.sum(w * g.samples * np.conj(f.samples)) / den)


def rayleigh_inner(f: Signal, g: Signal, psi: Wavelet, phi: Wavelet, m: SaftMatrix,
                   a_grid, b_grid: RealGrid, check: bool = True) -> complex:
    """Double trapezoid of W_psi[f] conj(W_phi[g]) in da db."""
    Wf = analyze(f, psi, m, a_grid, b_grid, check=check).values
    Wg = analyze(g, phi, m, a_grid, b_grid, check=check).values
    wa, wb = a_grid.weights(), b_grid.weights()
    return complex(np.einsum("i,ij,j->", wa, Wf * np.conj(Wg), wb))


def moyal_ratio(f: Signal, psi: Wavelet, m: SaftMatrix, a_grid, b_grid: RealGrid,
                check: bool = True) -> float:
    """Integral of |W|^2 da db over ||f||^2 ||psi||^2."""
    e = analyze(f, psi, m, a_grid, b_grid, check=check).energy()
    return e / (f.norm() ** 2 * psi.norm() ** 2)


def two_wavelet_constant(psi: Wavelet, phi: Wavelet, m: SaftMatrix, a_values, b_values) -> dict:
    """The constant <psi^M_{a,b}, phi^M_{a,b}> over a set of cells.

    Returns the values and their spread, the diagnostic exposed for the
    two-wavelet inversion formula.
    """
    vals = np.array([[reproducing_kernel_pair(m, psi, phi, a, b, a, b) for b in b_values]
                     for a in a_values])
    ref = vals.flat[0]
    spread = float(np.max(np.abs(vals - ref)) / abs(ref)) if ref != 0 else float(np.max(np.abs(vals)))
    return {"values": vals, "relative_spread": spread}


# ---------------------------------------------------------------------------
# reproducing kernel and range

def _pair_nodes(psi: Wavelet, phi: Wavelet, a, b, c, d, per_piece: int) -> np.ndarray:
    cuts = set()
    for w, s, sh in ((psi, a, b), (phi, c, d)):
        for u0, u1 in w.pieces():
            cuts.update((sh + s * u0, sh + s * u1))
    lo = max(b + a * psi.support()[0], d + c * phi.support()[0])
    hi = min(b + a * psi.support()[1], d + c * phi.support()[1])
    if hi <= lo:
        return np.empty(0)
    cuts = sorted(x for x in cuts | {lo, hi} if lo <= x <= hi)
    return np.array(cuts)


def reproducing_kernel_pair(m: SaftMatrix, psi: Wavelet, phi: Wavelet, a: float, b: float,
                            c: float, d: float, per_piece: int = 4096) -> complex:
    """<psi^M_{a,b}, phi^M_{c,d}> by composite trapezoid split at every breakpoint."""
    m = validate_matrix(m)
    _check_scales([a, c])
    cuts = _pair_nodes(psi, phi, a, b, c, d, per_piece)
    if cuts.size < 2:
        return 0j
    total = 0j
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        if x1 - x0 <= 0:
            continue
        x = np.linspace(x0, x1, per_piece + 1)
        mid = 0.5 * (x0 + x1)
        k1 = _piece_index(psi, (mid - b) / a)
        k2 = _piece_index(phi, (mid - d) / c)
        v1 = psi.piece_values((x - b) / a, k1)
        v2 = phi.piece_values((x - d) / c, k2)
        # conj(K(t,a)) K(t,c), written so the pair (a,b)<->(c,d) is exactly conjugate
        y = v1 * np.conj(v2) * np.exp(-1j * x * (c - a) / m.B)
        total += np.sum(np.diff(x) * (y[:-1] + y[1:])) / 2
    ph = (-2 * (c - a) * (m.D * m.p - m.B * m.q) + m.D * (c * c - a * a)) / (2 * m.B)
    return complex(total * np.exp(1j * ph) / (2 * math.pi * abs(m.B) * math.sqrt(a * c)))


def _piece_index(psi: Wavelet, u: float) -> int:
    for k, (u0, u1) in enumerate(psi.pieces()):
        if u0 <= u <= u1:
            return k
    return 0


def reproducing_kernel(m: SaftMatrix, psi: Wavelet, a: float, b: float, c: float, d: float) -> complex:
    """K(a, b, c, d) = <psi^M_{a,b}, psi^M_{c,d}>."""
    return reproducing_kernel_pair(m, psi, psi, a, b, c, d)


def _default_times(h: Scalogram, psi: Wavelet) -> RealGrid:
    sg = h.meta.get("signal_grid") if h.meta else None
    if sg and sg.get("type") == "uniform":
        return RealGrid(sg["start"], sg["step"], sg["count"])
    a_max = h.a_grid.stop
    u0, u1 = psi.support()
    lo = h.b_grid.start + min(a_max * u0, 0)
    hi = h.b_grid.stop + max(a_max * u1, 0)
    step = min(h.b_grid.step, h.a_grid.values[0] / 16)
    return RealGrid(lo, step, int(math.ceil((hi - lo) / step)) + 1)


def reproduce(h: Scalogram, psi: Wavelet, m: SaftMatrix, times: Optional[RealGrid] = None) -> Scalogram:
    """The right side of the reproduction identity on h's own grid.

    integral h(a,b) <psi_{a,b}, psi_{c,d}> da db = <g, psi_{c,d}> with
    g = integral h(a,b) psi_{a,b} da db, evaluated by synthesis then analysis.
    """
    times = times if times is not None else _default_times(h, psi)
    g = synthesize(h, psi, m, times)
    return analyze(g, psi, m, h.a_grid, h.b_grid, check=False)


def range_residual(h: Scalogram, psi: Wavelet, m: SaftMatrix, times: Optional[RealGrid] = None) -> float:
    """Relative L2 (da db) residual of the reproduction identity."""
    _require_normalized(psi)
    if not np.any(h.values):
        return 0.0
    r = reproduce(h, psi, m, times)
    w = np.outer(h.a_grid.weights(), h.b_grid.weights())
    return relative_l2(r.values, h.values, w)


# ---------------------------------------------------------------------------
# localization

@dataclass(frozen=True)
class LocalizationReport:
    E_psi: float
    Delta_psi: float
    E_H: float
    Delta_H: float
    Q: float
    time_window: tuple
    freq_window: tuple
    spread: float


def time_moments(psi: Wavelet, per_piece: int = 20001) -> tuple:
    """(E_psi, Delta_psi): center and radius of |psi|^2."""
    xs, ws, ps = [], [], []
    for k, (u0, u1) in enumerate(psi.pieces()):
        u = np.linspace(u0, u1, per_piece)
        p = np.abs(psi.piece_values(u, k)) ** 2
        xs.append(u)
        ws.append(trapezoid_weights(u))
        ps.append(p)
    u, w, p = map(np.concatenate, (xs, ws, ps))
    m0 = float(np.sum(w * p))
    if m0 == 0:
        raise DivergentMoment("wavelet has zero energy")
    center = float(np.sum(w * u * p)) / m0
    var = float(np.sum(w * (u - center) ** 2 * p)) / m0
    return center, math.sqrt(max(var, 0.0))


def _spectral_moments(psi: Wavelet, m: SaftMatrix, a: float, b: float,
                      w_lo: float, w_hi: float, count: int = 4096) -> tuple:
    """Center, radius and mass of |O^M[psi_{a,b}]|^2 in the variable a*(xi - a)/B."""
    u0, u1 = psi.support()
    f_max = max(abs(w_lo), abs(w_hi))
    t_lo, t_hi = b + a * u0, b + a * u1
    xi_lo, xi_hi = sorted((a + m.B * w_lo / a, a + m.B * w_hi / a))
    # the daughter's chirp cancels against the kernel; the guard still sees both
    t_max = max(abs(t_lo), abs(t_hi))
    chirp_bw = (abs(m.A) * t_max + abs(m.p - a)) / abs(m.B)
    sigma = chirp_bw + (f_max + abs(psi.alpha) + 8.0) / a
    dt = 0.5 * guard_limit(m, t_max, max(abs(m.p - xi_lo), abs(m.p - xi_hi)), sigma)
    n = max(4097, int(math.ceil((t_hi - t_lo) / dt)) + 1)
    times = RealGrid.between(t_lo, t_hi, n)
    d = daughter(m, psi, a, b, times)
    xi_grid = RealGrid.between(xi_lo, xi_hi, count)
    H = saft_forward(d, m, xi_grid, CHIRPFFT, check=False).values
    w = a * (xi_grid.values - a) / m.B
    dens = np.abs(H) ** 2
    wt = xi_grid.weights()
    mass = float(np.sum(wt * dens))
    center = float(np.sum(wt * w * dens)) / mass
    second = float(np.sum(wt * (w - center) ** 2 * dens)) / mass
    return center, second, mass


def _mother_band(psi: Wavelet, cap: float = 400.0) -> tuple:
    n = 1 << 16
    u0, u1 = psi.support()
    y = np.linspace(u0, u1, n, endpoint=False)
    dy = y[1] - y[0]
    v = psi(y)
    P = np.abs(np.fft.fft(v, 4 * n)) ** 2
    om = 2 * math.pi * np.fft.fftfreq(4 * n, dy)
    if psi.is_real:
        keep = om >= 0
        P, om = P[keep], om[keep]
    order = np.argsort(om)
    om, P = om[order], P[order]
    cum = np.cumsum(P) / np.sum(P)
    lo = om[min(int(np.searchsorted(cum, 1e-11)), om.size - 1)]
    hi = om[min(int(np.searchsorted(cum, 1 - 1e-11)), om.size - 1)]
    if psi.is_real:
        lo = 0.0
    return max(lo, -cap), min(hi, cap)


def localization(psi: Wavelet, m: SaftMatrix, a: float, b: float, spectral: bool = True) -> LocalizationReport:
    """Time and SAFT-domain windows of the daughter psi^M_{a,b}.

    Time moments follow from |psi|^2 since the kernel has constant modulus.
    The spectral window is measured numerically from O^M[psi^M_{a,b}], in the
    carrier-relative variable a(xi - a)/B, whose moments are the mother's
    spectral center E_H and radius Delta_H. For real wavelets only the
    positive half-line is used. With ``spectral=False`` only the time
    moments are computed.
    """
    m = validate_matrix(m)
    _check_scales([a])
    e_psi, d_psi = time_moments(psi)
    tw = (b + a * e_psi - a * d_psi, b + a * e_psi + a * d_psi)
    if not spectral:
        nan = float("nan")
        return LocalizationReport(e_psi, d_psi, nan, nan, nan, tw, (nan, nan), nan)
    lo, hi = _mother_band(psi)
    span = hi - lo
    if psi.is_real:
        win1, win2 = (0.0, hi + 0.25 * span), (0.0, hi + 1.25 * span)
    else:
        win1 = (lo - 0.25 * span, hi + 0.25 * span)
        win2 = (lo - 1.25 * span, hi + 1.25 * span)
    c1, v1, _ = _spectral_moments(psi, m, a, b, *win1)
    c2, v2, _ = _spectral_moments(psi, m, a, b, *win2, count=8192)
    if abs(v2 - v1) > 1e-3 * max(abs(v1), 1e-300):
        raise DivergentMoment(
            f"spectral second moment changed from {v1:.6g} to {v2:.6g} when the window was widened"
        )
    e_h, d_h = c1, math.sqrt(max(v1, 0.0))
    q = d_h / e_h if e_h != 0 else float("inf")
    f1, f2 = a + m.B * (e_h - d_h) / a, a + m.B * (e_h + d_h) / a
    return LocalizationReport(e_psi, d_psi, e_h, d_h, q, tw, tuple(sorted((f1, f2))), 4 * d_psi * d_h)


# ---------------------------------------------------------------------------
# covariance

@dataclass(frozen=True)
class CovarianceReport:
    linearity: float
    translation: float
    parity: float
    dilation: float
    conjugation: float
    literal: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"linearity": self.linearity, "translation": self.translation, "parity": self.parity,
                "dilation": self.dilation, "conjugation": self.conjugation, "literal": dict(self.literal)}


def _rel(x, y) -> float:
    return relative_l2(np.ravel(x), np.ravel(y))


def shift_signal(f: Signal, alpha: float) -> Signal:
    """f(t - alpha), exact on the shifted grid."""
    return Signal(f.samples, f.t0 + alpha, f.dt)


def reverse_signal(f: Signal) -> Signal:
    """f(-t), exact on the mirrored grid."""
    return Signal(f.samples[::-1], -f.t_end, f.dt)


def dilate_signal(f: Signal, alpha: float) -> Signal:
    """alpha^(-1/2) f(t / alpha), exact on the dilated grid."""
    return Signal(f.samples / math.sqrt(alpha), f.t0 * alpha, f.dt * alpha)


def _cells_general(f, psi, m, sigmas, shifts) -> np.ndarray:
    return np.array([cell_values(f, psi, m, s, s, shifts) for s in sigmas])


def verify_covariances(f: Signal, psi: Wavelet, m: SaftMatrix, alpha: float,
                       a_values=(0.75, 1.0, 1.5), b_values=(-1.0, 0.0, 0.5, 1.0),
                       g: Optional[Signal] = None, beta: float = -1.0, dilation: float = 1.5,
                       check: bool = True) -> CovarianceReport:
    """Residuals of the five covariance identities on a set of cells.

    ``alpha`` is the translation amount and the linearity coefficient;
    ``dilation`` is the factor for the dilation identity. The identities
    tested are

    * translation: W[f(.-alpha)](a,b) = e^{(i/2B)(A alpha^2 + 2 alpha(p-a))} W[e^{iA alpha t/B} f](a, b-alpha)
    * parity: W^M[f(-.)](a,b) = W^{M'}[f](-a,-b), M' = (A,B,C,D,-p,-q), signed scale
    * dilation: W^M[D_c f](a,b) = c^{-1} W^{M'}[f](a/c, b/c), M' = (A, B/c^2, C c^2, D, p/c, c q)
    * conjugation: W^M_psi[conj f] = conj(W^{M''}_{conj psi}[f]), M'' = (A,-B,-C,D,p,-q)

    ``literal`` holds the residuals of the uncorrected factors
    (None where the uncorrected matrix is not unimodular).
    """
    m = validate_matrix(m)
    A, B, C, D, p, q = m.as_tuple()
    a_vals = _check_scales(a_values)
    b_vals = np.asarray(b_values, dtype=float)
    W = lambda sig, mm=m, ps=psi, aa=a_vals, bb=b_vals: analyze_cells(sig, ps, mm, aa, bb, check=check)
    base = W(f)

    if g is None:
        rng = np.random.default_rng(7)
        g = f.with_samples(np.exp(-(f.times - 0.5) ** 2) * (rng.standard_normal() + 1j * rng.standard_normal()))
    lhs = W(f * alpha + g * beta)
    rhs = alpha * base + beta * W(g)
    lin = float(np.linalg.norm(lhs - rhs) / max(np.linalg.norm(alpha * base) + np.linalg.norm(beta * W(g)), 1e-300))

    literal = {}
    # translation
    fm = f.with_samples(f.samples * np.exp(1j * A * alpha * f.times / B))
    lhs = W(shift_signal(f, alpha))
    mod = analyze_cells(fm, psi, m, a_vals, b_vals - alpha, check=check)
    ph = np.exp(1j / (2 * B) * (A * alpha**2 + 2 * alpha * (p - a_vals)))[:, None]
    trans = _rel(lhs, ph * mod) if np.any(lhs) else float(np.linalg.norm(ph * mod))
    ph_pr = np.exp(1j / (2 * B) * (A * alpha**2 - alpha * (p - a_vals)))[:, None]
    literal["translation"] = _rel(lhs, ph_pr * mod) if np.any(lhs) else 0.0

    # parity
    mp = SaftMatrix(A, B, C, D, -p, -q)
    lhs = W(reverse_signal(f))
    rhs = _cells_general(f, psi, mp, -a_vals, -b_vals)
    par = _rel(lhs, rhs)
    literal["parity"] = _rel(lhs, -1j * rhs)

    # dilation
    c = dilation
    md = SaftMatrix(A, B / c**2, C * c**2, D, p / c, c * q)
    lhs = W(dilate_signal(f, c))
    rhs = analyze_cells(f, psi, md, a_vals / c, b_vals / c, check=check) / c
    dil = _rel(lhs, rhs)
    # the uncorrected M' = (aA, aB, aC, aD, p, q) is unimodular only at a = 1, where it equals M
    unit = np.isclose(a_vals, 1.0)
    literal["dilation"] = _rel(lhs[unit], analyze_cells(f, psi, m, a_vals[unit] / c, b_vals / c,
                                                         check=check)) if np.any(unit) else None

    # conjugation
    mc = SaftMatrix(A, -B, -C, D, p, -q)
    lhs = W(f.with_samples(np.conj(f.samples)))
    rhs = np.conj(analyze_cells(f, psi.conjugate(), mc, a_vals, b_vals, check=check))
    conj_res = _rel(lhs, rhs)
    minv = SaftMatrix(D, -B, -C, A, B * q - D * p, C * p - A * q)
    rhs_pr = np.conj(analyze_cells(f, psi.conjugate(), minv, a_vals, b_vals, check=check))
    literal["conjugation"] = _rel(lhs, rhs_pr)

    return CovarianceReport(lin, trans, par, dil, conj_res, literal)
