"""Special affine Fourier transform: kernel, quadrature and chirp-FFT paths.

Kernel convention::

    K_M(t, w) = (2 pi i B)^(-1/2) exp{(i/2B)[A t^2 + 2t(p - w) - 2w(Dp - Bq) + D(w^2 + p^2)]}

with the principal square root. The inverse uses conj(K_M), which makes the
pair exactly unitary on L^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RealGrid, SaftMatrix, Signal, _frozen_array, validate_matrix
from .errors import GridMismatch, NyquistViolation

QUADRATURE = "quadrature"
CHIRPFFT = "chirpfft"
_BLOCK = 256


@dataclass(frozen=True, eq=False)
class Spectrum:
    values: np.ndarray
    omega_grid: RealGrid
    matrix: SaftMatrix

    def __post_init__(self):
        v = _frozen_array(np.atleast_1d(self.values))
        if v.shape != (self.omega_grid.count,):
            raise GridMismatch("spectrum length does not match its omega grid")
        object.__setattr__(self, "values", v)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_grid.values

    def as_signal(self) -> Signal:
        """View the spectrum as a sampled function of omega."""
        return Signal(self.values, self.omega_grid.start, self.omega_grid.step)


def prefactor(m: SaftMatrix) -> complex:
    """(2 pi i B)^(-1/2), principal branch."""
    return 1.0 / m.sqrt_2piB


def pre_chirp(m: SaftMatrix, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.exp(1j * (m.A * t * t + 2 * t * m.p) / (2 * m.B))


def post_phase(m: SaftMatrix, w) -> np.ndarray:
    """The omega-only part of the kernel exponent, -2w(Dp-Bq) + D(w^2+p^2) over 2B."""
    return (-2 * w * (m.D * m.p - m.B * m.q) + m.D * (w * w + m.p * m.p)) / (2 * m.B)


def post_chirp(m: SaftMatrix, w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return np.exp(1j * post_phase(m, w))


def kernel(m: SaftMatrix, t, omega) -> np.ndarray:
    """K_M(t, omega), broadcasting over ``t`` and ``omega``."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(omega, dtype=float)
    ph = (m.A * t * t + 2 * t * (m.p - w) - 2 * w * (m.D * m.p - m.B * m.q)
          + m.D * (w * w + m.p * m.p)) / (2 * m.B)
    out = prefactor(m) * np.exp(1j * ph)
    if out.ndim == 0:
        return complex(out)
    return out


# ---------------------------------------------------------------------------
# sampling guard

def energy_bandwidth(samples: np.ndarray, dt: float, fraction: float = 0.999) -> float:
    """Smallest angular frequency holding ``fraction`` of the FFT energy."""
    x = np.asarray(samples, dtype=complex)
    total = float(np.sum(np.abs(x) ** 2))
    if total == 0.0 or x.size < 2:
        return 0.0
    n = 1 << int(math.ceil(math.log2(2 * x.size)))
    X = np.abs(np.fft.fft(x, n)) ** 2
    om = np.abs(2 * math.pi * np.fft.fftfreq(n, dt))
    order = np.argsort(om, kind="stable")
    cum = np.cumsum(X[order])
    idx = int(np.searchsorted(cum, fraction * cum[-1]))
    return float(om[order][min(idx, n - 1)])


def support_extent(samples: np.ndarray, t0: float, dt: float, rel: float = 1e-14) -> tuple:
    """Interval covering the samples above ``rel`` times the peak modulus."""
    mag = np.abs(samples)
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0.0:
        return (t0, t0)
    idx = np.nonzero(mag > rel * peak)[0]
    return (t0 + dt * idx[0], t0 + dt * idx[-1])


def guard_limit(m: SaftMatrix, t_max: float, offset_max: float, sigma: float) -> float:
    """Largest admissible spacing pi|B| / (|A| T + |p - w| + |B| sigma)."""
    den = abs(m.A) * t_max + offset_max + abs(m.B) * sigma
    if den == 0.0:
        return math.inf
    return math.pi * abs(m.B) / den


def check_guard(f: Signal, m: SaftMatrix, w_lo: float, w_hi: float, where: str = "") -> None:
    """Raise NyquistViolation unless f's spacing resolves the kernel chirp."""
    lo, hi = support_extent(f.samples, f.t0, f.dt)
    t_max = max(abs(lo), abs(hi))
    offset = max(abs(m.p - w_lo), abs(m.p - w_hi))
    sigma = energy_bandwidth(f.samples, f.dt)
    limit = guard_limit(m, t_max, offset, sigma)
    if f.dt > limit * (1 + 1e-12):
        loc = f" at {where}" if where else ""
        raise NyquistViolation(
            f"sampling guard failed{loc}: dt = {f.dt:.6g} exceeds pi|B|/(|A|T+|p-w|+|B|sigma) = {limit:.6g}"
        )


def check_inverse_guard(F: Spectrum, m: SaftMatrix, t_lo: float, t_hi: float) -> None:
    """Guard for the conjugate-kernel omega integral (t and omega roles swapped)."""
    lo, hi = support_extent(F.values, F.omega_grid.start, F.omega_grid.step)
    w_max = max(abs(lo), abs(hi))
    c = m.D * m.p - m.B * m.q
    offset = max(abs(t_lo + c), abs(t_hi + c))
    sigma = energy_bandwidth(F.values, F.omega_grid.step)
    den = abs(m.D) * w_max + offset + abs(m.B) * sigma
    limit = math.inf if den == 0 else math.pi * abs(m.B) / den
    if F.omega_grid.step > limit * (1 + 1e-12):
        raise NyquistViolation(
            f"sampling guard failed for the inverse: d omega = {F.omega_grid.step:.6g} exceeds {limit:.6g}"
        )


# ---------------------------------------------------------------------------
# chirp sums

def _lattice_sum(y: np.ndarray, gamma: float, count: int) -> np.ndarray:
    """sum_n y_n exp(i gamma n m) for m = 0..count-1."""
    n_in = y.size
    if count == 0 or n_in == 0:
        return np.zeros(count, dtype=complex)
    if gamma == 0.0:
        return np.full(count, np.sum(y), dtype=complex)
    period = 2 * math.pi / abs(gamma)
    L = int(round(period))
    if L >= 1 and abs(period - L) <= 1e-12 * period:
        # exact bin layout: fold onto one period and use a plain FFT
        folded = np.zeros(L, dtype=complex)
        np.add.at(folded, np.arange(n_in) % L, y)
        spec = L * np.fft.ifft(folded) if gamma > 0 else np.fft.fft(folded)
        return spec[np.arange(count) % L]
    # general spacing: Bluestein, nm = (n^2 + m^2 - (m - n)^2) / 2
    n = np.arange(n_in, dtype=float)
    mm = np.arange(count, dtype=float)
    a = y * np.exp(0.5j * gamma * n * n)
    k = np.arange(-(n_in - 1), count, dtype=float)
    c = np.exp(-0.5j * gamma * k * k)
    size = 1 << int(math.ceil(math.log2(n_in + c.size - 1)))
    conv = np.fft.ifft(np.fft.fft(a, size) * np.fft.fft(c, size))
    return np.exp(0.5j * gamma * mm * mm) * conv[n_in - 1:n_in - 1 + count]


def chirp_sum(x: np.ndarray, x0: float, dx: float, out: RealGrid, sign: int, B: float) -> np.ndarray:
    """sum_n x_n exp(sign * i * (x0 + n dx) * y_m / B) over the uniform grid ``out``."""
    y0, dy = out.start, out.step
    n = np.arange(x.size)
    y = x * np.exp(sign * 1j * n * dx * y0 / B)
    s = _lattice_sum(y, sign * dx * dy / B, out.count)
    return np.exp(sign * 1j * x0 * out.values / B) * s


def _require_uniform(grid) -> RealGrid:
    if not isinstance(grid, RealGrid):
        raise GridMismatch("the chirp-FFT path needs a uniform omega grid")
    return grid


# ---------------------------------------------------------------------------
# transforms

def saft_forward(f: Signal, m: SaftMatrix, omegas: RealGrid, method: str = QUADRATURE,
                 check: bool = True) -> Spectrum:
    """O^M[f](w) = integral f(t) K_M(t, w) dt by trapezoid on f's grid."""
    m = validate_matrix(m)
    method = method.lower()
    w = omegas.values
    if check:
        check_guard(f, m, float(w.min()), float(w.max()), where="saft_forward")
    x = f.weights() * f.samples
    if method == QUADRATURE:
        t = f.times
        vals = np.empty(w.size, dtype=complex)
        for s in range(0, w.size, _BLOCK):
            vals[s:s + _BLOCK] = kernel(m, t[None, :], w[s:s + _BLOCK, None]) @ x
    elif method == CHIRPFFT:
        omegas = _require_uniform(omegas)
        s = chirp_sum(x * pre_chirp(m, f.times), f.t0, f.dt, omegas, -1, m.B)
        vals = prefactor(m) * post_chirp(m, w) * s
    else:
        raise ValueError(f"unknown method {method!r}")
    return Spectrum(vals, omegas, m)


def saft_inverse(F: Spectrum, m: SaftMatrix, times: RealGrid, method: str = CHIRPFFT,
                 check: bool = True) -> Signal:
    """f(t) = integral F(w) conj(K_M(t, w)) dw by trapezoid on F's grid."""
    m = validate_matrix(m)
    method = method.lower()
    t = times.values
    if check:
        check_inverse_guard(F, m, float(t.min()), float(t.max()))
    x = F.omega_grid.weights() * F.values
    if method == QUADRATURE:
        w = F.omegas
        vals = np.empty(t.size, dtype=complex)
        for s in range(0, t.size, _BLOCK):
            vals[s:s + _BLOCK] = np.conj(kernel(m, t[s:s + _BLOCK, None], w[None, :])) @ x
    elif method == CHIRPFFT:
        times = _require_uniform(times)
        g = F.omega_grid
        s = chirp_sum(x * np.conj(post_chirp(m, g.values)), g.start, g.step, times, +1, m.B)
        vals = np.conj(prefactor(m)) * np.conj(pre_chirp(m, t)) * s
    else:
        raise ValueError(f"unknown method {method!r}")
    return Signal(vals, times.start, times.step)


def suggest_omega_grid(f: Signal, m: SaftMatrix, count: int | None = None,
                       tail: float = 1e-13) -> RealGrid:
    """Uniform omega grid covering where |O^M f| is non-negligible.

    O^M f(w) is (2 pi i B)^(-1/2) e^{i theta(w)} h^(w/B) with
    h = f exp{i(At^2 + 2tp)/2B}; the range comes from h's spectrum and the
    spacing from the inverse guard.
    """
    m = validate_matrix(m)
    h = f.samples * pre_chirp(m, f.times)
    n = 1 << int(math.ceil(math.log2(4 * f.count)))
    H = np.abs(np.fft.fft(h, n))
    nu = 2 * math.pi * np.fft.fftfreq(n, f.dt)
    keep = H > tail * H.max() if H.max() > 0 else np.ones(n, bool)
    lo, hi = float(nu[keep].min()), float(nu[keep].max())
    pad = 0.05 * (hi - lo) + 1.0
    w1, w2 = sorted((m.B * (lo - pad), m.B * (hi + pad)))
    lo_t, hi_t = support_extent(f.samples, f.t0, f.dt)
    dw = omega_step(m, max(abs(w1), abs(w2)), lo_t, hi_t)
    need = int(math.ceil((w2 - w1) / dw)) + 1
    if count is None:
        count = need
    return RealGrid.between(w1, w2, max(count, 2))


def omega_step(m: SaftMatrix, w_max: float, t_lo: float, t_hi: float) -> float:
    """Spacing for an omega grid reaching |w_max| that the inverse guard accepts with margin."""
    c = m.D * m.p - m.B * m.q
    # spectrum chirp D w^2/2B counted once in the offset and once in sigma
    den = 2 * abs(m.D) * w_max + max(abs(t_lo + c), abs(t_hi + c)) + abs(m.B) * 8.0
    return 0.5 * math.pi * abs(m.B) / den
