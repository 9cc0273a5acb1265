"""Parameter matrix, sampled signals, grids and mother wavelets."""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.interpolate

from .errors import (
    ComplexEntriesUnsupported,
    ConfigError,
    DegenerateB,
    GridMismatch,
    NotUnimodular,
)

UNIMODULAR_TOL = 1e-12


def _real_param(name: str, value) -> float:
    if isinstance(value, complex) or np.iscomplexobj(value):
        if complex(value).imag != 0.0:
            raise ComplexEntriesUnsupported(
                f"matrix entry {name} is complex ({value}); only real parameters are supported"
            )
        value = complex(value).real
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"matrix entry {name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class SaftMatrix:
    """Real parameters (A, B, C, D, p, q) with AD - BC = 1 and B != 0."""

    A: float
    B: float
    C: float
    D: float
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        for name in ("A", "B", "C", "D", "p", "q"):
            object.__setattr__(self, name, _real_param(name, getattr(self, name)))
        if self.B == 0.0:
            raise DegenerateB("B must be nonzero (B = 0 is a pure chirp multiplication)")
        det = self.A * self.D - self.B * self.C
        if abs(det - 1.0) > UNIMODULAR_TOL:
            raise NotUnimodular(f"AD - BC = {det!r}, expected 1 within {UNIMODULAR_TOL}")

    def as_tuple(self) -> tuple:
        return (self.A, self.B, self.C, self.D, self.p, self.q)

    def replace(self, **changes) -> "SaftMatrix":
        return replace(self, **changes)

    @property
    def sqrt_2piB(self) -> complex:
        """Principal square root of 2*pi*i*B."""
        return cmath.sqrt(2j * math.pi * self.B)

    def __str__(self) -> str:
        return ",".join(repr(v) for v in self.as_tuple())


FOURIER = SaftMatrix(0.0, 1.0, -1.0, 0.0, 0.0, 0.0)


def validate_matrix(m: SaftMatrix) -> SaftMatrix:
    """Re-check the matrix invariants and return ``m`` unchanged."""
    if not isinstance(m, SaftMatrix):
        m = SaftMatrix(*m)
    SaftMatrix(*m.as_tuple())
    return m


def _snap(x: float) -> float:
    # trig values that are zero or one up to rounding become exact
    for target in (0.0, 1.0, -1.0):
        if abs(x - target) < 1e-15:
            return target
    return x


def make_special_matrix(kind: str, **params) -> SaftMatrix:
    """Build one of the named special-case matrices.

    Kinds: ``linear_canonical`` (A, B, C, D), ``fractional`` (theta),
    ``offset_fractional`` (theta, p, q), ``fresnel`` (B, p, q), ``fourier``.
    ``gauss_weierstrass`` and ``bilateral_laplace`` need complex B and are rejected.
    """
    kind = kind.lower().replace("-", "_")
    if kind == "fourier":
        return FOURIER
    if kind == "linear_canonical":
        return SaftMatrix(params["A"], params["B"], params["C"], params["D"], 0.0, 0.0)
    if kind in ("fractional", "offset_fractional"):
        theta = float(params["theta"])
        c, s = _snap(math.cos(theta)), _snap(math.sin(theta))
        if s == 0.0:
            raise DegenerateB(f"B must be nonzero: sin(theta) = 0 for theta = {theta}")
        if kind == "fractional":
            return SaftMatrix(c, s, -s, c, 0.0, 0.0)
        return SaftMatrix(c, s, -s, c, params.get("p", 0.0), params.get("q", 0.0))
    if kind == "fresnel":
        return SaftMatrix(1.0, params["B"], 0.0, 1.0, params.get("p", 0.0), params.get("q", 0.0))
    if kind in ("gauss_weierstrass", "bilateral_laplace"):
        raise ComplexEntriesUnsupported(
            f"{kind} uses an imaginary B entry; complex matrices are not supported"
        )
    raise ConfigError(f"unknown matrix kind {kind!r}")


def trapezoid_weights(x: np.ndarray) -> np.ndarray:
    """Composite trapezoid weights for (possibly nonuniform) nodes ``x``."""
    x = np.asarray(x, dtype=float)
    w = np.zeros_like(x)
    if x.size < 2:
        return w
    d = np.diff(x)
    w[:-1] += d / 2
    w[1:] += d / 2
    return w


@dataclass(frozen=True)
class RealGrid:
    """Uniform grid start + step * arange(count)."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "step", float(self.step))
        if int(self.count) != self.count:
            raise ConfigError(f"grid count must be an integer, got {self.count}")
        object.__setattr__(self, "count", int(self.count))
        if not (self.step > 0 and math.isfinite(self.step)):
            raise ConfigError(f"grid step must be positive, got {self.step}")
        if self.count < 1:
            raise ConfigError(f"grid count must be >= 1, got {self.count}")
        if not math.isfinite(self.start):
            raise ConfigError("grid start must be finite")

    @classmethod
    def between(cls, lo: float, hi: float, count: int) -> "RealGrid":
        if count < 2:
            return cls(lo, 1.0, 1)
        return cls(lo, (hi - lo) / (count - 1), count)

    @property
    def values(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def weights(self) -> np.ndarray:
        if self.count == 1:
            return np.ones(1)
        w = np.full(self.count, self.step)
        w[0] = w[-1] = self.step / 2
        return w

    def describe(self) -> dict:
        return {"type": "uniform", "start": self.start, "step": self.step, "count": self.count}


@dataclass(frozen=True)
class GeoGrid:
    """Geometric grid start * ratio**arange(count), used for scales."""

    start: float
    ratio: float
    count: int

    def __post_init__(self):
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "count", int(self.count))
        if not self.start > 0:
            raise ConfigError("geometric grid start must be positive")
        if not self.ratio > 1:
            raise ConfigError("geometric grid ratio must exceed 1")
        if self.count < 1:
            raise ConfigError("grid count must be >= 1")

    @classmethod
    def between(cls, lo: float, hi: float, count: int) -> "GeoGrid":
        if count < 2:
            return cls(lo, 2.0, 1)
        return cls(lo, (hi / lo) ** (1.0 / (count - 1)), count)

    @property
    def values(self) -> np.ndarray:
        return self.start * self.ratio ** np.arange(self.count)

    @property
    def stop(self) -> float:
        return float(self.values[-1])

    def weights(self) -> np.ndarray:
        if self.count == 1:
            return np.ones(1)
        return trapezoid_weights(self.values)

    def describe(self) -> dict:
        return {"type": "geometric", "start": self.start, "ratio": self.ratio, "count": self.count}


Grid = Union[RealGrid, GeoGrid]


def as_grid(obj) -> Grid:
    """Accept a grid or an explicit uniform sequence of values."""
    if isinstance(obj, (RealGrid, GeoGrid)):
        return obj
    v = np.atleast_1d(np.asarray(obj, dtype=float))
    if v.size == 1:
        return RealGrid(v[0], 1.0, 1)
    d = np.diff(v)
    if np.allclose(d, d[0], rtol=1e-9, atol=0):
        return RealGrid(v[0], d[0], v.size)
    if np.all(v > 0):
        r = v[1:] / v[:-1]
        if np.allclose(r, r[0], rtol=1e-9, atol=0):
            return GeoGrid(v[0], r[0], v.size)
    raise GridMismatch("values are neither uniform nor geometric")


def _frozen_array(x, dtype=complex) -> np.ndarray:
    arr = np.array(x, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Uniformly sampled complex signal f(t0 + n dt)."""

    samples: np.ndarray
    t0: float
    dt: float

    def __post_init__(self):
        s = _frozen_array(np.atleast_1d(self.samples))
        if s.ndim != 1 or s.size == 0:
            raise ConfigError("signal samples must be a non-empty 1-D array")
        if not np.all(np.isfinite(s)):
            raise ConfigError("signal samples must be finite")
        dt = float(self.dt)
        if not (dt > 0 and math.isfinite(dt)):
            raise ConfigError(f"signal dt must be positive, got {self.dt}")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", dt)

    @functools.cached_property
    def _spline(self):
        return scipy.interpolate.CubicSpline(self.times, self.samples)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], grid: RealGrid) -> "Signal":
        return cls(np.asarray(fn(grid.values), dtype=complex), grid.start, grid.step)

    @property
    def count(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> RealGrid:
        return RealGrid(self.t0, self.dt, self.count)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.count)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.count - 1)

    def weights(self) -> np.ndarray:
        return self.grid.weights()

    def inner(self, other: "Signal") -> complex:
        """Trapezoid <self, other> = integral of self * conj(other)."""
        _same_grid(self, other)
        return complex(np.sum(self.weights() * self.samples * np.conj(other.samples)))

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self).real, 0.0))

    def interp(self, t, kind: str = "linear") -> np.ndarray:
        """Interpolate between samples, zero outside the sampled interval.

        ``kind`` is ``linear`` or ``cubic`` (not-a-knot spline).
        """
        t = np.asarray(t, dtype=float)
        x = self.times
        if kind == "cubic" and self.count >= 4:
            inside = (t >= x[0]) & (t <= x[-1])
            out = np.zeros(t.shape, dtype=complex)
            out[inside] = self._spline(t[inside])
            return out
        if kind not in ("linear", "cubic"):
            raise ValueError(f"unknown interpolation kind {kind!r}")
        re = np.interp(t, x, self.samples.real, left=0.0, right=0.0)
        im = np.interp(t, x, self.samples.imag, left=0.0, right=0.0)
        return re + 1j * im

    def with_samples(self, samples) -> "Signal":
        return Signal(samples, self.t0, self.dt)

    def __add__(self, other: "Signal") -> "Signal":
        _same_grid(self, other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other: "Signal") -> "Signal":
        _same_grid(self, other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, c) -> "Signal":
        return self.with_samples(self.samples * c)

    __rmul__ = __mul__

    def __len__(self) -> int:
        return self.count


def _same_grid(f: Signal, g: Signal) -> None:
    if f.count != g.count or not (
        math.isclose(f.t0, g.t0, rel_tol=1e-12, abs_tol=1e-12)
        and math.isclose(f.dt, g.dt, rel_tol=1e-12)
    ):
        raise GridMismatch("signals live on different grids")


def relative_l2(x, y, weights=None) -> float:
    """||x - y|| / ||y|| with optional quadrature weights."""
    x = np.asarray(x)
    y = np.asarray(y)
    w = 1.0 if weights is None else np.asarray(weights)
    den = math.sqrt(float(np.sum(w * np.abs(y) ** 2)))
    num = math.sqrt(float(np.sum(w * np.abs(x - y) ** 2)))
    if den == 0.0:
        return num
    return num / den


@dataclass(frozen=True, eq=False)
class Scalogram:
    """Coefficients W(a_i, b_j); rows follow the a grid, columns the b grid."""

    values: np.ndarray
    a_grid: Grid
    b_grid: RealGrid
    matrix: SaftMatrix
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.shape != (self.a_grid.count, self.b_grid.count):
            raise GridMismatch(
                f"values shape {v.shape} does not match grids "
                f"({self.a_grid.count}, {self.b_grid.count})"
            )
        object.__setattr__(self, "values", v)

    def energy(self) -> float:
        """Double trapezoid of |W|^2 in the plain da db measure."""
        wa = self.a_grid.weights()
        wb = self.b_grid.weights()
        return float(np.einsum("i,ij,j->", wa, np.abs(self.values) ** 2, wb))


# ---------------------------------------------------------------------------
# mother wavelets

_SMOOTH_HALF_WIDTH = 10.0


@dataclass(frozen=True, eq=False)
class Wavelet:
    """Mother wavelet psi.

    ``kind`` is one of ``haar``, ``morlet`` (exp(i alpha t - t^2/2)),
    ``mexican_hat`` ((1 - t^2) exp(-t^2/2)) or ``sampled``. ``gain`` is a
    constant multiplier, used for normalization.
    """

    kind: str
    alpha: float = 0.0
    gain: complex = 1.0
    signal: Optional[Signal] = None

    def __post_init__(self):
        kind = self.kind.lower().replace("-", "_")
        if kind == "mexicanhat":
            kind = "mexican_hat"
        if kind not in ("haar", "morlet", "mexican_hat", "sampled"):
            raise ConfigError(f"unknown wavelet kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "gain", complex(self.gain))
        object.__setattr__(self, "alpha", float(self.alpha))
        if not math.isfinite(self.alpha):
            raise ConfigError("Morlet alpha must be finite")
        if kind == "sampled" and not isinstance(self.signal, Signal):
            raise ConfigError("sampled wavelet needs a Signal payload")

    @classmethod
    def haar(cls) -> "Wavelet":
        return cls("haar")

    @classmethod
    def morlet(cls, alpha: float = 6.0) -> "Wavelet":
        return cls("morlet", alpha=alpha)

    @classmethod
    def mexican_hat(cls) -> "Wavelet":
        return cls("mexican_hat")

    @classmethod
    def sampled(cls, signal: Signal) -> "Wavelet":
        return cls("sampled", signal=signal)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "haar":
            v = np.where((t >= 0) & (t < 0.5), 1.0, 0.0) - np.where((t >= 0.5) & (t <= 1.0), 1.0, 0.0)
            return self.gain * v.astype(complex)
        if self.kind == "morlet":
            return self.gain * np.exp(1j * self.alpha * t - t * t / 2)
        if self.kind == "mexican_hat":
            return self.gain * ((1 - t * t) * np.exp(-t * t / 2)).astype(complex)
        return self.gain * self.signal.interp(t)

    @property
    def is_smooth(self) -> bool:
        return self.kind in ("morlet", "mexican_hat")

    @property
    def is_real(self) -> bool:
        if self.gain.imag != 0.0:
            return False
        if self.kind == "morlet":
            return self.alpha == 0.0
        if self.kind == "sampled":
            return bool(np.all(self.signal.samples.imag == 0))
        return True

    def support(self) -> tuple:
        """Interval outside which psi vanishes (or is below 1e-19 for smooth kinds)."""
        if self.kind == "haar":
            return (0.0, 1.0)
        if self.kind == "sampled":
            return (self.signal.t0, self.signal.t_end)
        return (-_SMOOTH_HALF_WIDTH, _SMOOTH_HALF_WIDTH)

    def pieces(self) -> list:
        """Intervals on which psi is smooth, in mother coordinates."""
        if self.kind == "haar":
            return [(0.0, 0.5), (0.5, 1.0)]
        return [self.support()]

    def piece_values(self, u, index: int) -> np.ndarray:
        """psi on piece ``index`` using one-sided limits at the piece ends."""
        u = np.asarray(u, dtype=float)
        if self.kind == "haar":
            return np.full(u.shape, self.gain * (1.0 if index == 0 else -1.0), dtype=complex)
        return self(u)

    def norm(self) -> float:
        g = abs(self.gain)
        if self.kind == "haar":
            return g
        if self.kind == "morlet":
            return g * math.pi ** 0.25
        if self.kind == "mexican_hat":
            return g * math.sqrt(0.75 * math.sqrt(math.pi))
        # exact L2 norm of the piecewise-linear interpolant
        s = self.signal.samples
        a, b = s[:-1], s[1:]
        e = np.sum(np.abs(a) ** 2 + (a * np.conj(b)).real + np.abs(b) ** 2) * self.signal.dt / 3
        return g * math.sqrt(float(e))

    def normalized(self) -> "Wavelet":
        n = self.norm()
        if n == 0.0:
            raise ConfigError("cannot normalize a zero wavelet")
        return replace(self, gain=self.gain / n)

    def scaled(self, c: complex) -> "Wavelet":
        return replace(self, gain=self.gain * c)

    def conjugate(self) -> "Wavelet":
        g = self.gain.conjugate()
        if self.kind == "morlet":
            return replace(self, alpha=-self.alpha, gain=g)
        if self.kind == "sampled":
            s = self.signal
            return replace(self, gain=g, signal=s.with_samples(np.conj(s.samples)))
        return replace(self, gain=g)

    def describe(self) -> dict:
        d = {"kind": self.kind, "gain": [self.gain.real, self.gain.imag]}
        if self.kind == "morlet":
            d["alpha"] = self.alpha
        if self.kind == "sampled":
            d["t0"] = self.signal.t0
            d["dt"] = self.signal.dt
            d["count"] = self.signal.count
        return d


def gaussian_signal(grid: RealGrid, center: float = 0.0, width: float = 1.0,
                    omega0: float = 0.0) -> Signal:
    """exp(-(t - center)^2 / (2 width^2)) * exp(i omega0 t) sampled on ``grid``."""
    t = grid.values
    return Signal(np.exp(-((t - center) ** 2) / (2 * width**2) + 1j * omega0 * t), grid.start, grid.step)


def symmetric_grid(half_width: float, count: int) -> RealGrid:
    return RealGrid.between(-half_width, half_width, count)


def parse_matrix(values: Sequence[float]) -> SaftMatrix:
    if len(values) != 6:
        raise ConfigError(f"matrix needs six entries A,B,C,D,p,q, got {len(values)}")
    return SaftMatrix(*values)
