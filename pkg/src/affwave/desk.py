"""Reference configurations shared by the verify suites, the measured fixtures and the tests."""

from __future__ import annotations

import math

import numpy as np

from .core import FOURIER, GeoGrid, RealGrid, SaftMatrix, Signal, Wavelet, gaussian_signal, relative_l2
from .dsawt import FrameSpec

M1 = SaftMatrix(1.0, 2.0, 1.0, 3.0, 1.0, 1.0)
MATRICES = {"fourier": FOURIER, "m1": M1}


def signal_grid(count: int = 1024) -> RealGrid:
    return RealGrid.between(-8.0, 8.0, count)


def a_grid() -> GeoGrid:
    return GeoGrid.between(0.25, 4.0, 64)


def b_grid() -> RealGrid:
    return RealGrid.between(-8.0, 8.0, 256)


def wavelet() -> Wavelet:
    return Wavelet.morlet(6.0).normalized()


def energy_signals(grid: RealGrid | None = None) -> dict:
    """Four Gaussian-class signals with different centers, widths and carriers."""
    g = grid or signal_grid()
    return {
        "gauss": gaussian_signal(g),
        "mod": gaussian_signal(g, 0.0, 1.0, 5.0),
        "narrow": gaussian_signal(g, 0.5, 0.5),
        "wide_mod": gaussian_signal(g, -1.0, 1.5, -3.0),
    }


def frame_spec() -> FrameSpec:
    return FrameSpec(2.0, 0.5, (-3, 3), (-32, 32))


def frame_trial_grid() -> RealGrid:
    return RealGrid.between(-4.0, 4.0, 16)


def packet_signals(grid: RealGrid | None = None) -> list:
    """Three pairs for the wave-packet energy identity."""
    g = grid or signal_grid()
    h1 = gaussian_signal(g, 0.0, 0.9, 0.5)
    h2 = gaussian_signal(g, 0.4, 1.0, 0.0)
    h3 = gaussian_signal(g, -0.3, 0.8, 1.0)
    return [(h1, h1), (h1, h2), (h2, h3)]


def random_signal(grid: RealGrid, seed: int) -> Signal:
    rng = np.random.default_rng(seed)
    return Signal(rng.standard_normal(grid.count) + 1j * rng.standard_normal(grid.count), grid.start, grid.step)


def smooth_random_signal(grid: RealGrid, seed: int, terms: int = 4) -> Signal:
    """Sum of random Gaussian pulses, well inside the grid and resolved by it."""
    rng = np.random.default_rng(seed)
    t = grid.values
    span = grid.stop - grid.start
    out = np.zeros(t.size, dtype=complex)
    for _ in range(terms):
        c = grid.start + span * (0.35 + 0.3 * rng.random())
        w = 0.4 + 0.6 * rng.random()
        om = rng.uniform(-3, 3)
        amp = rng.standard_normal() + 1j * rng.standard_normal()
        out += amp * np.exp(-((t - c) ** 2) / (2 * w * w) + 1j * om * t)
    return Signal(out, grid.start, grid.step)


def spread(values) -> float:
    """max |v - mean| / |mean| of a set of ratios."""
    v = np.asarray(values, dtype=complex)
    mean = v.mean()
    return float(np.max(np.abs(v - mean)) / abs(mean)) if mean != 0 else math.inf


def roundtrip_error(f: Signal, r: Signal, c: complex) -> float:
    if c == 0:
        return math.inf
    return relative_l2((r * (1 / c)).samples, f.samples, f.weights())
