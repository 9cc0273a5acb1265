"""Special affine Wigner distribution.

WD(t, a) = integral f(t + tau/2) conj(f(t - tau/2)) K_M(tau, a) d tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RealGrid, SaftMatrix, Signal, _frozen_array, validate_matrix
from .errors import GridMismatch, NyquistViolation
from .saft import energy_bandwidth, guard_limit, kernel, support_extent
from .sawt import _map

CUBIC = "cubic"


@dataclass(frozen=True, eq=False)
class WignerMatrix:
    """values[i, j] = WD(t_i, a_j)."""

    values: np.ndarray
    t_grid: RealGrid
    a_grid: RealGrid
    matrix: SaftMatrix

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.shape != (self.t_grid.count, self.a_grid.count):
            raise GridMismatch(f"values {v.shape} do not match grids "
                               f"({self.t_grid.count}, {self.a_grid.count})")
        object.__setattr__(self, "values", v)


def _tau_nodes(lo: float, hi: float, t: float, h: float) -> np.ndarray:
    """Nodes k*h covering the lag interval where both shifted copies can be nonzero."""
    tau_lo = max(2 * (lo - t), 2 * (t - hi))
    tau_hi = min(2 * (hi - t), 2 * (t - lo))
    if tau_hi < tau_lo:
        return np.zeros(0)
    k0 = int(math.floor(tau_lo / h)) - 1
    k1 = int(math.ceil(tau_hi / h)) + 1
    return h * np.arange(k0, k1 + 1, dtype=float)


def wigner_cell_row(f: Signal, m: SaftMatrix, t: float, a_values: np.ndarray,
                    support: tuple) -> np.ndarray:
    """WD(t, a) for one t across all a, trapezoid in tau with step 2 dt.

    Off-grid half shifts t +- tau/2 are read from a cubic spline of f.
    """
    h = 2 * f.dt
    tau = _tau_nodes(support[0], support[1], t, h)
    if tau.size < 2:
        return np.zeros(a_values.size, dtype=complex)
    r = f.interp(t + tau / 2, CUBIC) * np.conj(f.interp(t - tau / 2, CUBIC))
    w = np.full(tau.size, h)
    w[0] = w[-1] = h / 2
    k = kernel(m, tau[None, :], a_values[:, None])
    return k @ (w * r)


def check_wigner_guard(f: Signal, m: SaftMatrix, t_grid: RealGrid, a_grid: RealGrid,
                       support: tuple) -> None:
    """The tau step 2 dt must resolve the kernel chirp plus the autocorrelation band."""
    lo, hi = support
    t = t_grid.values
    tau_max = float(np.max(np.minimum(2 * (hi - t), 2 * (t - lo)), initial=0.0))
    tau_max = max(tau_max, 0.0)
    a = a_grid.values
    offset = float(np.max(np.abs(m.p - a)))
    sigma = energy_bandwidth(f.samples, f.dt)
    limit = guard_limit(m, tau_max, offset, sigma)
    h = 2 * f.dt
    if h > limit * (1 + 1e-12):
        raise NyquistViolation(f"sampling guard failed in wigner: tau step {h:.6g} exceeds {limit:.6g}")


def wigner(f: Signal, m: SaftMatrix, t_grid: RealGrid, a_grid: RealGrid,
           check: bool = True, workers: int = 1) -> WignerMatrix:
    """Direct evaluation of WD on the t x a grid."""
    m = validate_matrix(m)
    a_vals = np.asarray(a_grid.values, dtype=float)
    if not np.any(f.samples):
        return WignerMatrix(np.zeros((t_grid.count, a_grid.count), dtype=complex), t_grid, a_grid, m)
    support = support_extent(f.samples, f.t0, f.dt)
    if check:
        check_wigner_guard(f, m, t_grid, a_grid, support)
    rows = _map(lambda t: wigner_cell_row(f, m, float(t), a_vals, support), t_grid.values, workers)
    return WignerMatrix(np.array(rows).reshape(t_grid.count, a_grid.count), t_grid, a_grid, m)


def mirror_signal(f: Signal) -> Signal:
    """conj(f(-t)) on the mirrored grid."""
    return Signal(np.conj(f.samples[::-1]), -f.t_end, f.dt)
