"""Discrete transform on the lattice a = a0^j, frame operator and reconstruction.

Atoms: psi_{j,k}(t) = a0^(-j/2) psi(a0^(-j) t - k b0) conj(K_M(t, nu_{j,k})), i.e. scale
a0^j, shift k b0 a0^j and kernel frequency nu = k b0 a0^(-j) (``inverse``, default)
or k b0 a0^j (``direct``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .core import RealGrid, SaftMatrix, Signal, Wavelet, _frozen_array, validate_matrix
from .errors import ConfigError, GridMismatch, IllConditionedFrame, IndexOutOfRange, NotConverged
from .saft import kernel
from .sawt import _Guard, cell_values

LATTICES = ("inverse", "direct")


@dataclass(frozen=True)
class FrameSpec:
    """Lattice parameters; j_range and k_range are inclusive (lo, hi) pairs.

    A range with hi < lo is empty. E and F hold frame-bound estimates once
    computed by :func:`estimate_frame_bounds`.
    """

    a0: float
    b0: float
    j_range: tuple
    k_range: tuple
    E: float = 0.0
    F: float = 0.0
    lattice: str = "inverse"

    def __post_init__(self):
        if not self.a0 > 1:
            raise ConfigError(f"a0 must exceed 1, got {self.a0}")
        if not self.b0 > 0:
            raise ConfigError(f"b0 must be positive, got {self.b0}")
        if self.lattice not in LATTICES:
            raise ConfigError(f"lattice must be one of {LATTICES}")
        object.__setattr__(self, "j_range", (int(self.j_range[0]), int(self.j_range[1])))
        object.__setattr__(self, "k_range", (int(self.k_range[0]), int(self.k_range[1])))
        if self.E < 0 or self.F < self.E:
            raise ConfigError("frame bounds must satisfy 0 <= E <= F")

    @property
    def js(self) -> np.ndarray:
        return np.arange(self.j_range[0], self.j_range[1] + 1)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_range[0], self.k_range[1] + 1)

    @property
    def shape(self) -> tuple:
        return (self.js.size, self.ks.size)

    def atom(self, j: int, k: int) -> tuple:
        """(scale, shift, kernel frequency) of psi_{j,k}."""
        s = self.a0 ** j
        nu = k * self.b0 / s if self.lattice == "inverse" else k * self.b0 * s
        return s, k * self.b0 * s, nu

    def atoms(self):
        for j in self.js:
            for k in self.ks:
                yield int(j), int(k)

    def with_bounds(self, E: float, F: float) -> "FrameSpec":
        return replace(self, E=float(E), F=float(F))


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    values: np.ndarray
    spec: FrameSpec

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.shape != self.spec.shape:
            raise GridMismatch(f"coefficients {v.shape} do not match lattice {self.spec.shape}")
        object.__setattr__(self, "values", v)

    def energy(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def _check_index(spec: FrameSpec, j: int, k: int) -> None:
    if not (spec.j_range[0] <= j <= spec.j_range[1] and spec.k_range[0] <= k <= spec.k_range[1]):
        raise IndexOutOfRange(f"(j, k) = ({j}, {k}) outside the lattice {spec.j_range} x {spec.k_range}")


def _atom_values(m, psi, spec, j, k, t) -> np.ndarray:
    s, shift, nu = spec.atom(j, k)
    return psi((t - shift) / s) * np.conj(kernel(m, t, nu)) / math.sqrt(s)


def discrete_family(m: SaftMatrix, psi: Wavelet, spec: FrameSpec, j: int, k: int,
                    times: RealGrid) -> Signal:
    """psi^M_{j,k} sampled on ``times``."""
    m = validate_matrix(m)
    _check_index(spec, j, k)
    return Signal(_atom_values(m, psi, spec, j, k, times.values), times.start, times.step)


def dsawt_analyze(f: Signal, psi: Wavelet, m: SaftMatrix, spec: FrameSpec,
                  check: bool = True) -> CoefficientTable:
    """values[j, k] = <f, psi_{j,k}> by trapezoid with breakpoint splitting."""
    m = validate_matrix(m)
    guard = _Guard(f, m) if check else None
    out = np.zeros(spec.shape, dtype=complex)
    for ji, j in enumerate(spec.js):
        for ki, k in enumerate(spec.ks):
            s, shift, nu = spec.atom(int(j), int(k))
            if guard is not None:
                guard.check(nu, nu, f"lattice cell (j, k) = ({j}, {k})")
            out[ji, ki] = cell_values(f, psi, m, s, nu, [shift])[0]
    return CoefficientTable(out, spec)


# ---------------------------------------------------------------------------
# frame operator on a sampled grid

def synthesis_matrix(psi: Wavelet, m: SaftMatrix, spec: FrameSpec, times: RealGrid) -> np.ndarray:
    """Columns are the sampled atoms, ordered as ``spec.atoms()``."""
    m = validate_matrix(m)
    t = times.values
    cols = [_atom_values(m, psi, spec, j, k, t) for j, k in spec.atoms()]
    if not cols:
        return np.zeros((t.size, 0), dtype=complex)
    return np.stack(cols, axis=1)


class FrameOperator:
    """S f = sum_{j,k} <f, psi_{j,k}> psi_{j,k} on one sampled grid.

    The inner product is the trapezoid rule of the grid, so S is exactly
    self-adjoint and positive in that inner product.
    """

    def __init__(self, psi: Wavelet, m: SaftMatrix, spec: FrameSpec, times: RealGrid):
        self.times = times
        self.spec = spec
        self.w = times.weights()
        self.phi = synthesis_matrix(psi, m, spec, times)

    def analysis(self, x: np.ndarray) -> np.ndarray:
        return self.phi.conj().T @ (self.w * x)

    def synthesis(self, c: np.ndarray) -> np.ndarray:
        return self.phi @ c

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.synthesis(self.analysis(x))

    def inner(self, x, y) -> complex:
        return complex(np.sum(self.w * x * np.conj(y)))


def frame_apply(f: Signal, psi: Wavelet, m: SaftMatrix, spec: FrameSpec, check: bool = True) -> Signal:
    """S(f) on f's own grid."""
    m = validate_matrix(m)
    if check:
        guard = _Guard(f, m)
        for j, k in spec.atoms():
            nu = spec.atom(j, k)[2]
            guard.check(nu, nu, f"lattice cell (j, k) = ({j}, {k})")
    op = FrameOperator(psi, m, spec, f.grid)
    return f.with_samples(op(f.samples))


def conjugate_residual(apply, b: np.ndarray, inner, tol: float = 1e-8, max_iter: Optional[int] = None):
    """Solve A x = b for self-adjoint positive A.

    Conjugate-residual variant of conjugate gradients: it minimizes the
    residual norm over the Krylov space, so residual norms never increase.
    Returns (x, list of relative residual norms).
    """
    norm = lambda v: math.sqrt(max(inner(v, v).real, 0.0))
    bn = norm(b)
    x = np.zeros_like(b)
    if bn == 0:
        return x, [0.0]
    max_iter = max_iter or 10 * b.size
    r = b.copy()
    ar = apply(r)
    p, ap = r.copy(), ar.copy()
    rar = inner(r, ar)
    hist = [1.0]
    for _ in range(max_iter):
        apap = inner(ap, ap).real
        if apap == 0:
            break
        alpha = rar / apap
        x = x + alpha * p
        r = r - alpha * ap
        hist.append(norm(r) / bn)
        if hist[-1] <= tol:
            return x, hist
        ar = apply(r)
        rar_new = inner(r, ar)
        beta = rar_new / rar
        rar = rar_new
        p = r + beta * p
        ap = ar + beta * ap
    if hist[-1] <= tol:
        return x, hist
    raise NotConverged(f"conjugate residual stopped at relative residual {hist[-1]:.3e} (tol {tol:g})")


@dataclass(frozen=True)
class FrameBounds:
    """Frame-bound estimates on a finite trial space (not certified global bounds)."""

    E: float
    F: float
    rank: int
    dimension: int
    iterations: tuple
    note: str = "estimates on the span of the lattice sampled on the trial grid"

    def __iter__(self):
        return iter((self.E, self.F))


def _span_basis(op: FrameOperator, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (in C^n, after the sqrt-weight map) of the atoms' span."""
    y = np.sqrt(op.w)[:, None] * op.phi
    if y.shape[1] == 0:
        return np.zeros((y.shape[0], 0), dtype=complex)
    q, r, _ = scipy.linalg.qr(y, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    rank = int(np.sum(d > rtol * d[0])) if d.size and d[0] > 0 else 0
    return q[:, :rank]


def estimate_frame_bounds(psi: Wavelet, m: SaftMatrix, spec: FrameSpec, trial_space: RealGrid,
                          tol: float = 1e-8, max_iter: int = 500, seed: int = 0) -> FrameBounds:
    """Extreme Rayleigh quotients <Sf, f>/||f||^2 over the lattice span on ``trial_space``.

    F by block power iteration, E by block inverse iteration with Cholesky
    solves of the projected operator; both extract the extreme value by
    Rayleigh-Ritz on the block. They run inside the span, where S is
    invertible.
    """
    m = validate_matrix(m)
    if trial_space.count < 8:
        raise ConfigError("trial space dimension must be at least 8")
    op = FrameOperator(psi, m, spec, trial_space)
    q = _span_basis(op)
    rank = q.shape[1]
    if rank == 0:
        return FrameBounds(0.0, 0.0, 0, trial_space.count, (0, 0))
    sw = np.sqrt(op.w)
    y = sw[:, None] * op.phi

    g = y.conj().T @ q
    s_mat = g.conj().T @ g  # S in orthonormal coordinates of the span
    s_mat = 0.5 * (s_mat + s_mat.conj().T)
    try:
        chol = scipy.linalg.cho_factor(s_mat)
    except np.linalg.LinAlgError:
        raise IllConditionedFrame("frame operator is numerically singular on the lattice span; "
                                  "atoms are negligible on the trial grid") from None
    rng = np.random.default_rng(seed)
    block = min(rank, 6)
    v0 = rng.standard_normal((rank, block)) + 1j * rng.standard_normal((rank, block))
    s_inv = lambda v: scipy.linalg.cho_solve(chol, v)

    apply_block = lambda v: s_mat @ v
    F_est, it_f = _subspace_extreme(apply_block, apply_block, v0, tol, max_iter, "power", largest=True)
    E_est, it_e = _subspace_extreme(s_inv, apply_block, v0, tol, max_iter, "inverse", largest=False)
    E_est = min(E_est, F_est)
    return FrameBounds(E_est, F_est, rank, trial_space.count, (it_f, it_e))


def _subspace_extreme(step, apply, v0, tol, max_iter, label, largest):
    """Block iteration with Rayleigh-Ritz; returns the extreme Ritz value and the iteration count."""
    q, _ = np.linalg.qr(v0)
    prev = None
    for it in range(1, max_iter + 1):
        q, _ = np.linalg.qr(step(q))
        t = q.conj().T @ apply(q)
        ritz = np.linalg.eigvalsh(0.5 * (t + t.conj().T))
        val = float(ritz[-1] if largest else ritz[0])
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val, it
        prev = val
    raise NotConverged(f"{label} iteration did not converge in {max_iter} iterations")


def coefficient_synthesis(c: CoefficientTable, psi: Wavelet, m: SaftMatrix, times: RealGrid) -> Signal:
    """sum_{j,k} c_{j,k} psi_{j,k} on ``times``."""
    phi = synthesis_matrix(psi, m, c.spec, times)
    return Signal(phi @ c.values.ravel(), times.start, times.step)


def frame_reconstruct(c: CoefficientTable, psi: Wavelet, m: SaftMatrix, spec: FrameSpec,
                      times: RealGrid, tol: float = 1e-8, return_history: bool = False):
    """f = S^{-1}(sum c_{j,k} psi_{j,k}) by conjugate-residual iterations on ``times``."""
    m = validate_matrix(m)
    if not spec.E > 1e-10:
        raise IllConditionedFrame(
            f"lower frame bound E = {spec.E:.3e} is not positive; estimate it on the reconstruction grid first"
        )
    op = FrameOperator(psi, m, spec, times)
    y = op.synthesis(c.values.ravel())
    x, hist = conjugate_residual(op, y, op.inner, tol=tol)
    out = Signal(x, times.start, times.step)
    return (out, hist) if return_history else out
