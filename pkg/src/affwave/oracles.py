"""Reference values: refined quadrature and closed forms for chirp and Gaussian inputs.

Integrands here are written from scratch (scalar kernel, own wavelet
formulas) so they do not share code with the transform modules they check.
"""

from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .core import SaftMatrix
from .errors import NoConvergence, SingularDenominator

REFINED_QUADRATURE = "RefinedQuadrature"
CLOSED_FORM = "ClosedForm"
MEASURED = "Measured"

FIXTURES_ENV = "SAWT_FIXTURES"
_DEFAULT_FIXTURES = Path(__file__).with_name("data") / "fixtures.json"


@dataclass(frozen=True)
class OracleResult:
    value: complex
    estimated_error: float
    method: str


def quadrature_oracle(integrand: Callable[[np.ndarray], np.ndarray], support: Sequence[float],
                      tol: float = 1e-9, breakpoints: Iterable[float] = (),
                      max_levels: int = 24, min_levels: int = 4) -> OracleResult:
    """Integrate ``integrand`` over ``support`` by step halving.

    Each sub-interval between breakpoints is refined separately; its end
    nodes are nudged inward so jumps are sampled from the correct side.
    Successive trapezoid values are Richardson-extrapolated (Romberg) and
    refinement stops once two successive estimates differ by < tol.
    """
    lo, hi = float(support[0]), float(support[1])
    if tol < 1e-12:
        raise ValueError("tol must be >= 1e-12")
    cuts = sorted({lo, hi, *[float(x) for x in breakpoints if lo < x < hi]})
    total = 0j
    err = 0.0
    n_pieces = len(cuts) - 1
    for x0, x1 in zip(cuts[:-1], cuts[1:]):
        v, e = _romberg(integrand, x0, x1, tol / max(n_pieces, 1), max_levels, min_levels)
        total += v
        err += e
    return OracleResult(complex(total), float(err), REFINED_QUADRATURE)


def _romberg(fn, x0, x1, tol, max_levels, min_levels):
    if x1 == x0:
        return 0j, 0.0
    h = x1 - x0
    nudge = 1e-13 * max(1.0, abs(x0), abs(x1))
    ends = np.array([x0 + nudge, x1 - nudge])
    fe = np.asarray(fn(ends), dtype=complex)
    n = 8
    nodes = x0 + h * np.arange(1, n) / n
    s = 0.5 * (fe[0] + fe[1]) + np.sum(np.asarray(fn(nodes), dtype=complex))
    rows = [[s * h / n]]
    prev = None
    for level in range(1, max_levels + 1):
        mids = x0 + h * (np.arange(n) + 0.5) / n
        s = s + np.sum(np.asarray(fn(mids), dtype=complex))
        n *= 2
        row = [s * h / n]
        for k, r in enumerate(rows[-1]):
            row.append(row[-1] + (row[-1] - r) / (4 ** (k + 1) - 1))
        rows.append(row[:6])
        best = rows[-1][-1]
        if prev is not None and level >= min_levels:
            e = abs(best - prev)
            if e < tol and abs(rows[-1][0] - rows[-2][0]) < max(1.0, abs(best)) * 1e-2:
                return best, e
        prev = best
    raise NoConvergence(f"quadrature did not converge on [{x0}, {x1}] after {max_levels} levels")


# ---------------------------------------------------------------------------
# reference integrands

def ref_kernel(m: SaftMatrix, t, w):
    A, B, C, D, p, q = m.as_tuple()
    t = np.asarray(t, dtype=float)
    expo = A * t**2 + 2 * t * (p - w) - 2 * w * (D * p - B * q) + D * (w**2 + p**2)
    return np.exp(1j * expo / (2 * B)) / cmath.sqrt(2j * cmath.pi * B)


def ref_haar(u):
    u = np.asarray(u, dtype=float)
    return np.where((u >= 0) & (u < 0.5), 1.0, np.where((u >= 0.5) & (u <= 1.0), -1.0, 0.0))


def ref_morlet(alpha: float):
    return lambda u: np.exp(1j * alpha * np.asarray(u) - np.asarray(u) ** 2 / 2)


def ref_mother(name: str, alpha: float = 0.0) -> tuple:
    """(callable, breakpoints in mother coordinates, support)."""
    if name == "haar":
        return ref_haar, (0.0, 0.5, 1.0), (0.0, 1.0)
    if name == "morlet":
        return ref_morlet(alpha), (), (-12.0, 12.0)
    if name == "gauss":
        return (lambda u: np.exp(-np.asarray(u) ** 2 / 2)), (), (-12.0, 12.0)
    raise ValueError(name)


def sawt_cell(f: Callable, mother: str, m: SaftMatrix, a: float, b: float,
              alpha: float = 0.0, tol: float = 1e-9, window=None) -> OracleResult:
    """W(a, b) = integral f(t) conj(psi((t - b)/a)) a^(-1/2) K(t, a) dt."""
    psi, bps, sup = ref_mother(mother, alpha)
    lo, hi = b + a * sup[0], b + a * sup[1]
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    g = lambda t: f(t) * np.conj(psi((t - b) / a)) * ref_kernel(m, t, a) / math.sqrt(a)
    return quadrature_oracle(g, (lo, hi), tol, [b + a * x for x in bps])


def lattice_cell(f: Callable, mother: str, m: SaftMatrix, scale: float, shift: float,
                 freq: float, tol: float = 1e-9) -> OracleResult:
    """integral f(t) |s|^(-1/2) conj(psi((t - shift)/scale)) K(t, freq) dt."""
    psi, bps, sup = ref_mother(mother)
    g = lambda t: f(t) * np.conj(psi((t - shift) / scale)) * ref_kernel(m, t, freq) / math.sqrt(scale)
    return quadrature_oracle(g, (shift + scale * sup[0], shift + scale * sup[1]), tol,
                             [shift + scale * x for x in bps])


def saft_value(f: Callable, m: SaftMatrix, w: float, support, tol: float = 1e-9) -> OracleResult:
    return quadrature_oracle(lambda t: f(t) * ref_kernel(m, t, w), support, tol)


def wigner_value(f: Callable, m: SaftMatrix, t: float, a: float, support, tol: float = 1e-9) -> OracleResult:
    g = lambda tau: f(t + tau / 2) * np.conj(f(t - tau / 2)) * ref_kernel(m, tau, a)
    return quadrature_oracle(g, support, tol)


# ---------------------------------------------------------------------------
# closed forms

def _theta(m: SaftMatrix, w: float) -> float:
    A, B, C, D, p, q = m.as_tuple()
    return (-2 * w * (D * p - B * q) + D * (w * w + p * p)) / (2 * B)


def morlet_constant_closed_form(K: float, alpha: float, m: SaftMatrix, a: float, b: float,
                                variant: str = "literal") -> complex:
    """Transform of the constant K against Morlet exp(i alpha t - t^2/2).

    ``literal`` evaluates the uncorrected expression as written. ``derived``
    redoes the Gaussian integral in the library convention.
    """
    A, B, C, D, p, q = m.as_tuple()
    if a <= 0:
        raise SingularDenominator("a must be positive")
    den = B - 1j * a * a * A
    if abs(den) < 1e-300 or abs(1j * B + a * a * A) < 1e-300:
        raise SingularDenominator("B - i a^2 A vanishes")
    if K == 0:
        return 0j
    th = _theta(m, a)
    if variant == "literal":
        lead = K * math.sqrt(a) / cmath.sqrt(1j * B + a * a * A)
        e1 = 1j * th + 1j * b * alpha / a - b * b / (2 * a * a)
        e2 = ((p - a) * a * a - 1j * alpha * a * B + b * B) ** 2 / (2 * a * a * B * den)
        return complex(lead * cmath.exp(e1 + e2))
    if variant == "derived":
        quad = den / (2 * a * a * B)
        lin = 1j * (p - a) / B - 1j * alpha / a + b / (a * a)
        const = 1j * alpha * b / a - b * b / (2 * a * a)
        val = K / math.sqrt(a) / cmath.sqrt(2j * math.pi * B) * cmath.exp(1j * th + const)
        return complex(val * cmath.sqrt(math.pi / quad) * cmath.exp(lin * lin / (4 * quad)))
    raise ValueError(f"unknown variant {variant!r}")


def haar_chirp_closed_form(m: SaftMatrix, a: float, b: float, variant: str = "literal") -> complex:
    """Transform of exp(-iAt^2/2B) against the Haar wavelet."""
    A, B, C, D, p, q = m.as_tuple()
    if abs(a - p) < 1e-6:
        raise SingularDenominator(f"closed form is singular at a = p = {p}")
    x = a * (p - a) / B
    bracket = 2 * cmath.exp(0.5j * x) - 1 - cmath.exp(1j * x)
    phase = cmath.exp(1j * _theta(m, a)) * cmath.exp(1j * b * (p - a) / B)
    if variant == "literal":
        return complex(cmath.sqrt(1j * B) / cmath.sqrt(2 * math.pi * a * (a - p)) * phase * bracket)
    if variant == "derived":
        lead = B / (1j * (p - a)) / math.sqrt(a) / cmath.sqrt(2j * math.pi * B)
        return complex(lead * phase * bracket)
    raise ValueError(f"unknown variant {variant!r}")


def haar_chirp_discrete_closed_form(m: SaftMatrix, j: int, k: int, variant: str = "literal",
                                    lattice: str = "inverse") -> complex:
    """Discrete transform of exp(-iAt^2/2B) against the dyadic Haar system (b0 = 1).

    ``literal`` is the uncorrected expression (kernel frequency k 2^j). ``derived``
    is the exact value for the library lattice: scale 2^j, shift k 2^j and
    kernel frequency k 2^-j (``inverse``) or k 2^j (``direct``).
    """
    A, B, C, D, p, q = m.as_tuple()
    s = 2.0**j
    if variant == "literal":
        nu = k * s
        if abs(p - nu) < 1e-12:
            raise SingularDenominator("p = k 2^j")
        d = p - nu
        lead = B * 2.0 ** (-j / 2) / (1j * d)
        ph = cmath.exp(1j / (2 * B) * (-(2.0 ** (j + 1)) * k * (D * p - B * q) + D * (k * k * s * s + p * p)))
        ph *= cmath.exp(1j / B * d * s * k)
        bracket = 2 * cmath.exp(1j / (2 * B) * d - 1) - cmath.exp(1j / B * d * s)
        return complex(lead * ph * bracket)
    if variant == "derived":
        nu = k / s if lattice == "inverse" else k * s
        d = p - nu
        if abs(d) < 1e-12:
            raise SingularDenominator("p equals the kernel frequency")
        x = s * d / B
        bracket = 2 * cmath.exp(0.5j * x) - 1 - cmath.exp(1j * x)
        lead = B / (1j * d) / math.sqrt(s) / cmath.sqrt(2j * math.pi * B)
        return complex(lead * cmath.exp(1j * _theta(m, nu)) * cmath.exp(1j * k * s * d / B) * bracket)
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# fixtures

def fixtures_path() -> Path:
    env = os.environ.get(FIXTURES_ENV)
    return Path(env) if env else _DEFAULT_FIXTURES


def load_fixtures(path=None) -> dict:
    p = Path(path) if path else fixtures_path()
    with open(p) as fh:
        items = json.load(fh)
    return {item["name"]: item for item in items}


def fixture_value(name: str, fixtures: dict | None = None) -> complex:
    fx = fixtures if fixtures is not None else load_fixtures()
    item = fx[name]
    return complex(item["re"], item["im"])


def write_fixtures(items: list, path=None) -> Path:
    p = Path(path) if path else fixtures_path()
    p.parent.mkdir(parents=True, exist_ok=True)
    with open(p, "w") as fh:
        json.dump(items, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return p


M1 = (1.0, 2.0, 1.0, 3.0, 1.0, 1.0)
FOURIER_T = (0.0, 1.0, -1.0, 0.0, 0.0, 0.0)


def _entry(name, inputs, res: OracleResult, tol, **extra) -> dict:
    d = {"name": name, "inputs": inputs, "re": res.value.real, "im": res.value.imag,
         "tol": tol, "method": res.method, "estimated_error": res.estimated_error}
    d.update(extra)
    return d


def _closed(value_fn, *args, **kw):
    try:
        return value_fn(*args, **kw)
    except SingularDenominator:
        return None


def _cf_fields(prefix: str, cf, ref: complex) -> dict:
    if cf is None:
        return {f"{prefix}": None}
    out = {f"{prefix}_re": cf.real, f"{prefix}_im": cf.imag}
    if ref != 0:
        r = cf / ref
        out[f"{prefix}_ratio"] = [r.real, r.imag]
    return out


def build_oracle_fixtures(tol: float = 1e-9) -> list:
    """Every reference value the test-suite pins, recomputed from scratch."""
    items = []
    one = lambda t: np.ones_like(np.asarray(t, dtype=float), dtype=complex)
    gauss = lambda t: np.exp(-np.asarray(t) ** 2 / 2).astype(complex)

    items.append(_entry("quad_unit", {"support": [0, 1]},
                        quadrature_oracle(one, (0, 1), tol), 1e-15))
    items.append(_entry("quad_gauss_mod", {"support": [-10, 10]},
                        quadrature_oracle(lambda t: gauss(t) * np.exp(-1j * t), (-10, 10), tol), 1e-9))
    items.append(_entry("quad_haar_sign", {"support": [0, 1]},
                        quadrature_oracle(lambda t: np.sign(0.5 - t), (0, 1), tol, [0.5]), 1e-15))
    items.append(_entry("haar_second_moment", {},
                        quadrature_oracle(lambda t: (t - 0.5) ** 2 + 0j, (0, 1), tol), 1e-12))

    m_f, m_1 = SaftMatrix(*FOURIER_T), SaftMatrix(*M1)
    for label, m in (("fourier", m_f), ("m1", m_1)):
        for w in (-1.0, 0.0, 0.5, 2.0):
            items.append(_entry(f"saft_gauss_{label}_w{w:g}", {"matrix": list(m.as_tuple()), "omega": w,
                                "signal": "exp(-t^2/2) on [-8,8]"},
                                saft_value(gauss, m, w, (-8, 8), tol), 1e-6))

    # constant against Morlet(5)
    cells = [("fourier", m_f, 1.0, 0.0), ("m1", m_1, 1.0, 0.0), ("m1", m_1, 1.5, 0.5),
             ("m1", m_1, 1.0, 3.0), ("m1", m_1, 2.0, -1.0)]
    for label, m, a, b in cells:
        res = sawt_cell(one, "morlet", m, a, b, alpha=5.0, tol=tol)
        extra = _cf_fields("literal", _closed(morlet_constant_closed_form, 1.0, 5.0, m, a, b, "literal"), res.value)
        extra.update(_cf_fields("derived", _closed(morlet_constant_closed_form, 1.0, 5.0, m, a, b, "derived"), res.value))
        items.append(_entry(f"morlet_const_{label}_a{a:g}_b{b:g}",
                            {"matrix": list(m.as_tuple()), "K": 1.0, "alpha": 5.0, "a": a, "b": b}, res, 1e-4, **extra))

    # chirp against Haar
    chirp = lambda t: np.exp(-1j * m_1.A * np.asarray(t) ** 2 / (2 * m_1.B))
    for a, b in ((1.0, 0.0), (2.0, 0.0), (0.5, 1.0), (3.0, -1.0)):
        res = sawt_cell(chirp, "haar", m_1, a, b, tol=tol)
        extra = _cf_fields("literal", _closed(haar_chirp_closed_form, m_1, a, b, "literal"), res.value)
        extra.update(_cf_fields("derived", _closed(haar_chirp_closed_form, m_1, a, b, "derived"), res.value))
        items.append(_entry(f"haar_chirp_m1_a{a:g}_b{b:g}", {"matrix": list(m_1.as_tuple()), "a": a, "b": b},
                            res, 1e-6, **extra))

    # dyadic Haar lattice, a0 = 2, b0 = 1, kernel frequency k 2^-j
    for j, k in ((0, 0), (0, 1), (0, 2), (0, -1), (1, 1), (-1, 1)):
        s = 2.0**j
        res = lattice_cell(chirp, "haar", m_1, s, k * s, k / s, tol=tol)
        extra = _cf_fields("literal", _closed(haar_chirp_discrete_closed_form, m_1, j, k, "literal"), res.value)
        extra.update(_cf_fields("derived", _closed(haar_chirp_discrete_closed_form, m_1, j, k, "derived"), res.value))
        items.append(_entry(f"haar_dyadic_m1_j{j}_k{k}", {"matrix": list(m_1.as_tuple()), "j": j, "k": k,
                            "a0": 2.0, "b0": 1.0, "lattice": "inverse"}, res, 1e-6, **extra))

    items.append(_entry("wigner_gauss_fourier_t0_a0", {"matrix": list(FOURIER_T), "t": 0.0, "a": 0.0},
                        wigner_value(gauss, m_f, 0.0, 0.0, (-24, 24), tol), 1e-6))
    items.append(_entry("wigner_gauss_m1_t0.5_a1", {"matrix": list(M1), "t": 0.5, "a": 1.0},
                        wigner_value(gauss, m_1, 0.5, 1.0, (-24, 24), tol), 1e-6))

    # spectral moments of Morlet(6): |psi^|^2 = 2 pi exp(-(w - 6)^2)
    spec = lambda w: 2 * math.pi * np.exp(-(np.asarray(w) - 6.0) ** 2) + 0j
    m0 = quadrature_oracle(spec, (-10, 22), tol)
    m1 = quadrature_oracle(lambda w: w * spec(w), (-10, 22), tol)
    m2 = quadrature_oracle(lambda w: (w - 6.0) ** 2 * spec(w), (-10, 22), tol)
    center = m1.value.real / m0.value.real
    radius = math.sqrt(m2.value.real / m0.value.real)
    items.append({"name": "morlet6_Q", "inputs": {"alpha": 6.0}, "re": radius / center, "im": 0.0,
                  "tol": 1e-6, "method": REFINED_QUADRATURE, "estimated_error": m0.estimated_error})
    return items
