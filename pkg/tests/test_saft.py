import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from affwave import desk
from affwave.core import FOURIER, RealGrid, SaftMatrix, gaussian_signal, relative_l2
from affwave.errors import NyquistViolation
from affwave.oracles import fixture_value
from affwave.saft import kernel, omega_step, saft_forward, saft_inverse, suggest_omega_grid

GRID = RealGrid.between(-8, 8, 1024)


def test_fourier_kernel_is_plain_exponential():
    t, w = np.array([0.3, -1.2]), np.array([0.7, 2.0])
    ref = np.exp(-1j * t * w) / cmath.sqrt(2j * math.pi)
    assert_allclose(kernel(FOURIER, t, w), ref, rtol=1e-14)


def test_gaussian_fourier_transform_is_gaussian():
    f = gaussian_signal(GRID)
    og = RealGrid.between(-4, 4, 33)
    F = saft_forward(f, FOURIER, og)
    ref = math.sqrt(2 * math.pi) * np.exp(-og.values**2 / 2) / cmath.sqrt(2j * math.pi)
    assert_allclose(F.values, ref, atol=1e-12)


@pytest.mark.parametrize("label", ["fourier", "m1"])
@pytest.mark.parametrize("w", [-1, 0, 0.5, 2])
def test_forward_matches_quadrature_fixture(label, w):
    f = gaussian_signal(RealGrid.between(-8, 8, 4097))
    v = saft_forward(f, desk.MATRICES[label], RealGrid(float(w), 1.0, 1)).values[0]
    assert abs(v - fixture_value(f"saft_gauss_{label}_w{w:g}")) <= 1e-6


@pytest.mark.parametrize("m", list(desk.MATRICES.values()))
def test_roundtrip(m):
    f = gaussian_signal(GRID, 0.5, 0.9, 1.0)
    F = saft_forward(f, m, suggest_omega_grid(f, m), "chirpfft")
    assert relative_l2(saft_inverse(F, m, GRID).samples, f.samples) < 1e-10


@given(st.floats(-2, 2), st.floats(0.4, 1.5), st.floats(-3, 3), st.integers(0, 10**6))
def test_chirpfft_equals_quadrature(center, width, omega0, seed):
    m = desk.M1 if seed % 2 else FOURIER
    f = gaussian_signal(GRID, center, width, omega0)
    og = RealGrid.between(-10, 10, 128)
    fast = saft_forward(f, m, og, "chirpfft").values
    slow = saft_forward(f, m, og, "quadrature").values
    assert relative_l2(fast, slow) < 1e-10


@given(st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_forward_is_linear(c1, c2):
    f = gaussian_signal(GRID)
    g = gaussian_signal(GRID, 1.0, 0.7, 2.0)
    og = RealGrid.between(-5, 5, 64)
    lhs = saft_forward(f * c1 + g * c2, desk.M1, og, "chirpfft").values
    rhs = c1 * saft_forward(f, desk.M1, og, "chirpfft").values + c2 * saft_forward(g, desk.M1, og, "chirpfft").values
    assert np.linalg.norm(lhs - rhs) <= 1e-12 * (1 + np.linalg.norm(rhs))


def test_parseval_on_fine_grid():
    f = gaussian_signal(GRID, 0.0, 1.0, 2.0)
    og = suggest_omega_grid(f, desk.M1)
    F = saft_forward(f, desk.M1, og, "chirpfft")
    assert_allclose(np.sum(og.weights() * np.abs(F.values) ** 2), f.norm() ** 2, rtol=1e-9)


def test_guard_rejects_coarse_sampling():
    coarse = gaussian_signal(RealGrid.between(-8, 8, 64))
    with pytest.raises(NyquistViolation):
        saft_forward(coarse, FOURIER, RealGrid.between(-50, 50, 11))


def test_omega_step_shrinks_with_bandwidth():
    m = SaftMatrix(1.0, 2.0, 1.0, 3.0, 1.0, 1.0)
    assert omega_step(m, 100.0, -8, 8) < omega_step(m, 10.0, -8, 8)
