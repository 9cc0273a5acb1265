import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from affwave import desk
from affwave.core import FOURIER, RealGrid, Signal, gaussian_signal
from affwave.errors import NyquistViolation
from affwave.oracles import fixture_value, wigner_value
from affwave.wigner import mirror_signal, wigner

GRID = RealGrid.between(-8, 8, 4097)
ONE = RealGrid(0.0, 1.0, 1)


def test_gaussian_at_origin():
    v = wigner(gaussian_signal(GRID), FOURIER, ONE, ONE).values[0, 0]
    assert abs(v - math.sqrt(2) * cmath.exp(-1j * math.pi / 4)) <= 1e-6
    assert abs(v - fixture_value("wigner_gauss_fourier_t0_a0")) <= 1e-6


def test_general_matrix_fixture():
    v = wigner(gaussian_signal(GRID), desk.M1, RealGrid(0.5, 1.0, 1), RealGrid(1.0, 1.0, 1)).values[0, 0]
    assert abs(v - fixture_value("wigner_gauss_m1_t0.5_a1")) <= 1e-6


@settings(max_examples=6)
@given(st.floats(-1.5, 1.5), st.floats(-2, 2))
def test_against_quadrature_oracle(t, a):
    f = gaussian_signal(GRID, 0.2, 0.8, 1.0)
    fn = lambda x: np.exp(-((x - 0.2) ** 2) / (2 * 0.64) + 1j * x)
    ref = wigner_value(fn, desk.M1, t, a, (-8, 8)).value
    v = wigner(f, desk.M1, RealGrid(t, 1.0, 1), RealGrid(a, 1.0, 1)).values[0, 0]
    assert abs(v - ref) <= 1e-8


def test_mirror_reflects_time():
    f = gaussian_signal(GRID, 0.7, 0.9, 1.5)
    tg, ag = RealGrid.between(-1, 1, 5), RealGrid.between(-1, 1, 3)
    left = wigner(mirror_signal(f), desk.M1, RealGrid.between(-1, 1, 5), ag).values[::-1]
    assert_allclose(left, wigner(f, desk.M1, tg, ag).values, atol=1e-12)


def test_fourier_marginal_in_time():
    # integral over the frequency slot recovers |f(t)|^2 up to the kernel constant
    f = gaussian_signal(GRID, 0.0, 1.0, 2.0)
    ag = RealGrid.between(-40, 40, 4001)
    W = wigner(f, FOURIER, RealGrid(0.3, 1.0, 1), ag).values[0]
    total = np.sum(ag.weights() * W) / cmath.sqrt(2j * math.pi) ** -1
    assert_allclose(total, 2 * math.pi * math.exp(-0.09), rtol=1e-9)


def test_zero_signal_gives_zeros():
    z = Signal(np.zeros(9), 0.0, 0.1)
    assert not np.any(wigner(z, FOURIER, ONE, ONE).values)


def test_guard():
    coarse = gaussian_signal(RealGrid.between(-8, 8, 65))
    with pytest.raises(NyquistViolation, match="wigner"):
        wigner(coarse, FOURIER, ONE, RealGrid(30.0, 1.0, 1))
