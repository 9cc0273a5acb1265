import numpy as np
import pytest
from numpy.testing import assert_allclose

from affwave import desk
from affwave.core import FOURIER, SaftMatrix, GeoGrid, RealGrid, Wavelet, gaussian_signal, relative_l2
from affwave.sawt import analyze
from affwave.wavepacket import (packet_constant, phase_shift_factor, time_shift_factor, windowed_saft,
                                wp_analyze, wp_family, wp_moyal, wp_verify_properties)

GRID = desk.signal_grid()
F = gaussian_signal(GRID, 0.3, 1.0, 1.5)
G = gaussian_signal(GRID, -0.5, 0.8, -1.0)
PSI = Wavelet.morlet(0.0)
AG, BG, NG = GeoGrid(0.5, 2.0, 3), RealGrid.between(-3, 3, 13), RealGrid.between(-2, 2, 9)


def test_packet_constant_is_i_for_positive_b():
    assert_allclose(packet_constant(FOURIER), 1j)
    assert_allclose(abs(packet_constant(SaftMatrix(1.0, -2.0, 1.0, -1.0))), 1.0)


@pytest.mark.parametrize("m", list(desk.MATRICES.values()))
def test_cube_equals_family_inner_products(m):
    cube = wp_analyze(F, PSI, m, AG, BG, NG)
    ref = np.array([[[F.inner(wp_family(m, PSI, a, b, N, GRID)) for N in NG.values] for b in BG.values]
                    for a in AG.values])
    assert relative_l2(cube.values, ref) < 1e-12


@pytest.mark.parametrize("m", list(desk.MATRICES.values()))
def test_n_equals_a_slice_is_the_wavelet_transform(m):
    psi = Wavelet.morlet(2.0)
    cube = wp_analyze(F, psi, m, AG, BG, NG)
    W = analyze(F, psi.conjugate(), m, AG, BG).values
    for i, a in enumerate(AG.values):
        l = int(np.argmin(np.abs(NG.values - a)))
        assert relative_l2(cube.values[i, :, l], packet_constant(m) * W[i]) < 1e-10


@pytest.mark.parametrize("m", list(desk.MATRICES.values()))
def test_unit_scale_slice_is_windowed_saft(m):
    cube = wp_analyze(F, PSI, m, GeoGrid(1.0, 2.0, 1), BG, NG)
    assert relative_l2(cube.slice_n(3)[0], windowed_saft(F, PSI, m, BG, NG)[:, 3]) < 1e-10


def test_fast_path_matches_direct():
    a = wp_analyze(F, PSI, desk.M1, AG, BG, NG).values
    b = wp_analyze(F, PSI, desk.M1, AG, BG, NG, method="chirpfft").values
    assert relative_l2(b, a) < 1e-10


@pytest.mark.parametrize("m", list(desk.MATRICES.values()))
def test_identities(m):
    rep = wp_verify_properties(F, G, PSI, Wavelet.mexican_hat(), m, 0.5, 0.7)
    assert rep.linearity < 1e-12
    assert rep.window_conjugate_linearity < 1e-12
    assert rep.window_linearity < 1e-12
    for r in (rep.time_shift, rep.phase_shift, rep.joint_shift):
        assert r["derived"] < 1e-4
        assert r["modulus"] < 1e-4


def test_literal_phase_factor_is_a_diagnostic():
    rep = wp_verify_properties(F, G, PSI, Wavelet.mexican_hat(), FOURIER, 0.5, 0.7)
    assert rep.phase_shift["literal"] > 1e-2


def test_shift_factors_are_unimodular():
    n = np.linspace(-3, 3, 7)
    assert_allclose(np.abs(time_shift_factor(desk.M1, 0.4, n)), 1.0)
    assert_allclose(np.abs(phase_shift_factor(desk.M1, 0.9, n)), 1.0)


def test_zero_shift_factors_are_one():
    n = np.linspace(-3, 3, 7)
    assert_allclose(time_shift_factor(desk.M1, 0.0, n), 1.0)
    assert_allclose(phase_shift_factor(desk.M1, 0.0, n), 1.0)


@pytest.mark.parametrize("label", ["fourier", "m1"])
def test_moyal_constant_is_shared(label):
    mo = wp_moyal(desk.packet_signals(), Wavelet.morlet(6.0).normalized(), desk.MATRICES[label],
                  b_grid=RealGrid.between(-8, 8, 257))
    assert mo["spread"] < 1e-3
    assert abs(mo["kappa_wp"] - 1) < 1e-3
