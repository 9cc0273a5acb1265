import numpy as np
import pytest
from numpy.testing import assert_allclose

from affwave import desk
from affwave.core import FOURIER, RealGrid, Wavelet, gaussian_signal, relative_l2
from affwave.dsawt import (CoefficientTable, FrameSpec, coefficient_synthesis, conjugate_residual,
                           discrete_family, dsawt_analyze, estimate_frame_bounds, frame_reconstruct)
from affwave.errors import ConfigError, IllConditionedFrame, IndexOutOfRange
from affwave.oracles import fixture_value

PSI = Wavelet.morlet(6.0)


def test_spec_validation():
    with pytest.raises(ConfigError):
        FrameSpec(1.0, 1.0, (0, 1), (0, 1))
    with pytest.raises(ConfigError):
        FrameSpec(2.0, 0.0, (0, 1), (0, 1))
    with pytest.raises(ConfigError):
        FrameSpec(2.0, 1.0, (0, 1), (0, 1), lattice="square")


def test_empty_ranges():
    spec = FrameSpec(2.0, 1.0, (1, 0), (0, 3))
    assert spec.shape == (0, 4)
    assert list(spec.atoms()) == []


def test_atom_lattices_differ_only_in_frequency():
    s1 = FrameSpec(2.0, 0.5, (0, 2), (0, 2)).atom(2, 1)
    s2 = FrameSpec(2.0, 0.5, (0, 2), (0, 2), lattice="direct").atom(2, 1)
    assert s1[:2] == s2[:2] == (4.0, 2.0)
    assert (s1[2], s2[2]) == (0.125, 2.0)


def test_family_index_check():
    spec = FrameSpec(2.0, 1.0, (0, 1), (0, 1))
    with pytest.raises(IndexOutOfRange):
        discrete_family(FOURIER, PSI, spec, 2, 0, RealGrid.between(-1, 1, 5))


def test_analysis_is_inner_product_with_family():
    g = RealGrid.between(-8, 8, 2048)
    f = gaussian_signal(g, 0.3, 1.0, 0.5)
    spec = FrameSpec(2.0, 0.5, (-1, 1), (-3, 3))
    table = dsawt_analyze(f, PSI, desk.M1, spec)
    for j, k in [(-1, 2), (0, 0), (1, -3)]:
        ref = f.inner(discrete_family(desk.M1, PSI, spec, j, k, g))
        assert_allclose(table.values[j + 1, k + 3], ref, rtol=1e-10)


@pytest.mark.parametrize("j,k", [(0, 0), (0, 1), (1, 1), (-1, 1)])
def test_haar_chirp_example(j, k):
    m1 = desk.M1
    g = RealGrid.between(-8, 8, 8193)
    chirp = gaussian_signal(g, 0.0, 1e6).with_samples(np.exp(-1j * m1.A * g.values**2 / (2 * m1.B)))
    v = dsawt_analyze(chirp, Wavelet.haar(), m1, FrameSpec(2.0, 1.0, (j, j), (k, k))).values[0, 0]
    assert abs(v - fixture_value(f"haar_dyadic_m1_j{j}_k{k}")) <= 1e-6


def test_conjugate_residual_solves_spd_system():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
    s = a @ a.conj().T + np.eye(20)
    b = rng.standard_normal(20) + 0j
    x, hist = conjugate_residual(lambda v: s @ v, b, lambda u, v: complex(np.vdot(v, u)), tol=1e-12)
    assert_allclose(s @ x, b, atol=1e-9)
    assert hist[-1] <= 1e-12


def test_frame_bounds_match_pinned_values():
    fb = estimate_frame_bounds(PSI, FOURIER, desk.frame_spec(), desk.frame_trial_grid())
    assert_allclose(fb.E, fixture_value("frame_E").real, rtol=1e-6)
    assert_allclose(fb.F, fixture_value("frame_F").real, rtol=1e-6)
    assert 0 < fb.E <= fb.F


def test_frame_sandwich_on_random_signals():
    spec, tr = desk.frame_spec(), desk.frame_trial_grid()
    fb = estimate_frame_bounds(PSI, FOURIER, spec, tr)
    sp = spec.with_bounds(fb.E, fb.F)
    for seed in range(10):
        x = desk.random_signal(tr, seed)
        e = dsawt_analyze(x, PSI, FOURIER, sp, check=False).energy()
        assert fb.E * x.norm() ** 2 * (1 - 1e-9) <= e <= fb.F * x.norm() ** 2 * (1 + 1e-9)


def test_reconstruction_of_a_span_signal():
    spec, tr = desk.frame_spec(), desk.frame_trial_grid()
    fb = estimate_frame_bounds(PSI, FOURIER, spec, tr)
    sp = spec.with_bounds(fb.E, fb.F)
    rng = np.random.default_rng(9)
    c = CoefficientTable(rng.standard_normal(spec.shape) + 0j, sp)
    x = coefficient_synthesis(c, PSI, FOURIER, tr)
    r = frame_reconstruct(dsawt_analyze(x, PSI, FOURIER, sp, check=False), PSI, FOURIER, sp, tr)
    assert relative_l2(r.samples, x.samples) < 1e-6


def test_reconstruction_needs_bounds():
    spec = desk.frame_spec()
    c = CoefficientTable(np.zeros(spec.shape), spec)
    with pytest.raises(IllConditionedFrame):
        frame_reconstruct(c, PSI, FOURIER, spec, desk.frame_trial_grid())


def test_empty_lattice_has_zero_bounds():
    fb = estimate_frame_bounds(PSI, FOURIER, FrameSpec(2.0, 1.0, (1, 0), (0, 0)), desk.frame_trial_grid())
    assert (fb.E, fb.F) == (0.0, 0.0)
