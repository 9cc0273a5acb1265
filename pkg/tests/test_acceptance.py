"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS`` or ``FAIL`` line; the lines are repeated in
the terminal summary.
"""

import time

import numpy as np
import pytest

from affwave import desk
from affwave.cli import main
from affwave.core import RealGrid, gaussian_signal, relative_l2
from affwave.oracles import load_fixtures
from affwave.saft import saft_forward, saft_inverse, suggest_omega_grid
from affwave.sawt import analyze, analyze_via_saft
from affwave.verify import (suite_covariance, suite_frame, suite_inversion, suite_moyal, suite_oracles,
                            suite_poisson, suite_qfactor, suite_range, suite_wavepacket, suite_wigner)
from affwave.poisson import classical_poisson_check, gaussian_pulse, sawt_poisson_check
from affwave.core import Wavelet


@pytest.fixture(scope="module")
def fixtures():
    return load_fixtures()


def _log(log, name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    log.append(line)
    assert ok, line


def test_saft_roundtrip(acceptance_log):
    g = RealGrid.between(-8, 8, 4096)
    f = gaussian_signal(g)
    errs, secs = {}, {}
    for label, m in desk.MATRICES.items():
        t0 = time.perf_counter()
        F = saft_forward(f, m, suggest_omega_grid(f, m), "chirpfft")
        r = saft_inverse(F, m, g)
        secs[label] = time.perf_counter() - t0
        errs[label] = relative_l2(r.samples, f.samples, f.weights())
    ok = max(errs.values()) <= 1e-4 and max(secs.values()) <= 5.0
    _log(acceptance_log, "saft roundtrip", ok, f"rel L2 {errs} (tol 1e-4), seconds {secs} (limit 5)")


def test_chirpfft_matches_quadrature(acceptance_log):
    g = RealGrid.between(-8, 8, 4096)
    og = RealGrid.between(-30, 30, 4096)
    worst, ratio = 0.0, np.inf
    for label, m in desk.MATRICES.items():
        for seed in range(10):
            f = desk.smooth_random_signal(g, seed)
            t0 = time.perf_counter()
            fast = saft_forward(f, m, og, "chirpfft")
            t1 = time.perf_counter()
            slow = saft_forward(f, m, og, "quadrature")
            t2 = time.perf_counter()
            worst = max(worst, relative_l2(fast.values, slow.values))
            if seed == 0:
                ratio = min(ratio, (t2 - t1) / max(t1 - t0, 1e-9))
    ok = worst <= 1e-8 and ratio >= 10
    _log(acceptance_log, "chirpfft equals quadrature", ok,
         f"worst rel L2 {worst:.3e} (tol 1e-8), speedup {ratio:.1f}x (need 10x)")


def test_saft_route_analysis(acceptance_log):
    f = gaussian_signal(desk.signal_grid())
    psi = desk.wavelet()
    ag, bg = desk.a_grid(), desk.b_grid()
    t0 = time.perf_counter()
    errs = {}
    for label, m in desk.MATRICES.items():
        direct = analyze(f, psi, m, ag, bg).values
        via = np.stack([analyze_via_saft(f, psi, m, a, bg) for a in ag.values])
        errs[label] = relative_l2(via, direct)
    secs = time.perf_counter() - t0
    ok = max(errs.values()) <= 1e-4 and secs <= 60
    _log(acceptance_log, "analysis through the SAFT domain", ok,
         f"rel L2 {errs} (tol 1e-4), {secs:.1f} s (limit 60)")


def test_moyal_constant(acceptance_log, fixtures):
    r = suite_moyal(1e-3, fixtures)
    dev = {k: v["max_relative_deviation"] for k, v in r["measured"].items()}
    _log(acceptance_log, "moyal ratio constant across signals", r["passed"],
         f"max relative deviation {dev} (tol 1e-3)")


def test_inversion_roundtrip(acceptance_log, fixtures):
    t0 = time.perf_counter()
    r = suite_inversion(1e-2, fixtures)
    secs = time.perf_counter() - t0
    errs = {k: max(v["errors"].values()) for k, v in r["measured"].items()}
    _log(acceptance_log, "inversion roundtrip after calibration", r["passed"] and secs <= 120,
         f"worst rel L2 {errs} (tol 1e-2), {secs:.1f} s (limit 120)")


def test_covariances(acceptance_log):
    r = suite_covariance(1e-4)
    worst = {k: {n: v[n] for n in ("linearity", "translation", "parity", "dilation", "conjugation")}
             for k, v in r["measured"].items()}
    _log(acceptance_log, "covariance identities", r["passed"],
         f"{worst} (tol 1e-4, linearity 1e-10)")


def test_qfactor(acceptance_log):
    r = suite_qfactor(1e-6)
    _log(acceptance_log, "Q-factor invariance", r["passed"],
         f"max relative deviation {r['measured']['max_relative_deviation']:.3e} (tol 1e-6)")


def test_closed_form_oracles(acceptance_log, fixtures):
    r = suite_oracles(1e-6, fixtures)
    worst = max(v["abs_error"] for v in r["measured"].values())
    _log(acceptance_log, "closed-form oracles", r["passed"],
         f"{len(r['measured'])} cells, worst abs error {worst:.3e} (tol 1e-6, 1e-4 for the Morlet constant)")


def test_frame_reconstruction(acceptance_log):
    t0 = time.perf_counter()
    r = suite_frame(1e-6)
    secs = time.perf_counter() - t0
    m = r["measured"]
    _log(acceptance_log, "frame sandwich and reconstruction", r["passed"] and secs <= 120,
         f"E {m['E']:.6g}, F {m['F']:.6g}, sandwich {m['sandwich']}, roundtrip {m['roundtrip']:.3e} "
         f"(tol 1e-6), {secs:.1f} s (limit 120)")


def test_reproducing_property(acceptance_log):
    r = suite_range(5e-2)
    _log(acceptance_log, "reproducing kernel range test", r["passed"],
         f"{r['measured']} (in range <= 5e-2, white noise > 0.5)")


def test_wigner_fixture(acceptance_log):
    r = suite_wigner(1e-6)
    _log(acceptance_log, "wigner gaussian at the origin", r["passed"],
         f"abs error {r['measured']['abs_error']:.3e} (tol 1e-6)")


def test_wavepacket_reductions(acceptance_log):
    r = suite_wavepacket(1e-4)
    d = {k: {"N=a": v["n_equals_a_reduction"], "a=1": v["windowed_reduction"],
             "shift": max(v["properties"][s]["derived"] for s in ("time_shift", "phase_shift", "joint_shift")),
             "moyal": v["moyal_spread"]} for k, v in r["measured"].items()}
    _log(acceptance_log, "wave-packet reductions and identities", r["passed"],
         f"{d} (reductions 1e-10, shifts 1e-4, moyal 1e-3)")


# a residual this small relative to the sum has no truncation error left to shrink
ROUNDOFF_FLOOR = 1e-12


def _shrinks(res):
    """Each doubling of k_max keeps the residual within 10 percent of the previous one."""
    return all(b <= 1.1 * a or b <= ROUNDOFF_FLOOR for a, b in zip(res, res[1:]))


def test_poisson(acceptance_log):
    r = suite_poisson(1e-3)
    t = RealGrid.between(-0.5, 0.5, 11)
    f = gaussian_pulse(width=2.2)
    res = [classical_poisson_check(f, 1.0, t, k).rel_residual for k in (8, 16, 32)]
    mono = _shrinks(res)
    g = RealGrid.between(-8, 8, 4097)
    sres = [sawt_poisson_check(gaussian_signal(g), Wavelet.morlet(0.0), desk.M1, 1.0, 0.0, 1.0,
                               RealGrid.between(-1, 1, 21), k).rel_residual for k in (8, 16, 32)]
    smono = _shrinks(sres)
    ok = r["passed"] and mono and smono
    _log(acceptance_log, "poisson summation", ok,
         f"{r['measured']} (classical 1e-9, wavelet 1e-3); relative residual at k_max 8/16/32: "
         f"classical {res}, wavelet {sres} (round-off floor {ROUNDOFF_FLOOR:g})")


def test_cli_determinism(acceptance_log, tmp_path):
    g = RealGrid.between(-4, 4, 128)
    from affwave.io import write_signal_csv
    src = tmp_path / "f.csv"
    write_signal_csv(src, gaussian_signal(g, 0.2, 0.8, 1.0))
    runs = []
    for n in range(2):
        d = tmp_path / f"run{n}"
        d.mkdir()
        codes = [
            main(["sawt", "analyze", "--input", str(src), "--output", str(d / "w.csv"), "--matrix",
                  "1,2,1,3,1,1", "--a-grid", "geo:0.5:1.25:6", "--b-grid", "-3:0.5:13", "--workers", "2"]),
            main(["wigner", "--input", str(src), "--output", str(d / "wd.csv"), "--matrix-kind", "fourier",
                  "--t-grid", "-1:0.5:5", "--a-grid", "-1:0.5:5"]),
            main(["verify", "--suite", "qfactor", "--output", str(d / "v.json")]),
        ]
        assert codes == [0, 0, 0]
        runs.append({p.name: p.read_bytes() for p in sorted(d.iterdir())})
    same = runs[0] == runs[1] and len(runs[0]) == 5
    _log(acceptance_log, "byte-identical CLI outputs", same, f"{sorted(runs[0])} compared across two runs")
