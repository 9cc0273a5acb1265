import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from affwave import desk
from affwave.core import FOURIER, GeoGrid, RealGrid, gaussian_signal
from affwave.errors import NonuniformGrid, ParseError
from affwave.io import (fmt, fmt_complex_cell, ingest_signal, read_coefficients, read_matrix_csv,
                        read_scalogram, read_series, read_signal_csv, read_wav, write_matrix_csv,
                        write_scalogram, write_signal_csv, write_wav)
from affwave.sawt import analyze


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_round_trips(x):
    assert float(fmt(x)) == x


@given(st.complex_numbers(allow_nan=False, allow_infinity=False))
def test_cell_round_trips(z):
    re, im = fmt_complex_cell(z).split(":")
    assert complex(float(re), float(im)) == z


def test_signal_csv_round_trip(tmp_path):
    f = gaussian_signal(RealGrid.between(-2, 2, 41), 0.1, 0.7, 3.0)
    p = write_signal_csv(tmp_path / "f.csv", f)
    g = read_signal_csv(p)
    assert np.array_equal(g.samples, f.samples)
    assert (g.t0, g.dt) == pytest.approx((f.t0, f.dt), rel=1e-12)


def test_headerless_two_column_file(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("# recorded trace\n0.0,1.5\n0.5,2.0\n1.0,-1.0\n")
    x0, dx, v = read_series(p)
    assert (x0, dx) == (0.0, 0.5)
    assert_allclose(v, [1.5, 2.0, -1.0])


def test_nonuniform_spacing_names_the_line(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("t,re,im\n0,1,0\n1,1,0\n2.5,1,0\n")
    with pytest.raises(NonuniformGrid, match="line 4"):
        read_series(p)


def test_bad_number_names_the_line(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("t,re,im\n0,1,0\n1,x,0\n")
    with pytest.raises(ParseError, match="line 3"):
        read_series(p)


def test_wrong_field_count(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("0,1,0,9\n")
    with pytest.raises(ParseError, match="line 1"):
        read_series(p)


@pytest.mark.parametrize("bits", [16, 32])
def test_wav_round_trip(tmp_path, bits):
    x = 0.5 * np.sin(np.linspace(0, 20, 800))
    p = write_wav(tmp_path / "s.wav", x, 8000, bits)
    f = read_wav(p)
    assert f.dt == 1 / 8000 and f.t0 == 0.0
    assert_allclose(f.samples.real, x, atol=2.0 ** (1 - bits) * 2)


def test_stereo_wav_rejected(tmp_path):
    import wave
    p = tmp_path / "st.wav"
    with wave.open(str(p), "wb") as w:
        w.setnchannels(2)
        w.setsampwidth(2)
        w.setframerate(100)
        w.writeframes(struct.pack("<4h", 1, 2, 3, 4))
    with pytest.raises(ParseError, match="mono"):
        read_wav(p)


def test_garbage_wav_rejected(tmp_path):
    p = tmp_path / "g.wav"
    p.write_bytes(b"not a wav at all")
    with pytest.raises(ParseError, match="byte 0"):
        read_wav(p)


def test_ingest_by_suffix(tmp_path):
    write_wav(tmp_path / "a.wav", np.zeros(10), 100)
    assert ingest_signal(tmp_path / "a.wav").count == 10
    (tmp_path / "a.xyz").write_text("")
    with pytest.raises(ParseError):
        ingest_signal(tmp_path / "a.xyz")
    with pytest.raises(ParseError):
        ingest_signal(tmp_path / "missing.csv")


def test_matrix_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    v = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    p = write_matrix_csv(tmp_path / "m.csv", v, [1, 2, 3], [0, 0.5, 1, 1.5], "t", "a")
    d = read_matrix_csv(p)
    assert (d["row_label"], d["col_label"]) == ("t", "a")
    assert np.array_equal(d["values"], v)
    assert p.read_text().startswith("t\\a,1.0,2.0,3.0\n")


def test_matrix_header_required(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError, match="line 1"):
        read_matrix_csv(p)


def test_scalogram_round_trip(tmp_path):
    f = gaussian_signal(desk.signal_grid(256))
    W = analyze(f, desk.wavelet(), FOURIER, GeoGrid(0.5, 2.0, 3), RealGrid.between(-2, 2, 5))
    write_scalogram(tmp_path / "w.csv", W, {"kappa": 1.0})
    back = read_scalogram(tmp_path / "w.csv")
    assert np.array_equal(back.values, W.values)
    assert back.matrix == FOURIER
    assert back.meta["constants"] == {"kappa": 1.0}


def test_scalogram_without_sidecar_needs_matrix(tmp_path):
    write_matrix_csv(tmp_path / "w.csv", np.ones((2, 2)), [1, 2], [0, 1], "b", "a")
    with pytest.raises(ParseError):
        read_scalogram(tmp_path / "w.csv")
    assert read_scalogram(tmp_path / "w.csv", FOURIER).a_grid.describe()["type"] == "uniform"


def test_coefficient_table_errors(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text("j,k,re,im\n0,1.5,1,0\n")
    with pytest.raises(ParseError, match="integers"):
        read_coefficients(p)
