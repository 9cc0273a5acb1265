import json
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from affwave import io
from affwave.cli import main, parse_grid
from affwave.core import GeoGrid, RealGrid, gaussian_signal, relative_l2
from affwave.errors import ConfigError

M1 = ["--matrix", "1,2,1,3,1,1"]
FOURIER = ["--matrix-kind", "fourier"]


@pytest.fixture
def signal_csv(tmp_path):
    p = tmp_path / "f.csv"
    io.write_signal_csv(p, gaussian_signal(RealGrid.between(-8, 8, 512), 0.0, 1.0, 2.0))
    return p


def test_grid_flags():
    assert parse_grid("-1:0.5:5", "--b-grid") == RealGrid(-1.0, 0.5, 5)
    assert parse_grid("geo:0.25:2:5", "--a-grid") == GeoGrid(0.25, 2.0, 5)
    with pytest.raises(ConfigError, match="--a-grid"):
        parse_grid("geo:1:2", "--a-grid")


def test_saft_round_trip(tmp_path, signal_csv):
    assert main(["saft", "--input", str(signal_csv), "--output", str(tmp_path / "F.csv"), *M1]) == 0
    assert main(["saft", "--inverse", "--input", str(tmp_path / "F.csv"), "--output", str(tmp_path / "r.csv"),
                 "--t-grid", f"-8:{16 / 511!r}:512", *M1]) == 0
    f, r = io.read_signal_csv(signal_csv), io.read_signal_csv(tmp_path / "r.csv")
    assert relative_l2(r.samples, f.samples) < 1e-10


def test_analyze_writes_sidecar(tmp_path, signal_csv):
    out = tmp_path / "w.csv"
    assert main(["sawt", "analyze", "--input", str(signal_csv), "--output", str(out), *M1,
                 "--a-grid", "geo:0.5:1.5:4", "--b-grid", "-2:1:5"]) == 0
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["a_grid"] == {"type": "geometric", "start": 0.5, "ratio": 1.5, "count": 4}
    assert {"kappa_measured", "moyal_kappa_pinned", "roundtrip_c_pinned"} <= set(side["constants"])
    assert io.read_matrix_csv(out)["values"].shape == (4, 5)


def test_synthesize_uses_the_sidecar(tmp_path, signal_csv):
    w = tmp_path / "w.csv"
    main(["sawt", "analyze", "--input", str(signal_csv), "--output", str(w), *FOURIER,
          "--a-grid", "geo:0.5:1.5:4", "--b-grid", "-2:1:5"])
    assert main(["sawt", "synthesize", "--input", str(w), "--output", str(tmp_path / "r.csv"),
                 "--constant", "2,0"]) == 0
    assert io.read_signal_csv(tmp_path / "r.csv").count == 512


def test_localize_reports_q(tmp_path):
    out = tmp_path / "loc.json"
    assert main(["sawt", "localize", *M1, "--a", "2", "--output", str(out)]) == 0
    assert_allclose(json.loads(out.read_text())["Q"], 1 / (6 * np.sqrt(2)), rtol=1e-6)


def test_dsawt_bounds_and_reconstruct(tmp_path):
    f = tmp_path / "h.csv"
    g = RealGrid.between(-4, 4, 64)
    io.write_signal_csv(f, gaussian_signal(g, 0.0, 0.7))
    lattice = ["--a0", "2", "--b0", "1", "--jmin", "-1", "--jmax", "0", "--kmin", "-2", "--kmax", "2"]
    assert main(["dsawt", "bounds", *FOURIER, *lattice, "--trial-grid", f"-4:{8 / 63!r}:64",
                 "--output", str(tmp_path / "fb.json")]) == 0
    fb = json.loads((tmp_path / "fb.json").read_text())
    assert 0 < fb["E"] <= fb["F"]
    assert main(["dsawt", "analyze", *FOURIER, *lattice, "--input", str(f), "--output", str(tmp_path / "c.csv")]) == 0
    assert len(io.read_coefficients(tmp_path / "c.csv")) == 10
    code = main(["dsawt", "reconstruct", *FOURIER, "--input", str(tmp_path / "c.csv"),
                 "--output", str(tmp_path / "r.csv")])
    assert code == 0
    side = json.loads((tmp_path / "r.json").read_text())
    assert side["final_residual"] <= 1e-8


def test_degenerate_lattice_exits_3(tmp_path):
    f = tmp_path / "h.csv"
    io.write_signal_csv(f, gaussian_signal(RealGrid.between(-4, 4, 64)))
    main(["dsawt", "analyze", *FOURIER, "--jmin", "-2", "--jmax", "2", "--kmin", "-8", "--kmax", "8",
          "--b0", "0.5", "--input", str(f), "--output", str(tmp_path / "c.csv")])
    assert main(["dsawt", "reconstruct", *FOURIER, "--input", str(tmp_path / "c.csv"),
                 "--output", str(tmp_path / "r.csv")]) == 3


def test_wigner_matrix_layout(tmp_path, signal_csv):
    out = tmp_path / "wd.csv"
    assert main(["wigner", *FOURIER, "--input", str(signal_csv), "--output", str(out),
                 "--t-grid", "-1:0.5:5", "--a-grid", "0:1:3"]) == 0
    d = read = io.read_matrix_csv(out)
    assert (read["row_label"], read["col_label"]) == ("t", "a")
    assert d["values"].shape == (3, 5)


def test_wavepacket_slices(tmp_path, signal_csv):
    out = tmp_path / "wp"
    assert main(["wavepacket", *FOURIER, "--input", str(signal_csv), "--output", str(out), "--alpha", "0",
                 "--a-grid", "geo:1:2:2", "--b-grid", "-2:1:5", "--n-grid", "-1:1:3"]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert [s["N"] for s in manifest["slices"]] == [-1.0, 0.0, 1.0]
    assert io.read_matrix_csv(out / manifest["slices"][0]["file"])["values"].shape == (2, 5)


def test_poisson_classical(tmp_path):
    out = tmp_path / "p.json"
    assert main(["poisson", "classical", "--k-max", "16", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["abs_residual"] <= 1e-9


def test_poisson_guard_exits_3(signal_csv):
    assert main(["poisson", "sawt", "--input", str(signal_csv), *M1, "--alpha", "0"]) == 3


def test_verify_exit_codes(tmp_path):
    assert main(["verify", "--suite", "qfactor", "--output", str(tmp_path / "q.json")]) == 0
    assert json.loads((tmp_path / "q.json").read_text())["passed"] is True
    assert main(["verify", "--suite", "qfactor", "--tol", "1e-30", "--output", str(tmp_path / "q2.json")]) == 1


def test_oracle_regen(tmp_path):
    out = tmp_path / "fx.json"
    assert main(["oracle", "regen", "--skip-measured", "--output", str(out)]) == 0
    names = {i["name"] for i in json.loads(out.read_text())}
    assert "wigner_gauss_fourier_t0_a0" in names and "frame_E" not in names


@pytest.mark.parametrize("argv,needle", [
    (["--matrix", "1,0,0,1,0,0"], "B must be nonzero"),
    (["--matrix", "1,2,3,4,0,0"], "AD - BC"),
    (["--matrix", "1,2,3"], "six entries"),
    (["--matrix-kind", "gauss_weierstrass"], "complex"),
    (["--matrix-kind", "fractional"], "--theta"),
])
def test_bad_matrix_exits_2(tmp_path, signal_csv, capsys, argv, needle):
    assert main(["saft", "--input", str(signal_csv), "--output", str(tmp_path / "x.csv"), *argv]) == 2
    assert needle in capsys.readouterr().err


def test_bad_grid_exits_2(tmp_path, signal_csv, capsys):
    assert main(["sawt", "analyze", "--input", str(signal_csv), "--output", str(tmp_path / "x.csv"), *M1,
                 "--a-grid", "geo:0.5:1.2:8.5"]) == 2
    assert "--a-grid" in capsys.readouterr().err


def test_missing_input_exits_2(tmp_path, capsys):
    assert main(["saft", "--input", str(tmp_path / "none.csv"), "--output", str(tmp_path / "x.csv"), *M1]) == 2
    assert "--input" in capsys.readouterr().err


def test_nonuniform_csv_exits_2(tmp_path, capsys):
    p = tmp_path / "n.csv"
    p.write_text("t,re,im\n0,1,0\n# dropout below\n0.1,1,0\n0.3,1,0\n")
    assert main(["saft", "--input", str(p), "--output", str(tmp_path / "x.csv"), *M1]) == 2
    assert "line 5" in capsys.readouterr().err


def test_coarse_signal_exits_3_naming_the_module(tmp_path, signal_csv, capsys):
    code = main(["saft", "--input", str(signal_csv), "--output", str(tmp_path / "x.csv"), *FOURIER,
                 "--omega", "-100:0.1:2001"])
    assert code == 3
    assert "saft_forward" in capsys.readouterr().err


def test_wav_ingest(tmp_path):
    wav = tmp_path / "tone.wav"
    t = np.arange(4000) / 8000
    io.write_wav(wav, 0.5 * np.exp(-((t - 0.25) / 0.03) ** 2), 8000)
    out = tmp_path / "w.csv"
    assert main(["sawt", "analyze", "--input", str(wav), "--output", str(out), *FOURIER,
                 "--a-grid", "geo:100:2:3", "--b-grid", "0.2:0.05:3"]) == 0
    assert json.loads(out.with_suffix(".json").read_text())["signal_grid"]["step"] == 1 / 8000


def test_render_raw_pixels(tmp_path):
    from PIL import Image
    v = np.arange(12, dtype=complex).reshape(3, 4)
    csv = io.write_matrix_csv(tmp_path / "m.csv", v, [1, 2, 3], [0, 1, 2, 3], "b", "a")
    png = tmp_path / "m.png"
    assert main(["render", "--input", str(csv), "--output", str(png), "--raw"]) == 0
    img = np.asarray(Image.open(png).convert("RGB"))
    assert img.shape == (3, 4, 3)
    import matplotlib
    cmap = matplotlib.colormaps["viridis"]
    lo, hi = (np.array(cmap(x)[:3]) * 255 for x in (0.0, 1.0))
    # origin lower: the first column value sits in the bottom row
    assert_allclose(img[-1, 0], lo, atol=1)
    assert_allclose(img[0, -1], hi, atol=1)


def test_render_figure(tmp_path):
    v = np.exp(1j * np.arange(12)).reshape(3, 4)
    csv = io.write_matrix_csv(tmp_path / "m.csv", v, [1, 2, 3], [0, 1, 2, 3], "b", "a")
    for scale in ("abs", "real", "imag", "phase"):
        assert main(["render", "--input", str(csv), "--output", str(tmp_path / f"{scale}.png"),
                     "--scale", scale]) == 0
    a, b = (tmp_path / "abs.png").read_bytes(), tmp_path / "abs2.png"
    main(["render", "--input", str(csv), "--output", str(b), "--scale", "abs"])
    assert b.read_bytes() == a


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "affwave", "verify", "--suite", "qfactor"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["suite"] == "qfactor"
