"""Command-line front end.

Exit status: 0 success, 1 a verified invariant failed, 2 configuration or
parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import io
from .core import GeoGrid, RealGrid, SaftMatrix, Signal, Wavelet, make_special_matrix, parse_matrix
from .errors import ConfigError, NumericalError, ParseError, SawtError

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    """Validated view of one invocation."""

    subcommand: str
    action: Optional[str] = None
    input: Optional[Path] = None
    output: Optional[Path] = None
    matrix: Optional[SaftMatrix] = None
    wavelet: Optional[Wavelet] = None
    grids: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# flag parsing

def parse_grid(text: str, flag: str):
    """``start:step:count`` or ``geo:amin:ratio:count``."""
    parts = text.split(":")
    try:
        if parts[0] == "geo":
            if len(parts) != 4:
                raise ValueError
            return GeoGrid(float(parts[1]), float(parts[2]), _count(parts[3]))
        if len(parts) != 3:
            raise ValueError
        return RealGrid(float(parts[0]), float(parts[1]), _count(parts[2]))
    except ValueError as e:
        detail = f" ({e})" if str(e) else ""
        raise ConfigError(f"{flag}: expected start:step:count or geo:amin:ratio:count, got {text!r}{detail}") from None


def _count(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"count {text} is not an integer")
    return int(v)


def parse_complex(text: str, flag: str) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"{flag}: expected re,im, got {text!r}") from None
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) != 2:
        raise ConfigError(f"{flag}: expected re,im, got {text!r}")
    return complex(parts[0], parts[1])


def matrix_from_args(args) -> SaftMatrix:
    kind = getattr(args, "matrix_kind", None)
    text = getattr(args, "matrix", None)
    if text and kind:
        raise ConfigError("--matrix and --matrix-kind are mutually exclusive")
    if kind:
        params = {"theta": args.theta, "p": args.p, "q": args.q, "B": args.fresnel_b}
        need = {"fractional": ["theta"], "offset_fractional": ["theta"], "fresnel": ["B"]}.get(kind, [])
        for k in need:
            if params[k] is None:
                raise ConfigError(f"--matrix-kind {kind}: missing --{'theta' if k == 'theta' else 'fresnel-b'}")
        params = {k: v for k, v in params.items() if v is not None}
        try:
            return make_special_matrix(kind, **params)
        except ConfigError as e:
            raise type(e)(f"--matrix-kind: {e}") from None
    if not text:
        raise ConfigError("--matrix: a matrix is required (A,B,C,D,p,q or --matrix-kind)")
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"--matrix: expected six decimals A,B,C,D,p,q, got {text!r}") from None
    try:
        return parse_matrix(values)
    except ConfigError as e:
        raise type(e)(f"--matrix: {e}") from None


def wavelet_from_args(args) -> Wavelet:
    try:
        psi = Wavelet(args.wavelet, alpha=args.alpha if args.wavelet == "morlet" else 0.0)
    except ConfigError as e:
        raise ConfigError(f"--wavelet: {e}") from None
    return psi if args.no_normalize else psi.normalized()


def _input_signal(path) -> Signal:
    try:
        return io.ingest_signal(path)
    except ParseError as e:
        raise type(e)(f"--input: {e}") from None


def _grid(args, name: str, default=None):
    text = getattr(args, name.replace("-", "_"), None)
    if text is None:
        return default
    return parse_grid(text, f"--{name}")


def _out(path) -> Path:
    p = Path(path)
    if p.parent and not p.parent.exists():
        raise ConfigError(f"--output: directory {p.parent} does not exist")
    return p


def _fixture_constants(m: SaftMatrix) -> dict:
    """Pinned constants for the reference matrices, if the fixtures file has them."""
    from . import desk
    from .oracles import load_fixtures
    label = next((k for k, v in desk.MATRICES.items() if v.as_tuple() == m.as_tuple()), None)
    if label is None:
        return {}
    try:
        fx = load_fixtures()
    except (OSError, ValueError):
        return {}
    out = {}
    for key in ("moyal_kappa", "roundtrip_c", "kappa_wp"):
        item = fx.get(f"{key}_{label}")
        if item is not None:
            out[f"{key}_pinned"] = [item["re"], item["im"]]
    return out


# ---------------------------------------------------------------------------
# subcommands

def cmd_saft(cfg: RunConfig, args) -> int:
    from .saft import Spectrum, saft_forward, saft_inverse, suggest_omega_grid
    m = cfg.matrix
    if args.inverse:
        w0, dw, vals = io.read_series(cfg.input, "omega")
        F = Spectrum(vals, RealGrid(w0, dw, vals.size), m)
        times = _grid(args, "t-grid")
        if times is None:
            raise ConfigError("--t-grid: required with --inverse")
        f = saft_inverse(F, m, times, method=args.method)
        io.write_signal_csv(cfg.output, f)
        return EXIT_OK
    f = _input_signal(cfg.input)
    omegas = _grid(args, "omega", None) or suggest_omega_grid(f, m)
    F = saft_forward(f, m, omegas, method=args.method)
    io.write_series(cfg.output, omegas.start, omegas.step, F.values, "omega")
    return EXIT_OK


def cmd_sawt(cfg: RunConfig, args) -> int:
    from . import sawt
    m, psi = cfg.matrix, cfg.wavelet
    act = cfg.action
    if act == "analyze":
        f = _input_signal(cfg.input)
        W = sawt.analyze(f, psi, m, _grid(args, "a-grid"), _grid(args, "b-grid"), workers=args.workers)
        ratio = W.energy() / (f.norm() ** 2 * psi.norm() ** 2) if f.norm() > 0 else 0.0
        consts = {"kappa_measured": ratio, **_fixture_constants(m)}
        io.write_scalogram(cfg.output, W, consts)
        return EXIT_OK
    if act == "synthesize":
        W = io.read_scalogram(cfg.input, cfg.matrix)
        m = W.matrix
        if args.wavelet is None:
            d = W.meta.get("wavelet")
            if not d:
                raise ConfigError("--wavelet: required when the scalogram has no sidecar")
            psi = io.wavelet_from_dict(d)
        times = _grid(args, "t-grid")
        if times is None:
            sg = W.meta.get("signal_grid")
            if not sg:
                raise ConfigError("--t-grid: required when the sidecar has no signal grid")
            times = io.grid_from_dict(sg)
        c = parse_complex(args.constant, "--constant") if args.constant else 1.0
        if c == 0:
            raise ConfigError("--constant: must be nonzero")
        f = sawt.synthesize(W, psi, m, times, form=args.form)
        f = f * (1 / c)
        io.write_signal_csv(cfg.output, f)
        io.dump_json({"kind": "synthesis", "matrix": list(m.as_tuple()), "form": args.form,
                      "constant": c, "t_grid": times.describe()}, io.sidecar_path(cfg.output))
        return EXIT_OK
    if act == "localize":
        rep = sawt.localization(psi, m, args.a, args.b, spectral=not args.time_only)
        _emit(cfg.output, {"kind": "localization", "matrix": list(m.as_tuple()), "wavelet": psi.describe(),
                           "a": args.a, "b": args.b, **dataclasses.asdict(rep)})
        return EXIT_OK
    if act == "covariance":
        f = _input_signal(cfg.input)
        rep = sawt.verify_covariances(f, psi, m, args.shift)
        _emit(cfg.output, {"kind": "covariance", "matrix": list(m.as_tuple()), "alpha": args.shift,
                           **rep.as_dict()})
        return EXIT_OK
    raise ConfigError(f"unknown sawt action {act!r}")


def _frame_spec(args, E=0.0, F=0.0):
    from .dsawt import FrameSpec
    try:
        return FrameSpec(args.a0, args.b0, (args.jmin, args.jmax), (args.kmin, args.kmax), E, F, args.lattice)
    except ConfigError as e:
        raise ConfigError(f"--a0/--b0/--jmin/--jmax/--kmin/--kmax: {e}") from None


def _spec_dict(spec) -> dict:
    return {"a0": spec.a0, "b0": spec.b0, "j_range": list(spec.j_range), "k_range": list(spec.k_range),
            "E": spec.E, "F": spec.F, "lattice": spec.lattice}


def cmd_dsawt(cfg: RunConfig, args) -> int:
    from . import dsawt
    m, psi = cfg.matrix, cfg.wavelet
    act = cfg.action
    if act == "analyze":
        f = _input_signal(cfg.input)
        spec = _frame_spec(args)
        trial = _grid(args, "trial-grid")
        if trial is not None:
            fb = dsawt.estimate_frame_bounds(psi, m, spec, trial)
            spec = spec.with_bounds(fb.E, fb.F)
        table = dsawt.dsawt_analyze(f, psi, m, spec)
        io.write_coefficients(cfg.output, table)
        io.dump_json({"kind": "coefficients", "matrix": list(m.as_tuple()), "wavelet": psi.describe(),
                      "spec": _spec_dict(spec), "trial_grid": trial.describe() if trial else None,
                      "signal_grid": f.grid.describe()}, io.sidecar_path(cfg.output))
        return EXIT_OK
    if act == "bounds":
        trial = _grid(args, "trial-grid")
        if trial is None:
            raise ConfigError("--trial-grid: required for bounds")
        spec = _frame_spec(args)
        fb = dsawt.estimate_frame_bounds(psi, m, spec, trial)
        _emit(cfg.output, {"kind": "frame_bounds", "matrix": list(m.as_tuple()), "wavelet": psi.describe(),
                           "spec": _spec_dict(spec.with_bounds(fb.E, fb.F)), "E": fb.E, "F": fb.F,
                           "rank": fb.rank, "dimension": fb.dimension, "iterations": list(fb.iterations),
                           "note": fb.note, "trial_grid": trial.describe()})
        return EXIT_OK
    if act == "reconstruct":
        coeffs = io.read_coefficients(cfg.input)
        side_file = io.sidecar_path(cfg.input)
        side = io.load_json(side_file) if side_file.is_file() else {}
        if args.a0 is None and "spec" not in side:
            args.a0 = 2.0
        if "spec" in side and args.a0 is None:
            s = side["spec"]
            spec = dsawt.FrameSpec(s["a0"], s["b0"], tuple(s["j_range"]), tuple(s["k_range"]), s["E"], s["F"],
                                   s["lattice"])
        else:
            spec = _frame_spec(args)
        times = _grid(args, "t-grid")
        if times is None:
            if "signal_grid" not in side:
                raise ConfigError("--t-grid: required when the table has no sidecar")
            times = io.grid_from_dict(side["signal_grid"])
        vals = np.zeros(spec.shape, dtype=complex)
        for (j, k), z in coeffs.items():
            dsawt._check_index(spec, j, k)
            vals[j - spec.j_range[0], k - spec.k_range[0]] = z
        fb = dsawt.estimate_frame_bounds(psi, m, spec, times)
        spec = spec.with_bounds(fb.E, fb.F)
        f, hist = dsawt.frame_reconstruct(dsawt.CoefficientTable(vals, spec), psi, m, spec, times,
                                          tol=args.tol, return_history=True)
        io.write_signal_csv(cfg.output, f)
        io.dump_json({"kind": "frame_reconstruction", "spec": _spec_dict(spec), "iterations": len(hist) - 1,
                      "final_residual": hist[-1], "t_grid": times.describe()}, io.sidecar_path(cfg.output))
        return EXIT_OK
    raise ConfigError(f"unknown dsawt action {act!r}")


def cmd_wigner(cfg: RunConfig, args) -> int:
    from .wigner import wigner
    f = _input_signal(cfg.input)
    tg, ag = _grid(args, "t-grid"), _grid(args, "a-grid")
    if tg is None or ag is None:
        raise ConfigError("--t-grid and --a-grid: both required")
    W = wigner(f, cfg.matrix, tg, ag, workers=args.workers)
    # rows t, columns a
    io.write_matrix_csv(cfg.output, W.values.T, ag.values, tg.values, "t", "a")
    io.dump_json({"kind": "wigner", "matrix": list(cfg.matrix.as_tuple()), "t_grid": tg.describe(),
                  "a_grid": ag.describe()}, io.sidecar_path(cfg.output))
    return EXIT_OK


def cmd_wavepacket(cfg: RunConfig, args) -> int:
    from .wavepacket import wp_analyze
    f = _input_signal(cfg.input)
    ag, bg, ng = _grid(args, "a-grid"), _grid(args, "b-grid", f.grid), _grid(args, "n-grid")
    if ag is None:
        raise ConfigError("--a-grid: required")
    cube = wp_analyze(f, cfg.wavelet, cfg.matrix, ag, bg, ng, method=args.method, workers=args.workers)
    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    slices = []
    for l, N in enumerate(cube.n_grid.values):
        name = f"slice_{l:04d}.csv"
        io.write_matrix_csv(out / name, cube.values[:, :, l], ag.values, bg.values, "b", "a")
        slices.append({"file": name, "N": float(N)})
    io.dump_json({"kind": "wavepacket", "matrix": list(cfg.matrix.as_tuple()), "wavelet": cfg.wavelet.describe(),
                  "a_grid": ag.describe(), "b_grid": bg.describe(), "n_grid": cube.n_grid.describe(),
                  "slices": slices, "constants": _fixture_constants(cfg.matrix)}, out / "manifest.json")
    return EXIT_OK


def cmd_poisson(cfg: RunConfig, args) -> int:
    from . import poisson
    tg = _grid(args, "t-grid", RealGrid.between(-0.5, 0.5, 11))
    if cfg.action == "classical":
        f = poisson.gaussian_pulse(args.center, args.width, args.omega0)
        rep = poisson.classical_poisson_check(f, args.period, tg, args.k_max, args.convention)
    else:
        f = _input_signal(cfg.input)
        rep = poisson.sawt_poisson_check(f, cfg.wavelet, cfg.matrix, args.a, args.b, args.period, tg,
                                         args.k_max, args.convention)
    _emit(cfg.output, rep.as_dict())
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, args) -> int:
    from .oracles import build_oracle_fixtures, fixtures_path, write_fixtures
    items = build_oracle_fixtures(args.tol)
    if not args.skip_measured:
        from .verify import measure_constants
        items += measure_constants()
    path = write_fixtures(items, cfg.output or fixtures_path())
    print(f"wrote {len(items)} fixtures to {path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    from .oracles import load_fixtures
    from .verify import run_suite
    try:
        fixtures = load_fixtures()
    except OSError:
        fixtures = None
    report = run_suite(args.suite, args.tol, fixtures)
    _emit(cfg.output, report)
    return EXIT_OK if report["passed"] else EXIT_FAILED


def cmd_render(cfg: RunConfig, args) -> int:
    render_heatmap(cfg.input, cfg.output, args.scale, raw=args.raw)
    return EXIT_OK


SCALES = {"abs": np.abs, "real": np.real, "imag": np.imag, "phase": np.angle}
COLORMAP = "viridis"


def render_heatmap(csv_path, png_path, scale: str = "abs", raw: bool = False) -> Path:
    """Heatmap of a matrix CSV; columns run up the vertical axis, rows along the horizontal.

    ``raw`` writes one pixel per cell with no axes. The colormap is fixed to
    viridis and the color range is the data range.
    """
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.ticker
    import matplotlib.pyplot as plt

    data = io.read_matrix_csv(csv_path)
    img = SCALES[scale](data["values"])
    vmin, vmax = float(img.min()), float(img.max())
    if raw:
        plt.imsave(png_path, img, cmap=COLORMAP, vmin=vmin, vmax=vmax, origin="lower")
        return Path(png_path)
    side_file = io.sidecar_path(csv_path)
    labels = (data["row_label"], data["col_label"])
    title = io.load_json(side_file).get("kind", "") if side_file.is_file() else ""
    fig, ax = plt.subplots(figsize=(6, 4), dpi=100)
    rows, cols = data["rows"], data["cols"]
    # cells at their true axis positions; geometric scale axes are drawn on a log axis
    h = ax.pcolormesh(rows, cols, img, cmap=COLORMAP, vmin=vmin, vmax=vmax, shading="nearest")
    if cols.size > 2 and np.all(cols > 0) and np.allclose(np.diff(np.log(cols)), np.log(cols[1] / cols[0])) \
            and not np.allclose(np.diff(cols), cols[1] - cols[0]):
        ax.set_yscale("log")
        ax.yaxis.set_major_locator(matplotlib.ticker.LogLocator(base=2))
        ax.yaxis.set_major_formatter(matplotlib.ticker.FormatStrFormatter("%g"))
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_title(f"{title} ({scale})".strip())
    fig.colorbar(h, ax=ax)
    fig.savefig(png_path, metadata={"Software": None})
    plt.close(fig)
    return Path(png_path)


def _emit(path: Optional[Path], obj) -> None:
    if path is None:
        import json
        print(json.dumps(io._jsonable(obj), indent=2, sort_keys=True))
    else:
        io.dump_json(obj, path)


# ---------------------------------------------------------------------------
# parser

def _add_matrix(p):
    p.add_argument("--matrix", help="A,B,C,D,p,q with AD - BC = 1")
    p.add_argument("--matrix-kind", choices=["fourier", "fractional", "offset_fractional", "fresnel",
                                              "gauss_weierstrass", "bilateral_laplace"])
    p.add_argument("--theta", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--fresnel-b", type=float)


def _add_wavelet(p, required=True):
    p.add_argument("--wavelet", choices=["haar", "morlet", "mexican_hat"], default="morlet" if required else None)
    p.add_argument("--alpha", type=float, default=6.0, help="Morlet carrier frequency")
    p.add_argument("--no-normalize", action="store_true", help="keep the unnormalized mother wavelet")


def _add_io(p, need_input=True):
    p.add_argument("--input", required=need_input, type=Path)
    p.add_argument("--output", type=Path, required=True)


def _workers(p):
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="affwave", description="Special affine Fourier and wavelet transforms")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("saft", help="forward or inverse SAFT of a signal CSV")
    _add_io(p)
    _add_matrix(p)
    p.add_argument("--omega", help="omega grid start:step:count (default: suggested)")
    p.add_argument("--t-grid", help="output time grid for --inverse")
    p.add_argument("--method", choices=["quadrature", "chirpfft"], default="chirpfft")
    p.add_argument("--inverse", action="store_true")

    p = sub.add_parser("sawt", help="continuous wavelet transform")
    ss = p.add_subparsers(dest="action", required=True)
    q = ss.add_parser("analyze")
    _add_io(q); _add_matrix(q); _add_wavelet(q); _workers(q)
    q.add_argument("--a-grid")
    q.add_argument("--b-grid")
    q = ss.add_parser("synthesize")
    _add_io(q); _add_matrix(q); _add_wavelet(q, required=False)
    q.add_argument("--t-grid")
    q.add_argument("--form", choices=["adjoint", "literal"], default="adjoint")
    q.add_argument("--constant", help="divide the synthesis by this constant, re,im")
    q = ss.add_parser("localize")
    q.add_argument("--output", type=Path)
    _add_matrix(q); _add_wavelet(q)
    q.add_argument("--a", type=float, default=1.0)
    q.add_argument("--b", type=float, default=0.0)
    q.add_argument("--time-only", action="store_true", help="skip the SAFT-domain moments")
    q = ss.add_parser("covariance")
    q.add_argument("--input", type=Path, required=True)
    q.add_argument("--output", type=Path)
    _add_matrix(q); _add_wavelet(q)
    q.add_argument("--shift", type=float, default=0.5)

    p = sub.add_parser("dsawt", help="discrete transform and frames")
    ss = p.add_subparsers(dest="action", required=True)
    for name in ("analyze", "bounds", "reconstruct"):
        q = ss.add_parser(name)
        if name == "bounds":
            q.add_argument("--output", type=Path)
        else:
            _add_io(q)
        _add_matrix(q); _add_wavelet(q)
        # reconstruct takes the lattice from the table's sidecar unless --a0 is given
        q.add_argument("--a0", type=float, default=None if name == "reconstruct" else 2.0)
        q.add_argument("--b0", type=float, default=1.0)
        q.add_argument("--jmin", type=int, default=-3)
        q.add_argument("--jmax", type=int, default=3)
        q.add_argument("--kmin", type=int, default=-32)
        q.add_argument("--kmax", type=int, default=32)
        q.add_argument("--lattice", choices=["inverse", "direct"], default="inverse")
        q.add_argument("--trial-grid")
        if name == "reconstruct":
            q.add_argument("--t-grid")
            q.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("wigner", help="Wigner distribution")
    _add_io(p); _add_matrix(p); _workers(p)
    p.add_argument("--t-grid")
    p.add_argument("--a-grid")

    p = sub.add_parser("wavepacket", help="wave-packet cube, one CSV per N slice")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True, help="output directory")
    _add_matrix(p); _add_wavelet(p); _workers(p)
    p.add_argument("--a-grid")
    p.add_argument("--b-grid")
    p.add_argument("--n-grid")
    p.add_argument("--method", choices=["direct", "chirpfft"], default="direct")

    p = sub.add_parser("poisson", help="Poisson summation checks")
    ss = p.add_subparsers(dest="action", required=True)
    for name in ("classical", "sawt"):
        q = ss.add_parser(name)
        q.add_argument("--output", type=Path)
        q.add_argument("--period", "--T", dest="period", type=float, default=1.0)
        q.add_argument("--t-grid")
        q.add_argument("--k-max", type=int, default=16)
        q.add_argument("--convention", choices=["angular", "ordinary"], default="angular")
        if name == "classical":
            q.add_argument("--center", type=float, default=0.0)
            q.add_argument("--width", type=float, default=1.0)
            q.add_argument("--omega0", type=float, default=0.0)
        else:
            q.add_argument("--input", type=Path, required=True)
            _add_matrix(q); _add_wavelet(q)
            q.add_argument("--a", type=float, default=1.0)
            q.add_argument("--b", type=float, default=0.0)

    p = sub.add_parser("oracle", help="reference fixtures")
    ss = p.add_subparsers(dest="action", required=True)
    q = ss.add_parser("regen")
    q.add_argument("--tol", type=float, default=1e-9)
    q.add_argument("--output", type=Path)
    q.add_argument("--skip-measured", action="store_true", help="oracle values only")

    p = sub.add_parser("verify", help="run an invariant suite")
    from .verify import SUITES
    p.add_argument("--suite", choices=list(SUITES) + ["all"], required=True)
    p.add_argument("--tol", type=float)
    p.add_argument("--output", type=Path)

    p = sub.add_parser("render", help="heatmap PNG of a matrix CSV")
    _add_io(p)
    p.add_argument("--scale", choices=list(SCALES), default="abs")
    p.add_argument("--raw", action="store_true", help="one pixel per cell, no axes")
    return ap


HANDLERS = {"saft": cmd_saft, "sawt": cmd_sawt, "dsawt": cmd_dsawt, "wigner": cmd_wigner,
            "wavepacket": cmd_wavepacket, "poisson": cmd_poisson, "oracle": cmd_oracle,
            "verify": cmd_verify, "render": cmd_render}
NO_MATRIX = {"oracle", "verify", "render"}


def make_config(args) -> RunConfig:
    sc = args.subcommand
    cfg = RunConfig(sc, getattr(args, "action", None), getattr(args, "input", None), getattr(args, "output", None))
    needs_matrix = sc not in NO_MATRIX and not (sc == "poisson" and cfg.action == "classical")
    if sc == "sawt" and cfg.action == "synthesize" and not (args.matrix or args.matrix_kind):
        needs_matrix = False
    if needs_matrix:
        cfg.matrix = matrix_from_args(args)
    if getattr(args, "wavelet", None):
        cfg.wavelet = wavelet_from_args(args)
    if cfg.input is not None and sc != "oracle" and not Path(cfg.input).exists():
        raise ConfigError(f"--input: {cfg.input} does not exist")
    if cfg.output is not None and sc != "wavepacket":
        cfg.output = _out(cfg.output)
    return cfg


def run(cfg: RunConfig, args) -> int:
    return HANDLERS[cfg.subcommand](cfg, args)


# flags whose values may start with '-' (negative grid starts, matrix entries)
_VALUE_FLAGS = {"--matrix", "--omega", "--t-grid", "--a-grid", "--b-grid", "--n-grid", "--trial-grid",
                "--constant"}


def _join_values(argv: Sequence[str]) -> list:
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_join_values(argv))
    where = args.subcommand + (f" {args.action}" if getattr(args, "action", None) else "")
    try:
        cfg = make_config(args)
        return run(cfg, args)
    except ConfigError as e:
        print(f"{where}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        print(f"{where}: numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SawtError as e:
        print(f"{where}: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"{where}: error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
