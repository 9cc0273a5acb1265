"""Special affine Fourier transform, its wavelet transform and related tools."""

from .core import (FOURIER, GeoGrid, RealGrid, SaftMatrix, Scalogram, Signal, Wavelet, gaussian_signal,
                   make_special_matrix, relative_l2)
from .dsawt import FrameSpec, dsawt_analyze, estimate_frame_bounds, frame_reconstruct
from .errors import ConfigError, NumericalError, SawtError
from .poisson import classical_poisson_check, sawt_poisson_check
from .saft import saft_forward, saft_inverse
from .sawt import analyze, localization, synthesize, verify_covariances
from .wavepacket import wp_analyze
from .wigner import wigner

__version__ = "0.1.0"

__all__ = [
    "FOURIER", "GeoGrid", "RealGrid", "SaftMatrix", "Scalogram", "Signal", "Wavelet", "gaussian_signal",
    "make_special_matrix", "relative_l2", "FrameSpec", "dsawt_analyze", "estimate_frame_bounds",
    "frame_reconstruct", "ConfigError", "NumericalError", "SawtError", "classical_poisson_check",
    "sawt_poisson_check", "saft_forward", "saft_inverse", "analyze", "localization", "synthesize",
    "verify_covariances", "wp_analyze", "wigner",
]
