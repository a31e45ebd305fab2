"""Wavelet time-scale analysis of volatility clustering and chaos signatures in daily series."""

__version__ = "0.1.0"

from .errors import WavevolError  # noqa: E402
from .wavelet import ScaleGrid, Scalogram, WaveletSpec, cwt, cwt_direct, daubechies  # noqa: E402

__all__ = ["ScaleGrid", "Scalogram", "WaveletSpec", "WavevolError", "cwt", "cwt_direct", "daubechies", "__version__"]
