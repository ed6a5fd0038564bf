"""Compressive line spectral estimation with band exclusion and polar interpolation."""
from .frame import DftFrame, atom, build_frame, coherence, coherence_band
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "DftFrame", "atom", "build_frame", "coherence", "coherence_band"]
