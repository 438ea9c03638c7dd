"""Disordered spin-1/2 Floquet quantum walk: dynamics, symmetries and spectra."""

__version__ = "0.1.0"
