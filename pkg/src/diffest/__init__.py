"""Precision limits for estimating momentum diffusion of free Gaussian wavepackets."""

__version__ = "0.1.0"
