"""Discrete spectrum of the stationary sine-Gordon scattering problem."""
__version__ = "0.1.0"
