"""Colour-range land-cover classification calibrated against census areas."""
__version__ = "0.1.0"
