"""Computational toolkit for bilinear forms graphs and distance-regular graph feasibility."""

__version__ = "0.1.0"
