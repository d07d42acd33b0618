"""Numerical workbench for Kloosterman-sum bilinear forms and Dirichlet L-function moments."""

__version__ = "0.1.0"
