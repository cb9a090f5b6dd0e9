"""Exact Berkovich spectra of p-adic differential modules on the affine line."""

__version__ = "0.1.0"
