"""Qualitative stability analysis of Metzler sign-matrices with checkable certificates."""

__version__ = "0.1.0"
