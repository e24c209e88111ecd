"""Verification toolkit for weak flexibility of list colorings on sparse plane graphs."""

__version__ = "0.1.0"
