"""Infinite time Turing machines: exact transfinite simulation and program toolkit."""

__version__ = "0.1.0"
