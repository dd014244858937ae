"""Discrete volumes, solid-angle valuations and Grassmann angle valuations of lattice polytopes."""

__version__ = "0.1.0"
