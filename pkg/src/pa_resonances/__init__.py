"""Ruelle resonances of linear pseudo-Anosov maps on square-tiled surfaces."""

__version__ = "0.1.0"
