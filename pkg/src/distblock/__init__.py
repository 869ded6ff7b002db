"""Exact distance-matrix algebra for multi-block graphs (every block complete multipartite)."""

__version__ = "0.1.0"
