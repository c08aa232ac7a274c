"""Exact and heuristic tools for class-edge partition problems on small
triangle-free and K_{r+1}-free graphs."""

__version__ = "0.1.0"
