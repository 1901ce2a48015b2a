"""Clique-graph dynamics on locally cyclic graphs of minimum degree at least six."""

__version__ = "0.1.0"
