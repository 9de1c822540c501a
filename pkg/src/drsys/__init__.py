"""Deaconu-Renault systems of finite directed graphs and conjugacy checks."""

from .errors import DrsysError
from .graph import BoundaryPoint, DirectedGraph, Path, parse_graph, parse_point
from .system import DRSystem

__all__ = ["BoundaryPoint", "DirectedGraph", "DRSystem", "DrsysError", "Path", "parse_graph", "parse_point"]
__version__ = "0.1.0"
