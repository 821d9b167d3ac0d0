"""Complex-valued graph Laplacians, their pseudoinverses, rEEP certificates and consensus flows."""

from .netmodel import ComplexGraph, GraphClass, StructureReport, build_graph, classify
from .spectral import LaplacianBundle, analyze, laplacian, laplacian_pinv, limit_matrix

__all__ = [
    "ComplexGraph",
    "GraphClass",
    "LaplacianBundle",
    "StructureReport",
    "analyze",
    "build_graph",
    "classify",
    "laplacian",
    "laplacian_pinv",
    "limit_matrix",
]
__version__ = "0.1.0"
