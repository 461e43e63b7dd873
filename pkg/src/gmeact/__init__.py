"""Numerical toolkit for multi-copy activation of genuine multipartite
entanglement: state families, local compression maps, witness linear
programs, product-vector searches and shot-noise witness estimation.
"""

__version__ = "0.1.0"

from .kernels import backend_name

__all__ = ["backend_name", "__version__"]
