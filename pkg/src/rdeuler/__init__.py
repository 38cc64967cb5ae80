"""Residual distribution solver for the 2D compressible Euler equations.

Explicit deferred-correction time stepping on Bernstein-Bezier bases over
unstructured triangle or quad meshes, with an optional correction layer
that makes the schemes locally conservative in angular momentum.
"""

__version__ = "0.1.0"
