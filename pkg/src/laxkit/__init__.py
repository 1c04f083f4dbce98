"""laxkit: desk-scale computations for finite-dimensional integrable
systems -- exact Laurent/Puiseux analysis of polynomial vector fields,
isospectral Lax flows with conservation diagnostics, and the spectral
apparatus of periodic Jacobi matrices.
"""

from . import exactalg, sysdsl, painleve, laxflow, jacobispec, builtins

__version__ = "0.1.0"

__all__ = ["exactalg", "sysdsl", "painleve", "laxflow", "jacobispec",
           "builtins", "__version__"]
