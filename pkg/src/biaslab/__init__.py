"""Irrational factor functions over Z, imaginary quadratic fields and F_p[X]:
summatory functions, races between residue classes, Euler-product constants
and function-field L-polynomials."""
import os

# the default layer probes TBB first and warns when the installed one is too old
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"
