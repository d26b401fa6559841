"""
ametric-lab

Numerical toolkit for convex A-metric spaces: axiom and convexity checks,
Zamfirescu-type contractions, Picard and Mann iteration with rate bounds,
and stability of the Mann iteration.
"""

__version__ = "0.1.0"
