"""
geo-sublinear - Source Package.

Sublinear-time minimum enclosing ball, MEB with outliers and related
shape-fitting solvers, with a command-line surface for generating,
solving, verifying and benchmarking instances.
"""

__version__ = "0.3.0"
__date__ = "2026-10-18"
__author__ = "Lucien"
__email__ = "lucien-6@qq.com"
