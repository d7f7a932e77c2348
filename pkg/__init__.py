"""
MCF Lab - Mean Curvature Flow and Self-Expander Laboratory
==========================================================
Numerical laboratory for mean curvature flow of curves and rotationally
symmetric hypersurfaces and for its convergence to self-expanders.

Features:
- Parametric and graphical time stepping with adaptive steps
- Drifting and normalized flow variants with exact clock conversion
- Weighted monotone quantities and deficit checks with typed verdicts
- Shooting solver for rotational graphical expanders
- Configuration-driven runs and parallel sweeps with CSV/JSON outputs
"""

__version__ = "1.0.0"
__author__ = "MCF Lab developers"
