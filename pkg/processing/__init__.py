"""Finite-difference stencils on nonuniform grids."""
