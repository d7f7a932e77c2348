"""Catalog of initial data and admissibility checks."""
