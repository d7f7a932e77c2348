"""Weights, integral functionals, pointwise monitors and verdicts."""
