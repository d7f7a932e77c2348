"""Rotationally symmetric graphical self-expanders."""
