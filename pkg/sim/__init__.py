"""Configured runs, monitors, reports and sweeps."""
