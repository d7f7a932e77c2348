"""Run directories, snapshot and series files."""
