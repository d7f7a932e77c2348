"""Hypersurface representations, snapshots and their differential geometry."""
