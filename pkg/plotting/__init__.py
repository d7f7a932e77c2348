"""Interactive Plotly figures for finished runs."""
