"""Error hierarchy, library defaults, equations and scenario configuration files."""
