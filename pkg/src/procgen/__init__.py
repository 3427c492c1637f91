"""Procedural mesh generation: L-systems, generalised cylinders, local mesh operations."""
