"""Geospatial pattern mining with non-negative Tucker decomposition.

Builds a site-count tensor from georeferenced data sources, factorizes it
under non-negativity constraints, reduces the core tensor to a small set of
medoid pattern signatures under earth mover's distance, and assigns every
site to its nearest pattern. Ships a CLI, a benchmark harness, and an HTTP
API for the interactive explorer.
"""

__version__ = "0.1.0"
