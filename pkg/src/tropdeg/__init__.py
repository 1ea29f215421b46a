"""Tropical intersection theory on quasi-embedded conical complexes."""
