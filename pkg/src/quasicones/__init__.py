"""Tropical min-plus search engine for defect-reducing operator strategies
on quasicone matrices."""

__version__ = "0.1.0"
