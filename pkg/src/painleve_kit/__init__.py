"""Exact and numerical singularity analysis of plane Hamiltonian systems."""

__version__ = "0.1.0"
