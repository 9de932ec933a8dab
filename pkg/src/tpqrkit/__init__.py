"""Vanishing-cycle lattices, divides, quivers, Floer tables and
critical-point tracking for the T_{p,q,r} singularities."""
__version__ = "0.1.0"
