"""A-polynomials, SU(2) pillowcase images and holonomy-perturbation planners for knots."""

__version__ = "0.1.0"
