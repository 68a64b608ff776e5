"""cocircular: solver and verifier for co-circular relative equilibria."""

__version__ = "0.1.0"
