"""Computations in the cell categories Theta_n and presheaves on them."""

__version__ = "0.1.0"
