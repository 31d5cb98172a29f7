"""Locate Riemann and Polya zeros through coherent destruction of tunneling
in a simulated, periodically driven qubit."""

__version__ = "0.1.0"
