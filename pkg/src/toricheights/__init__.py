"""Toric height predictions and their desk-scale verification."""
__version__ = "0.1.0"
