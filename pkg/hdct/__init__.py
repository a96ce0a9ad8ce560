"""
hdct - mean tests for high-dimensional compositional data.
"""

__version__ = "0.1.0"
