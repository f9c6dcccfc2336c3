"""Large-deviation experiments for products of random invertible matrices."""

__version__ = "0.1.0"
