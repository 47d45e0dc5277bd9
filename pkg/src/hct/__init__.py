"""A minimal intensional type theory checker with normalization by evaluation."""

__version__ = "0.1.0"
