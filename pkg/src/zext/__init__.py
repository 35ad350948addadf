"""Decision and semi-decision procedures for infinite cyclic extensions of finitely presented groups."""

__version__ = "0.1.0"
