"""Compile two-counter machines into Presburger arithmetic with one unary predicate,
and check the resulting sentences against bit-string models of machine runs."""

__version__ = "0.1.0"
