"""Herglotz-Zagier functions and generalized Mordell-Tornheim zeta values."""

__version__ = "0.1.0"
