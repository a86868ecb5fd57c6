"""Numerical certification toolkit for real reductive homogeneous spaces G/H:
sphericity, KAH decompositions, weights, exponent calculus and SL(2, R)
decay envelopes."""

__version__ = "0.1.0"

from .catalog import list_spaces, load_space  # noqa: E402,F401
