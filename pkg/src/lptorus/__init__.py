"""Littlewood-Paley blocks, paraproducts and generalised Taylor remainders on the torus."""

__version__ = "0.1.0"

from .errors import LPError  # noqa: E402
from .field import BlockSequence, Field  # noqa: E402
from .spectral import DyadicPartition, make_partition  # noqa: E402

__all__ = ["BlockSequence", "DyadicPartition", "Field", "LPError", "make_partition", "__version__"]
