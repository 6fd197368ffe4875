"""Newton-Okounkov bodies, Okounkov domains and toric moment-map geometry."""

from oklab.errors import (
    DependenceError,
    DimensionError,
    InputError,
    NumericFailure,
    OklabError,
    PropertyViolation,
)
from oklab.order import Order, compare, separating_weight, verify_separation

__version__ = "0.1.0"

__all__ = [
    "DependenceError",
    "DimensionError",
    "InputError",
    "NumericFailure",
    "OklabError",
    "Order",
    "PropertyViolation",
    "compare",
    "separating_weight",
    "verify_separation",
]
