"""Additive orders on N^n and separating weight vectors.

Three families are supported: ``lex`` (first coordinate decides),
``deglex`` (total degree first, then lex) and ``weight`` (dot product with a
positive integer vector, ties broken lexicographically so the order is total).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from oklab.errors import DimensionError, InputError

LESS, EQUAL, GREATER = -1, 0, 1

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class Order:
    kind: str = "lex"
    weight: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("lex", "deglex", "weight"):
            raise InputError(f"unknown order kind {self.kind!r}")
        if self.kind == "weight":
            if not self.weight:
                raise InputError("weight order needs a weight vector")
            if any(int(w) != w or w <= 0 for w in self.weight):
                raise InputError(f"weight entries must be positive integers: {self.weight}")
            object.__setattr__(self, "weight", tuple(int(w) for w in self.weight))
        elif self.weight is not None:
            raise InputError(f"{self.kind} order takes no weight")

    @classmethod
    def parse(cls, text: str) -> "Order":
        """Parse ``lex``, ``deglex`` or ``weight:4,1``."""
        text = text.strip()
        if text in ("lex", "deglex"):
            return cls(text)
        if text.startswith("weight:"):
            try:
                weight = tuple(int(w) for w in text[len("weight:"):].split(","))
            except ValueError:
                raise InputError(f"bad weight order {text!r}") from None
            return cls("weight", weight)
        raise InputError(f"bad order spec {text!r}")

    def __str__(self):
        if self.kind == "weight":
            return "weight:" + ",".join(map(str, self.weight))
        return self.kind

    def key(self, a: Sequence[int]) -> tuple:
        """Sort key; ``sorted(exps, key=order.key)`` lists exponents ascending."""
        a = tuple(a)
        if self.kind == "lex":
            return a
        if self.kind == "deglex":
            return (sum(a),) + a
        if len(a) != len(self.weight):
            raise DimensionError(f"exponent {a} does not match weight {self.weight}")
        return (sum(w * x for w, x in zip(self.weight, a)),) + a

    def key_matrix(self, points: np.ndarray) -> np.ndarray:
        """Row-wise version of :meth:`key` for an integer array of exponents."""
        points = np.asarray(points, dtype=np.int64)
        if self.kind == "lex":
            return points
        if self.kind == "deglex":
            head = points.sum(axis=1, keepdims=True)
        else:
            head = (points @ np.asarray(self.weight, dtype=np.int64))[:, None]
        return np.hstack([head, points])


LEX = Order("lex")
DEGLEX = Order("deglex")


def _check_dims(a, b):
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {tuple(a)} vs {tuple(b)}")


def compare(order: Order, a: Sequence[int], b: Sequence[int]) -> int:
    """Return LESS, EQUAL or GREATER."""
    _check_dims(a, b)
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


def _first_nonzero_sign(diff: np.ndarray) -> np.ndarray:
    nz = diff != 0
    first = nz.argmax(axis=1)
    vals = diff[np.arange(diff.shape[0]), first]
    return np.sign(vals) * nz.any(axis=1)


def separating_weight(A: Iterable[Sequence[int]], order: Order = LEX) -> tuple[int, ...]:
    """Positive integer weight gamma with  alpha < beta  =>  alpha.gamma < beta.gamma.

    The implication is required for every alpha in ``A`` and every beta in N^n.
    For lex the weight is sum_i (2C)^(n-i) e_i with C = 1 + max |alpha|.  For the
    other orders a multiple M of their leading form is added, with
    M = 1 + max alpha.gamma_lex, so a strict increase of the leading form
    dominates any lex term.
    """
    A = [tuple(int(x) for x in a) for a in A]
    if not A:
        raise InputError("separating_weight needs a nonempty exponent set")
    n = len(A[0])
    for a in A:
        _check_dims(a, A[0])
        if min(a) < 0:
            raise InputError(f"exponent {a} has a negative entry")
    C = 1 + max(sum(a) for a in A)
    lex_weight = [(2 * C) ** (n - i) for i in range(1, n + 1)]
    if order.kind == "lex":
        return tuple(lex_weight)
    M = 1 + max(sum(w * x for w, x in zip(lex_weight, a)) for a in A)
    lead = [1] * n if order.kind == "deglex" else list(order.weight)
    if len(lead) != n:
        raise DimensionError(f"order weight {order.weight} does not match n={n}")
    return tuple(M * l + w for l, w in zip(lead, lex_weight))


def verify_separation(
    A: Iterable[Sequence[int]],
    gamma: Sequence[int],
    bound: int | None = None,
    order: Order = LEX,
) -> bool:
    """Exhaustively test the separation property on the box [0, bound]^n.

    ``bound`` defaults to 3*C where C = 1 + max |alpha|.
    """
    A = np.array([tuple(a) for a in A], dtype=np.int64)
    if A.size == 0:
        return True
    n = A.shape[1]
    gamma = np.asarray(gamma, dtype=np.int64)
    if gamma.shape != (n,):
        raise DimensionError(f"weight {tuple(gamma)} does not match n={n}")
    if bound is None:
        bound = 3 * (1 + int(A.sum(axis=1).max()))
    axes = [np.arange(bound + 1, dtype=np.int64)] * n
    betas = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    beta_keys = order.key_matrix(betas)
    beta_dots = betas @ gamma
    for alpha in A:
        alpha_key = order.key_matrix(alpha[None, :])[0]
        greater = _first_nonzero_sign(beta_keys - alpha_key) > 0
        if np.any(beta_dots[greater] <= alpha @ gamma):
            return False
    return True
