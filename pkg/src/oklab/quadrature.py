"""Adaptive tensor Gauss-Legendre cubature over boxes with possibly infinite sides.

Infinite sides are compactified with x = a +/- s*artanh(t); cells are split in
all axes at once, largest error estimate first.  The result is summed in a
fixed cell order, so it does not depend on the worker count.
"""

from __future__ import annotations

import heapq
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from oklab.errors import NumericFailure


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("OKLAB_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class AxisMap:
    lo: float
    hi: float
    scale: float = 6.0

    @property
    def t_range(self) -> tuple[float, float]:
        if np.isfinite(self.lo) and np.isfinite(self.hi):
            return self.lo, self.hi
        if np.isfinite(self.lo) or np.isfinite(self.hi):
            return 0.0, 1.0
        return -1.0, 1.0

    def __call__(self, t):
        """Map t to x; returns (x, dx/dt)."""
        lo, hi, s = self.lo, self.hi, self.scale
        if np.isfinite(lo) and np.isfinite(hi):
            return t, np.ones_like(t)
        jac = s / (1.0 - t * t)
        if np.isfinite(lo):
            return lo + s * np.arctanh(t), jac
        if np.isfinite(hi):
            return hi - s * np.arctanh(t), jac
        return s * np.arctanh(t), jac


def _rule(order: int, n: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    grids = np.meshgrid(*([nodes] * n), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.ones(len(pts))
    for g in np.meshgrid(*([weights] * n), indexing="ij"):
        w = w * g.ravel()
    return pts, w


def cubature(
    f: Callable[[np.ndarray], np.ndarray],
    lo,
    hi,
    rtol: float = 1e-4,
    atol: float = 1e-10,
    order: int = 7,
    max_cells: int = 20000,
    scale: float = 6.0,
) -> tuple[float, float]:
    """Integrate vectorized ``f`` (shape (N, n) -> (N,)) over the box [lo, hi].

    Returns (value, error estimate).  Raises NumericFailure when the budget of
    cells is exhausted before the tolerance is met.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = len(lo)
    maps = [AxisMap(a, b, scale) for a, b in zip(lo, hi)]
    high_pts, high_w = _rule(order, n)
    low_pts, low_w = _rule(order - 2, n)

    def integrand(t):
        x = np.empty_like(t)
        jac = np.ones(len(t))
        for i, m in enumerate(maps):
            x[:, i], dj = m(t[:, i])
            jac *= dj
        vals = f(x) * jac
        return np.where(np.isfinite(vals), vals, 0.0)

    def estimate(cells):
        blocks = []
        for c_lo, c_hi in cells:
            half = (c_hi - c_lo) / 2
            mid = (c_hi + c_lo) / 2
            blocks.append((mid + high_pts * half, mid + low_pts * half, np.prod(half)))
        pts = np.concatenate([b[0] for b in blocks] + [b[1] for b in blocks])
        workers = worker_count()
        if workers > 1 and len(pts) > 4096:
            chunks = np.array_split(pts, workers)
            with ThreadPoolExecutor(workers) as pool:
                vals = np.concatenate(list(pool.map(integrand, chunks)))
        else:
            vals = integrand(pts)
        nh, nl = len(high_pts), len(low_pts)
        out = []
        for k, (_, _, vol) in enumerate(blocks):
            qh = vol * np.dot(high_w, vals[k * nh:(k + 1) * nh])
            base = len(blocks) * nh + k * nl
            ql = vol * np.dot(low_w, vals[base:base + nl])
            out.append((qh, abs(qh - ql)))
        return out

    t_lo = np.array([m.t_range[0] for m in maps])
    t_hi = np.array([m.t_range[1] for m in maps])
    cells = {0: (t_lo, t_hi)}
    results = {0: estimate([cells[0]])[0]}
    heap = [(-results[0][1], 0)]
    next_id = 1
    while True:
        total = float(np.sum([results[k][0] for k in sorted(results)]))
        err = float(np.sum([results[k][1] for k in sorted(results)]))
        if err <= max(atol, rtol * abs(total)):
            return total, err
        if len(cells) >= max_cells:
            raise NumericFailure(
                f"cubature did not converge: estimate {total:.6g} +/- {err:.2g} after {len(cells)} cells"
            )
        batch = [heapq.heappop(heap)[1] for _ in range(min(len(heap), max(1, len(heap) // 4), 64))]
        children = []
        for cid in batch:
            c_lo, c_hi = cells.pop(cid)
            del results[cid]
            mid = (c_lo + c_hi) / 2
            for corner in range(2**n):
                bits = [(corner >> i) & 1 for i in range(n)]
                a = np.where(bits, mid, c_lo)
                b = np.where(bits, c_hi, mid)
                children.append((next_id, (a, b)))
                next_id += 1
        for (cid, cell), res in zip(children, estimate([c for _, c in children])):
            cells[cid] = cell
            results[cid] = res
            heapq.heappush(heap, (-res[1], cid))
