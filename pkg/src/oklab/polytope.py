"""Exact rational polytopes: convex hulls, facets, volumes and the polytope file format.

Hulls are built with an incremental beneath-beyond pass on integer-scaled
coordinates, so every predicate is exact.  Lower-dimensional inputs are
projected onto a coordinate subspace on which the affine span projects
bijectively, hulled there and lifted back.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from oklab.errors import DimensionError, InputError

MAX_DIM = 4

RatPoint = tuple[Fraction, ...]


def as_point(p: Iterable) -> RatPoint:
    return tuple(Fraction(x) for x in p)


def fmt_rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _det(rows: list[list[int]]) -> int:
    """Bareiss fraction-free determinant of a small integer matrix."""
    m = [list(r) for r in rows]
    size = len(m)
    if size == 0:
        return 1
    sign, prev = 1, 1
    for k in range(size - 1):
        if m[k][k] == 0:
            for r in range(k + 1, size):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def _primitive(vec: list[int]) -> list[int]:
    g = reduce(math.gcd, vec, 0)
    return [v // g for v in vec] if g > 1 else vec


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    red, pivots = rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def _hyperplane(pts: list[tuple[int, ...]], d: int) -> list[int]:
    """Primitive integer normal of the hyperplane through d affinely independent points of Z^d."""
    if d == 1:
        return [1]
    diffs = [[a - b for a, b in zip(p, pts[0])] for p in pts[1:]]
    normal = []
    for j in range(d):
        minor = [row[:j] + row[j + 1:] for row in diffs]
        normal.append((-1) ** j * _det(minor))
    return _primitive(normal)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _affine_basis(points: list[tuple[int, ...]]) -> list[int]:
    """Indices of a maximal affinely independent subset, chosen greedily."""
    chosen = [0]
    rows: list[list[Fraction]] = []
    for i in range(1, len(points)):
        cand = rows + [[Fraction(a - b) for a, b in zip(points[i], points[0])]]
        red, _ = rref(cand)
        if len(red) > len(rows):
            rows = red
            chosen.append(i)
            if len(rows) == len(points[0]):
                break
    return chosen


def _hull_int(points: list[tuple[int, ...]], start: list[int]):
    """Beneath-beyond on full-dimensional integer points in Z^d.

    Returns the boundary simplices as a dict id -> (vertex ids, normal, offset).
    """
    d = len(points[0])
    interior = [sum(points[i][j] for i in start) for j in range(d)]
    scale = d + 1
    facets: dict[int, tuple[tuple[int, ...], tuple[int, ...], int]] = {}
    counter = 0

    def make(verts):
        nonlocal counter
        normal = _hyperplane([points[v] for v in verts], d)
        offset = _dot(normal, points[verts[0]])
        if _dot(normal, interior) > scale * offset:
            normal = [-x for x in normal]
            offset = -offset
        facets[counter] = (tuple(sorted(verts)), tuple(normal), offset)
        counter += 1

    for drop in range(d + 1):
        make([v for k, v in enumerate(start) if k != drop])

    used = set(start)
    for idx, p in enumerate(points):
        if idx in used:
            continue
        visible = [fid for fid, (_, nrm, off) in facets.items() if _dot(nrm, p) > off]
        if not visible:
            continue
        ridge_count: dict[tuple[int, ...], int] = {}
        for fid in visible:
            verts = facets[fid][0]
            for ridge in combinations(verts, d - 1):
                ridge_count[ridge] = ridge_count.get(ridge, 0) + 1
        for fid in visible:
            del facets[fid]
        for ridge, count in ridge_count.items():
            if count == 1:
                make(list(ridge) + [idx])
    return facets


class RatPolytope:
    """Bounded rational polytope with matching vertex and facet descriptions.

    ``facets`` is a tuple of ``(normal, offset)`` pairs with primitive integer
    normals; the polytope is ``{x : normal.x <= offset for every facet}``.  A
    lower-dimensional polytope includes each equation of its affine span as a
    pair of opposite inequalities.
    """

    __slots__ = ("n", "dim", "vertices", "facets", "_simplices")

    def __init__(self, n, dim, vertices, facets, simplices=()):
        self.n = n
        self.dim = dim
        self.vertices = tuple(sorted(as_point(v) for v in vertices))
        self.facets = tuple(sorted((tuple(int(a) for a in nrm), Fraction(off)) for nrm, off in facets))
        self._simplices = tuple(simplices)
        self._cross_validate()

    @classmethod
    def empty(cls, n: int) -> "RatPolytope":
        return cls(n, -1, [], [((0,) * n, -1)])

    def _cross_validate(self):
        for v in self.vertices:
            for nrm, off in self.facets:
                if _dot(nrm, v) > off:
                    raise AssertionError(f"vertex {v} violates facet {nrm} <= {off}")
        if self.dim == self.n:
            for nrm, off in self.facets:
                tight = [v for v in self.vertices if _dot(nrm, v) == off]
                if len(tight) < self.n:
                    raise AssertionError(f"facet {nrm} <= {off} touches only {len(tight)} vertices")

    @property
    def is_empty(self) -> bool:
        return self.dim < 0

    @property
    def full_dimensional(self) -> bool:
        return self.dim == self.n

    def __eq__(self, other):
        if not isinstance(other, RatPolytope):
            return NotImplemented
        return (self.n, self.vertices, self.facets) == (other.n, other.vertices, other.facets)

    def __hash__(self):
        return hash((self.n, self.vertices, self.facets))

    def __repr__(self):
        verts = ", ".join("(" + ", ".join(str(x) for x in v) + ")" for v in self.vertices)
        return f"RatPolytope(n={self.n}, dim={self.dim}, vertices=[{verts}])"

    def contains(self, x: Sequence) -> bool:
        x = as_point(x)
        if len(x) != self.n:
            raise DimensionError(f"point of length {len(x)} in dimension {self.n}")
        return all(_dot(nrm, x) <= off for nrm, off in self.facets)

    def contains_polytope(self, other: "RatPolytope") -> bool:
        return all(self.contains(v) for v in other.vertices)

    def scaled(self, t) -> "RatPolytope":
        t = Fraction(t)
        if t <= 0:
            raise InputError("scale factor must be positive")
        return convex_hull([tuple(t * x for x in v) for v in self.vertices], n=self.n)

    def translated(self, shift: Sequence) -> "RatPolytope":
        shift = as_point(shift)
        return convex_hull([tuple(a + b for a, b in zip(v, shift)) for v in self.vertices], n=self.n)

    def volume(self) -> Fraction:
        return volume(self)


def convex_hull(points: Iterable[Sequence], n: int | None = None) -> RatPolytope:
    """Exact convex hull of rational points in the closed nonnegative orthant, n <= 4."""
    pts = sorted({as_point(p) for p in points})
    if not pts:
        if n is None:
            raise InputError("convex hull of an empty point set")
        return RatPolytope.empty(n)
    n = len(pts[0]) if n is None else n
    if any(len(p) != n for p in pts):
        raise DimensionError("points of mixed dimension")
    if n > MAX_DIM:
        raise DimensionError(f"dimension {n} > {MAX_DIM} is unsupported")
    if any(x < 0 for p in pts for x in p):
        raise InputError("points must lie in the closed nonnegative orthant")
    if n == 0:
        return RatPolytope(0, 0, [()], [])

    denom = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for p in pts for x in p), 1)
    ipts = [tuple(int(x * denom) for x in p) for p in pts]

    basis = _affine_basis(ipts)
    d = len(basis) - 1
    if d == 0:
        p = pts[0]
        facets = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            facets.append((tuple(e), p[i]))
            facets.append((tuple(-x for x in e), -p[i]))
        return RatPolytope(n, 0, [p], facets)

    diffs = [[Fraction(a - b) for a, b in zip(ipts[i], ipts[basis[0]])] for i in basis[1:]]
    _, coords = rref(diffs)
    proj = [tuple(p[j] for j in coords) for p in ipts]

    simplices = _hull_int(proj, basis)
    merged: dict[tuple[tuple[int, ...], int], None] = {}
    cand = sorted({v for verts, _, _ in simplices.values() for v in verts})
    for _, nrm, off in simplices.values():
        merged.setdefault((nrm, off), None)
    vertex_ids = []
    for v in cand:
        tight = [list(map(Fraction, nrm)) for nrm, off in merged if _dot(nrm, proj[v]) == off]
        if len(rref(tight)[0]) == d:
            vertex_ids.append(v)

    facets = []
    for nrm, off in merged:
        full = [0] * n
        for j, c in zip(coords, nrm):
            full[j] = c
        facets.append((tuple(full), Fraction(off, denom)))
    if d < n:
        for eq in nullspace(diffs, n):
            lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in eq), 1)
            eq_int = _primitive([int(x * lcm) for x in eq])
            off = Fraction(_dot(eq_int, ipts[basis[0]]), denom)
            facets.append((tuple(eq_int), off))
            facets.append((tuple(-x for x in eq_int), -off))

    tri = ()
    if d == n:
        tri = tuple((verts, denom) for verts, _, _ in simplices.values())
        tri = (tuple(ipts), tri)
    return RatPolytope(n, d, [pts[i] for i in vertex_ids], facets, tri)


def volume(P: RatPolytope) -> Fraction:
    """Exact Lebesgue volume; zero unless P is full-dimensional."""
    if not P.full_dimensional:
        return Fraction(0)
    ipts, tri = P._simplices
    n = P.n
    apex = ipts[min(v for verts, _ in tri for v in verts)]
    total = 0
    denom = 1
    for verts, denom in tri:
        if any(ipts[v] == apex for v in verts):
            continue
        rows = [[a - b for a, b in zip(ipts[v], apex)] for v in verts]
        total += abs(_det(rows))
    return Fraction(total, math.factorial(n) * denom**n)


def lattice_points(P: RatPolytope) -> list[tuple[int, ...]]:
    """All integer points of P, sorted lexicographically."""
    if P.is_empty:
        return []
    lo = [math.ceil(min(v[i] for v in P.vertices)) for i in range(P.n)]
    hi = [math.floor(max(v[i] for v in P.vertices)) for i in range(P.n)]
    if any(a > b for a, b in zip(lo, hi)):
        return []
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.n)
    keep = np.ones(len(grid), dtype=bool)
    for nrm, off in P.facets:
        # normal.x <= off  <=>  den * normal.x <= num  for integer x
        keep &= (grid @ np.asarray(nrm, dtype=np.int64)) * off.denominator <= off.numerator
    return sorted(tuple(int(x) for x in row) for row in grid[keep])


def simplex_points(a: Sequence) -> list[RatPoint]:
    a = as_point(a)
    n = len(a)
    pts = [(Fraction(0),) * n]
    for i, ai in enumerate(a):
        pts.append(tuple(ai if j == i else Fraction(0) for j in range(n)))
    return pts


# ---------------------------------------------------------------- file format


def format_polytope(P: RatPolytope) -> str:
    lines = [f"n={P.n}"]
    lines += [" ".join(fmt_rational(x) for x in v) for v in P.vertices]
    lines.append("facets")
    for nrm, off in P.facets:
        lines.append(" ".join(fmt_rational(a) for a in nrm) + " <= " + fmt_rational(off))
    return "\n".join(lines) + "\n"


def parse_polytope(text: str) -> RatPolytope:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise InputError("polytope file must start with 'n=<dim>'")
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise InputError(f"bad header {lines[0]!r}") from None
    verts, facets, in_facets = [], [], False
    for ln in lines[1:]:
        if ln == "facets":
            in_facets = True
            continue
        try:
            if in_facets:
                lhs, rhs = ln.split("<=")
                facets.append((tuple(Fraction(x) for x in lhs.split()), Fraction(rhs.strip())))
            else:
                verts.append(tuple(Fraction(x) for x in ln.split()))
        except (ValueError, ZeroDivisionError):
            raise InputError(f"unparseable polytope line {ln!r}") from None
    if any(len(v) != n for v in verts):
        raise InputError(f"vertex dimension differs from n={n}")
    P = convex_hull(verts, n=n)
    if facets:
        stated = sorted((tuple(int(a) for a in nrm), off) for nrm, off in facets)
        if stated != list(P.facets):
            raise InputError("facet block does not match the hull of the vertices")
    return P


def read_polytope(path) -> RatPolytope:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read polytope file {path}: {exc}") from None
    return parse_polytope(text)
