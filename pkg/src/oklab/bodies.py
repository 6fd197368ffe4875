"""Okounkov bodies Delta_k, essential interiors, Okounkov domains and Seshadri parameters.

The ball B_r in the Seshadri identity is the region {sum |z_i|^2 < r}, i.e. r
is a squared radius.  This is the only reading under which the Seshadri
constant of O(d) on P^1 comes out as d.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from oklab.errors import DimensionError, InputError
from oklab.order import LEX, Order
from oklab.polytope import RatPolytope, as_point, convex_hull, simplex_points
from oklab.sections import LeadingSet, ModelSpec, leading_set


def _is_coordinate_facet(normal, offset) -> bool:
    return offset == 0 and sum(1 for a in normal if a) == 1 and min(normal) == -1


def essential_membership(P: RatPolytope, x: Sequence) -> bool:
    """Membership in the interior of P relative to the closed nonnegative orthant."""
    if not P.full_dimensional:
        raise DimensionError("essential interior needs a full-dimensional polytope")
    x = as_point(x)
    if len(x) != P.n:
        raise DimensionError(f"point of length {len(x)} for a polytope in dimension {P.n}")
    if any(c < 0 for c in x):
        return False
    for nrm, off in P.facets:
        val = sum(a * c for a, c in zip(nrm, x))
        if _is_coordinate_facet(nrm, off):
            continue
        if val >= off:
            return False
    return True


def moment_point(z: Sequence) -> tuple[Fraction, ...]:
    """mu(z) = (|z_1|^2, ..., |z_n|^2) for z given as (re, im) pairs, or complex numbers."""
    out = []
    for c in z:
        if isinstance(c, complex):
            re, im = Fraction(c.real), Fraction(c.imag)
        else:
            re, im = (Fraction(t) for t in c)
        out.append(re * re + im * im)
    return tuple(out)


def domain_membership(P: RatPolytope, z: Sequence | None = None, mu: Sequence | None = None) -> bool:
    """Is z in the Okounkov domain mu^{-1}(P^ess)?  ``mu`` may be passed directly."""
    if (z is None) == (mu is None):
        raise InputError("pass exactly one of z or mu")
    point = moment_point(z) if z is not None else as_point(mu)
    return essential_membership(P, point)


def delta_k(A: LeadingSet) -> RatPolytope:
    """(1/k) Conv(A(kL))."""
    if not A.exponents:
        raise InputError("empty leading set")
    k = Fraction(A.level)
    return convex_hull([tuple(Fraction(x) / k for x in a) for a in A.exponents])


@dataclass(frozen=True)
class BodyApprox:
    order: Order
    levels: tuple[tuple[int, RatPolytope], ...]

    def body(self, k: int) -> RatPolytope:
        return dict(self.levels)[k]

    def inclusions(self) -> list[tuple[int, int, bool]]:
        """(k, m, Delta_k inside Delta_m) for stored pairs with k | m."""
        out = []
        for (k, P), (m, Q) in combinations(self.levels, 2):
            if m % k == 0:
                out.append((k, m, Q.contains_polytope(P)))
        return out


def body_chain(model: ModelSpec, levels: Sequence[int], order: Order = LEX) -> BodyApprox:
    levels = sorted(set(int(k) for k in levels))
    if not levels or levels[0] < 1:
        raise InputError("levels must be positive integers")
    return BodyApprox(order, tuple((k, delta_k(leading_set(model, k, order))) for k in levels))


def _cut_points(P: RatPolytope, axis: int, value: Fraction, keep) -> list:
    pts = [v for v in P.vertices if keep(v[axis])]
    for u, w in combinations(P.vertices, 2):
        a, b = u[axis], w[axis]
        if (a - value) * (b - value) < 0:
            t = (value - a) / (b - a)
            pts.append(tuple(x + t * (y - x) for x, y in zip(u, w)))
    return pts


def slice_polytope(P: RatPolytope, axis: int, value) -> RatPolytope:
    """P intersected with {x_axis = value}, expressed in the remaining n-1 coordinates."""
    if P.n < 2:
        raise DimensionError("slicing needs n >= 2")
    if not 0 <= axis < P.n:
        raise DimensionError(f"axis {axis} out of range")
    value = Fraction(value)
    pts = _cut_points(P, axis, value, lambda a: a == value)
    pts = [p[:axis] + p[axis + 1:] for p in pts if p[axis] == value]
    return convex_hull(pts, n=P.n - 1)


def shift_polytope(P: RatPolytope, axis: int, threshold) -> RatPolytope:
    """(P intersected with {x_axis >= threshold}) - threshold * e_axis."""
    if not 0 <= axis < P.n:
        raise DimensionError(f"axis {axis} out of range")
    r = Fraction(threshold)
    pts = _cut_points(P, axis, r, lambda a: a >= r)
    pts = [tuple(x - r if i == axis else x for i, x in enumerate(p)) for p in pts]
    return convex_hull(pts, n=P.n)


def seshadri_param(P: RatPolytope) -> Fraction:
    """max { t >= 0 : t * (standard simplex) inside P }.

    By convexity t*Sigma lies in P iff 0 and every t*e_i do, which reduces to
    the minimum of offset / max_i normal_i over facets with a positive entry.
    """
    if not P.full_dimensional:
        raise DimensionError("seshadri_param needs a full-dimensional polytope")
    if not P.contains((0,) * P.n):
        return Fraction(0)
    best = None
    for nrm, off in P.facets:
        top = max(nrm)
        if top > 0:
            cand = off / top
            best = cand if best is None else min(best, cand)
    return best


def simplex_body(a: Sequence) -> RatPolytope:
    """Sigma_a = Conv{0, a_1 e_1, ..., a_n e_n}."""
    a = as_point(a)
    if not a or any(x <= 0 for x in a):
        raise InputError(f"simplex parameters must be positive: {a}")
    return convex_hull(simplex_points(a))


def ellipsoid_domain(a: Sequence, z: Sequence | None = None, mu: Sequence | None = None) -> bool:
    """sum_i |z_i|^2 / a_i < 1, the domain over the essential interior of Sigma_a."""
    a = as_point(a)
    if any(x <= 0 for x in a):
        raise InputError(f"ellipsoid parameters must be positive: {a}")
    if (z is None) == (mu is None):
        raise InputError("pass exactly one of z or mu")
    point = moment_point(z) if z is not None else as_point(mu)
    if len(point) != len(a):
        raise DimensionError("point and ellipsoid dimensions differ")
    if any(c < 0 for c in point):
        return False
    return sum(c / x for c, x in zip(point, a)) < 1
