"""Internal property suite: quick, seeded checks of every module, used by ``oklab verify``."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import numpy as np

from oklab.bodies import body_chain, delta_k, essential_membership, seshadri_param, simplex_body
from oklab.degeneration import DegenerationRun, audited_constant, degeneration_error, rescale_basis
from oklab.moment import MomentModel, hessian, moment_map, potential, symplectic_volume
from oklab.order import DEGLEX, LEX, Order, compare, separating_weight, verify_separation
from oklab.polytope import convex_hull, format_polytope, parse_polytope
from oklab.sections import (
    ModelSpec,
    conic_flag,
    format_sections,
    leading_set,
    model_sections,
    parse_sections,
)

Check = tuple[str, bool, str]


def _orders_additive(rng) -> Check:
    orders = [LEX, DEGLEX, Order.parse("weight:2,1,3")]
    bad = 0
    for _ in range(300):
        a, b, c = (tuple(int(v) for v in rng.integers(0, 5, 3)) for _ in range(3))
        for o in orders:
            ab = compare(o, a, b)
            shifted = compare(o, tuple(x + z for x, z in zip(a, c)), tuple(y + z for y, z in zip(b, c)))
            bad += ab != shifted or compare(o, b, a) != -ab
    return "order: total and additive", bad == 0, f"{bad} violations in 900 triples"


def _separation(rng) -> Check:
    fails = 0
    for _ in range(20):
        n = int(rng.integers(1, 4))
        A = {tuple(int(v) for v in rng.integers(0, 4, n)) for _ in range(int(rng.integers(1, 6)))}
        for o in (LEX, DEGLEX):
            fails += not verify_separation(A, separating_weight(A, o), order=o)
    return "order: separating weight", fails == 0, f"{fails} failures in 40 sets"


def _curve_bodies(rng) -> Check:
    ok = all(
        delta_k(leading_set(ModelSpec.curve(d), k)).vertices == ((0,), (d,))
        for d in range(1, 5) for k in (1, 2)
    )
    return "bodies: curve body is [0,d]", ok, "d<=4, k<=2"


def _volume_identity(rng) -> Check:
    worst = []
    for n in (1, 2):
        for d in (1, 2, 3):
            P = delta_k(leading_set(ModelSpec.projective_space(n, d), 1))
            worst.append(math.factorial(n) * P.volume() == d**n)
    return "bodies: n!·vol(Delta_1) = d^n", all(worst), "n<=2, d<=3"


def _conic_flag(rng) -> Check:
    change = conic_flag()
    change.check(6)
    target = simplex_body((1, 4))
    chain = body_chain(ModelSpec.projective_space(2, 2, flag=change), [1, 2])
    ok = all(target.contains_polytope(P) for _, P in chain.levels)
    return "sections: conic flag bodies inside Sigma(1,4)", ok, "k=1,2"


def _round_trips(rng) -> Check:
    P = convex_hull([(0, 0), (Fraction(3, 2), 0), (0, 2), (1, 1)])
    space = model_sections(ModelSpec.projective_space(2, 2, flag=conic_flag()), 1)
    ok = parse_polytope(format_polytope(P)) == P and parse_sections(format_sections(space)) == space
    return "files: polytope and section round trip", ok, "exact equality"


def _semigroup(rng) -> Check:
    model = ModelSpec.projective_space(2, 1)
    sets = {k: set(leading_set(model, k).exponents) for k in (1, 2, 3)}
    ok = all(
        tuple(x + y for x, y in zip(a, b)) in sets[k + m]
        for k in (1, 2) for m in (1, 2) if k + m <= 3 for a in sets[k] for b in sets[m]
    )
    return "sections: A(k) + A(m) inside A(k+m)", ok, "P2, O(1), k+m<=3"


def _seshadri(rng) -> Check:
    vals = [seshadri_param(delta_k(leading_set(ModelSpec.projective_space(2, d), 1, DEGLEX))) for d in (1, 2, 3)]
    ok = vals == [1, 2, 3] and seshadri_param(simplex_body((1, 1, 4))) == 1
    return "bodies: Seshadri parameters", ok, f"P2: {[str(v) for v in vals]}"


def _essential(rng) -> Check:
    P = simplex_body((1, 4))
    ok = essential_membership(P, (0, 0)) and essential_membership(P, (0, 1)) and not essential_membership(P, (0, 4))
    return "bodies: essential interior keeps coordinate faces", ok, "Sigma(1,4)"


def _moment_gradient(rng) -> Check:
    mm = MomentModel([(0, 0), (4, 0), (0, 4), (1, 1)])
    x = rng.uniform(-3, 3, size=(50, 2))
    h = 1e-6
    fd = np.stack([(potential(mm, x + h * e) - potential(mm, x - h * e)) / (2 * h) for e in np.eye(2)], axis=-1)
    g_err = float(np.abs(fd - moment_map(mm, x)).max())
    fdh = np.stack([(moment_map(mm, x + 1e-5 * e) - moment_map(mm, x - 1e-5 * e)) / 2e-5 for e in np.eye(2)], axis=-1)
    h_err = float(np.abs(fdh - hessian(mm, x)).max())
    return "moment: gradient and Hessian match differences", g_err <= 1e-6 and h_err <= 1e-5, f"{g_err:.2g}, {h_err:.2g}"


def _moment_volume(rng) -> Check:
    mm = MomentModel([(0, 0), (1, 0), (0, 1), (1, 1)])
    v = symplectic_volume(mm)
    return "moment: int det Hess = vol(Conv A)", abs(v - 1) <= 1e-2, f"{v:.6g} vs 1"


def _degeneration(rng) -> Check:
    basis = leading_set(ModelSpec.projective_space(2, 2, flag=conic_flag()), 1)
    run = DegenerationRun.for_basis(basis, Fraction(1, 2))
    C = audited_constant(run)
    ok = True
    for j in range(1, 11):
        r = DegenerationRun(basis, run.gamma, Fraction(1, 2**j))
        ok &= degeneration_error(r) <= C * float(r.tau)
        ok &= all(s.terms[a] == 1 for a, s in zip(basis.exponents, rescale_basis(r)))
    toric = leading_set(ModelSpec.projective_space(2, 2), 1)
    ok &= degeneration_error(DegenerationRun.for_basis(toric, Fraction(1, 3))) == 0
    return "degeneration: error <= C tau", bool(ok), f"C={C:g}, tau=2^-1..2^-10"


CHECKS: tuple[Callable[[np.random.Generator], Check], ...] = (
    _orders_additive,
    _separation,
    _curve_bodies,
    _volume_identity,
    _conic_flag,
    _round_trips,
    _semigroup,
    _seshadri,
    _essential,
    _moment_gradient,
    _moment_volume,
    _degeneration,
)


def run_suite(seed: int = 0) -> list[Check]:
    out = []
    for check in CHECKS:
        rng = np.random.default_rng(seed)
        try:
            out.append(check(rng))
        except Exception as exc:  # a crash is a failed property, reported with its message
            out.append((check.__name__.lstrip("_"), False, f"raised {type(exc).__name__}: {exc}"))
    return out
