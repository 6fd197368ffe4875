from fractions import Fraction

import pytest

from oklab.bodies import (
    body_chain,
    delta_k,
    domain_membership,
    ellipsoid_domain,
    essential_membership,
    moment_point,
    seshadri_param,
    shift_polytope,
    simplex_body,
    slice_polytope,
)
from oklab.errors import DimensionError, InputError
from oklab.order import DEGLEX, LEX
from oklab.polytope import convex_hull
from oklab.sections import ModelSpec, leading_set

F = Fraction
SIGMA_11 = simplex_body((1, 1))
TRAPEZOID = convex_hull([(0, 0), (4, 0), (2, 2), (0, 2)])


@pytest.mark.parametrize("x, expected", [((0, 0), True), ((F(1, 2), F(1, 2)), False), ((F(1, 4), F(1, 4)), True),
                                         ((0, F(1, 2)), True), ((0, 1), False), ((F(-1, 9), 0), False)])
def test_essential_membership(x, expected):
    assert essential_membership(SIGMA_11, x) is expected


def test_essential_needs_full_dimension():
    with pytest.raises(DimensionError):
        essential_membership(convex_hull([(0, 0), (1, 1)]), (0, 0))


def test_domain_membership_examples():
    assert domain_membership(SIGMA_11, z=[(0, 0), (0, 0)])
    assert moment_point([(F(3, 5), 0), (0, F(4, 5))]) == (F(9, 25), F(16, 25))
    assert not domain_membership(SIGMA_11, z=[(F(3, 5), 0), (0, F(4, 5))])
    assert domain_membership(simplex_body((1, 1, 4)), mu=(0, 0, 2))
    assert domain_membership(SIGMA_11, z=[complex(0.25, 0), complex(0, 0.25)])
    with pytest.raises(InputError):
        domain_membership(SIGMA_11)


@pytest.mark.parametrize("d, k", [(d, k) for d in (1, 3, 5) for k in (1, 2, 3)])
def test_curve_bodies(d, k):
    assert delta_k(leading_set(ModelSpec.curve(d), k)).vertices == ((0,), (d,))


def test_projective_line_level_two_is_simplex():
    # hull oracle: the lattice points of 2*Sigma scaled by 1/2 span Sigma
    assert delta_k(leading_set(ModelSpec.projective_space(2, 1), 2)) == SIGMA_11


@pytest.mark.parametrize("k", [1, 2, 3])
def test_toric_body_is_polytope(k):
    assert delta_k(leading_set(ModelSpec.toric(TRAPEZOID), k)) == TRAPEZOID


def test_toric_translation_to_flag_vertex():
    moved = TRAPEZOID.translated((1, 3))
    assert delta_k(leading_set(ModelSpec.toric(moved), 1)) == TRAPEZOID


def test_body_chain_inclusions():
    chain = body_chain(ModelSpec.projective_space(2, 2), [1, 2, 3, 4])
    assert chain.inclusions() == [(1, 2, True), (1, 3, True), (1, 4, True), (2, 4, True)]
    assert chain.body(3) == simplex_body((2, 2))
    with pytest.raises(InputError):
        body_chain(ModelSpec.curve(2), [0, 1])


def test_slice_and_shift_examples():
    assert slice_polytope(SIGMA_11, 0, 0) == convex_hull([(0,), (1,)])
    assert shift_polytope(SIGMA_11, 0, F(1, 2)) == simplex_body((F(1, 2), F(1, 2)))
    assert slice_polytope(SIGMA_11, 0, 2).is_empty
    assert shift_polytope(SIGMA_11, 1, 3).is_empty
    with pytest.raises(DimensionError):
        slice_polytope(convex_hull([(0,), (1,)]), 0, 0)


@pytest.mark.parametrize(
    "r, shifted, cut",
    [
        # frozen from scipy HalfspaceIntersection and a vertex-pair slice on the trapezoid
        (0, [(0, 0), (0, 2), (2, 2), (4, 0)], [(0,), (2,)]),
        (F(1, 2), [(0, 0), (0, 2), (F(3, 2), 2), (F(7, 2), 0)], [(0,), (2,)]),
        (1, [(0, 0), (0, 2), (1, 2), (3, 0)], [(0,), (2,)]),
    ],
)
def test_trapezoid_slices(r, shifted, cut):
    assert shift_polytope(TRAPEZOID, 0, r) == convex_hull(shifted)
    assert slice_polytope(TRAPEZOID, 0, r) == convex_hull(cut)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_seshadri_projective_plane(d):
    # LP oracle over Qhull facets gives d
    assert seshadri_param(delta_k(leading_set(ModelSpec.projective_space(2, d), 1, DEGLEX))) == d


def test_seshadri_examples():
    assert seshadri_param(simplex_body((1, 1, 4))) == 1
    assert seshadri_param(convex_hull([(0, 0), (1, 0), (0, 1), (1, 1)])) == 1
    assert seshadri_param(convex_hull([(1, 1), (2, 1), (1, 2)])) == 0


def test_simplex_body_and_ellipsoid():
    assert simplex_body((1, 1)) == convex_hull([(0, 0), (1, 0), (0, 1)])
    assert 6 * simplex_body((1, 1, 4)).volume() == 4
    assert ellipsoid_domain((1, 1, 4), mu=(F(1, 4), F(1, 4), 1))
    assert not ellipsoid_domain((1, 1, 4), mu=(F(1, 2), F(1, 4), 1))
    with pytest.raises(InputError):
        simplex_body((1, 0))
    with pytest.raises(DimensionError):
        ellipsoid_domain((1, 4), mu=(0, 0, 0))


def test_lex_and_deglex_agree_on_projective_bodies():
    for order in (LEX, DEGLEX):
        assert delta_k(leading_set(ModelSpec.projective_space(3, 2), 1, order)) == simplex_body((2, 2, 2))
